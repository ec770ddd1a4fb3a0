#include "deltasum/characters.hpp"

#include "deltasum/compensated.hpp"
#include "deltasum/error.hpp"

#include <map>
#include <mutex>
#include <string>

namespace deltasum {

namespace {

std::shared_ptr<const DlogTable> build_table(i64 q) {
    auto t = std::make_shared<DlogTable>();
    t->q = q;
    t->generator = primitive_root(q);
    t->log.assign(std::size_t(q), 0);
    t->roots.resize(std::size_t(q - 1));
    t->power.resize(std::size_t(q - 1));
    i64 x = 1;
    for (i64 k = 0; k < q - 1; ++k) {
        t->log[std::size_t(x)] = k;
        t->power[std::size_t(k)] = x;
        t->roots[std::size_t(k)] = unit_root(k, q - 1);
        x = mul_mod(x, t->generator, q);
    }
    return t;
}

}  // namespace

std::shared_ptr<const DlogTable> DlogTable::get(i64 q) {
    if (q < 3 || q > 10'000'000 || !is_prime(q))
        throw Error(ErrorKind::NotPrime, "character modulus must be an odd prime <= 10^7, got " + std::to_string(q));
    static std::mutex mu;
    static std::map<i64, std::shared_ptr<const DlogTable>> cache;
    std::lock_guard lock(mu);
    auto& slot = cache[q];
    if (!slot) slot = build_table(q);
    return slot;
}

DirichletCharacter::DirichletCharacter(i64 q, i64 index) : table_(DlogTable::get(q)), index_(index) {
    if (index < 0 || index >= q - 1)
        throw Error(ErrorKind::OutOfRange, "character index " + std::to_string(index) + " mod " + std::to_string(q));
}

ComplexValue DirichletCharacter::operator()(i64 n) const noexcept {
    const i64 q = table_->q;
    const i64 r = mod(n, q);
    if (r == 0) return {0.0, 0.0};
    // index and log are below 10^7, so the product fits.
    const i64 k = (index_ * table_->log[std::size_t(r)]) % (q - 1);
    return table_->roots[std::size_t(k)];
}

RationalAngle DirichletCharacter::angle(i64 n) const {
    const i64 q = table_->q;
    const i64 r = mod(n, q);
    if (r == 0) throw Error(ErrorKind::NotUnit, std::to_string(n) + " mod " + std::to_string(q));
    return RationalAngle(i64((i128(index_) * table_->log[std::size_t(r)]) % (q - 1)), q - 1);
}

DirichletCharacter DirichletCharacter::conj() const {
    const i64 q = table_->q;
    return DirichletCharacter(q, index_ == 0 ? 0 : q - 1 - index_);
}

int DirichletCharacter::parity() const noexcept {
    // log(-1) = (q-1)/2, so chi(-1) = (-1)^index.
    return index_ % 2 == 0 ? 1 : -1;
}

DirichletCharacter DirichletCharacter::legendre(i64 q) {
    return DirichletCharacter(q, (q - 1) / 2);
}

std::vector<DirichletCharacter> enumerate_characters(i64 q) {
    std::vector<DirichletCharacter> out;
    out.reserve(std::size_t(q - 1));
    for (i64 a = 0; a < q - 1; ++a) out.emplace_back(q, a);
    return out;
}

ComplexValue gauss_sum(const DirichletCharacter& chi) {
    const i64 q = chi.modulus();
    if (q > 1'000'000) throw Error(ErrorKind::BudgetExceeded, "gauss_sum modulus above 10^6");
    CompensatedSum acc;
    for (i64 a = 1; a < q; ++a) acc.add(chi(a) * unit_root(a, q));
    return acc.value();
}

}  // namespace deltasum
