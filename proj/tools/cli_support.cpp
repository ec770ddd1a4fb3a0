#include "cli_support.hpp"

#include "deltasum/error.hpp"

#include <fcntl.h>
#include <sys/file.h>
#include <unistd.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace deltasum::cli {

namespace fs = std::filesystem;

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

[[noreturn]] void bad(int line, const std::string& msg) {
    throw Error(ErrorKind::ParseError, "config line " + std::to_string(line) + ": " + msg);
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string temp_name(const fs::path& target) {
    return target.string() + ".tmp." + std::to_string(::getpid());
}

void write_atomically(const fs::path& target, const std::string& content) {
    const std::string tmp = temp_name(target);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << content;
        if (!out) throw Error(ErrorKind::OutOfRange, "cannot write " + tmp);
    }
    fs::rename(tmp, target);
}

}  // namespace

CliConfig default_config() {
    CliConfig c;
    if (const char* x = std::getenv("XDG_CACHE_HOME"); x && *x)
        c.cache_dir = (fs::path(x) / "deltasum").string();
    else if (const char* h = std::getenv("HOME"); h && *h)
        c.cache_dir = (fs::path(h) / ".cache" / "deltasum").string();
    else
        c.cache_dir = ".deltasum-cache";
    return c;
}

CliConfig parse_config(const std::string& text, CliConfig cfg) {
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        if (auto h = raw.find('#'); h != std::string::npos) raw.resize(h);
        const std::string s = trim(raw);
        if (s.empty()) continue;
        const auto eq = s.find('=');
        if (eq == std::string::npos) bad(line, "expected key = value");
        const std::string key = trim(s.substr(0, eq)), value = trim(s.substr(eq + 1));
        if (value.empty()) bad(line, "empty value for " + key);
        try {
            std::size_t used = 0;
            if (key == "cache_dir") {
                cfg.cache_dir = value;
                used = value.size();
            } else if (key == "workers") {
                const long w = std::stol(value, &used);
                if (w < 1) bad(line, "workers must be >= 1");
                cfg.workers = unsigned(w);
            } else if (key == "default_tolerance_scale") {
                cfg.default_tolerance_scale = std::stod(value, &used);
                if (!(cfg.default_tolerance_scale > 0)) bad(line, "default_tolerance_scale must be positive");
            } else if (key == "seed") {
                cfg.seed = std::stoull(value, &used);
            } else {
                bad(line, "unknown key '" + key + "'");
            }
            if (used != value.size()) bad(line, "trailing characters in value of " + key);
        } catch (const std::logic_error&) {
            bad(line, "bad value for " + key);
        }
    }
    return cfg;
}

CliConfig load_config_file(const std::string& path, CliConfig base) {
    if (!fs::exists(path)) throw Error(ErrorKind::ParseError, "config file not found: " + path);
    return parse_config(read_file(path), std::move(base));
}

void apply_environment(CliConfig& cfg) {
    if (const char* c = std::getenv("DELTASUM_CACHE"); c && *c) cfg.cache_dir = c;
}

std::uint64_t fnv1a(const std::string& data) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : data) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    return h;
}

std::string cache_key(const std::string& command, const std::map<std::string, std::string>& flags) {
    std::string canon = command;
    for (const auto& [k, v] : flags) canon += "\n" + k + "=" + v;
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canon)));
    return buf;
}

std::optional<std::string> Cache::lookup(const std::string& key) const {
    const fs::path p = fs::path(dir_) / "results" / (key + ".out");
    if (!fs::exists(p)) return std::nullopt;
    return read_file(p);
}

void Cache::store(const std::string& key, const std::string& output) const {
    const fs::path d = fs::path(dir_) / "results";
    fs::create_directories(d);
    write_atomically(d / (key + ".out"), output);
}

void Cache::append_ledger(const std::string& header, const std::string& row) const {
    fs::create_directories(dir_);
    const fs::path ledger = fs::path(dir_) / "ledger.csv";
    const std::string lock_path = (fs::path(dir_) / "ledger.lock").string();
    const int fd = ::open(lock_path.c_str(), O_CREAT | O_RDWR, 0644);
    if (fd < 0) throw Error(ErrorKind::OutOfRange, "cannot open " + lock_path);
    ::flock(fd, LOCK_EX);
    try {
        std::string content = fs::exists(ledger) ? read_file(ledger) : header + "\n";
        if (!content.empty() && content.back() != '\n') content += '\n';
        write_atomically(ledger, content + row + "\n");
    } catch (...) {
        ::flock(fd, LOCK_UN);
        ::close(fd);
        throw;
    }
    ::flock(fd, LOCK_UN);
    ::close(fd);
}

}  // namespace deltasum::cli
