#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>

namespace deltasum::cli {

struct CliConfig {
    std::string cache_dir;
    unsigned workers = 1;
    double default_tolerance_scale = 1.0;
    std::uint64_t seed = 1;
};

// Built-in defaults: cache under $XDG_CACHE_HOME or ~/.cache, else ./.deltasum-cache.
CliConfig default_config();

// `key = value` lines over `base`; blank lines and `#` comments ignored.
// ParseError on unknown keys or bad values.
CliConfig parse_config(const std::string& text, CliConfig base);
CliConfig load_config_file(const std::string& path, CliConfig base);

// DELTASUM_CACHE, when set and non-empty, replaces cache_dir.
void apply_environment(CliConfig& cfg);

std::uint64_t fnv1a(const std::string& data);
// Content hash of a subcommand and its normalised (sorted) flags.
std::string cache_key(const std::string& command, const std::map<std::string, std::string>& flags);

class Cache {
public:
    explicit Cache(std::string dir) : dir_(std::move(dir)) {}
    const std::string& dir() const { return dir_; }

    std::optional<std::string> lookup(const std::string& key) const;
    // Written to a temporary file in the cache directory and renamed into place.
    void store(const std::string& key, const std::string& output) const;
    // Appends one row to ledger.csv under an exclusive lock; the new ledger is
    // written beside the old one and renamed over it.
    void append_ledger(const std::string& header, const std::string& row) const;

private:
    std::string dir_;
};

}  // namespace deltasum::cli
