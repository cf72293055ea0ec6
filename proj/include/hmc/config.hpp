#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

namespace hmc {

// Bad key, bad value, or unparseable config input.  Mapped to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Flat key=value configuration with defaults recorded at the point of use.
// Every getter notes the key it consumed and the value actually resolved, so
// a run can persist its full effective configuration, and any key no getter
// ever asked for is reported as unknown instead of being silently ignored.
class RunConfig {
  public:
    RunConfig() = default;

    // Reads `key = value` lines (# starts a comment) from path when non-empty,
    // then applies "key=value" overrides in order, later entries winning.
    static RunConfig load(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides);

    bool has(const std::string& key) const { return raw_.count(key) > 0; }

    double get_double(const std::string& key, double fallback);
    long get_long(const std::string& key, long fallback);
    bool get_bool(const std::string& key, bool fallback);
    std::string get_string(const std::string& key, const std::string& fallback);
    std::vector<double> get_list(const std::string& key, const std::vector<double>& fallback);

    // The mandatory seed key; ConfigError when absent.
    std::uint64_t require_seed();

    // ConfigError naming every key present in the input that no getter read.
    void check_unknown() const;

    // Writes resolved_config.txt (sorted `key = value` lines) into dir.
    void write_resolved(const std::filesystem::path& dir) const;

  private:
    void set(const std::string& key, const std::string& value);
    const std::string* find(const std::string& key);

    std::map<std::string, std::string> raw_;
    std::map<std::string, bool> touched_;
    std::map<std::string, std::string> resolved_;
};

}  // namespace hmc
