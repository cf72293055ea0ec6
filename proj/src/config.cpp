#include "hmc/config.hpp"

#include <cctype>
#include <charconv>
#include <fstream>
#include <sstream>

#include "hmc/csv.hpp"

namespace hmc {

namespace {

std::string trim(const std::string& s) {
    size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

bool valid_key(const std::string& key) {
    if (key.empty()) return false;
    for (char c : key)
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_') return false;
    return true;
}

double parse_double(const std::string& key, const std::string& text) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as a number");
    return v;
}

long parse_long(const std::string& key, const std::string& text) {
    long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size())
        throw ConfigError("key '" + key + "': cannot parse '" + text + "' as an integer");
    return v;
}

std::string join(const std::vector<double>& values) {
    std::string out;
    for (size_t i = 0; i < values.size(); ++i) {
        if (i > 0) out += ',';
        out += format_double(values[i]);
    }
    return out;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path,
                          const std::vector<std::string>& overrides) {
    RunConfig cfg;
    if (!path.empty()) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot read config file " + path.string());
        std::string line;
        long line_no = 0;
        while (std::getline(in, line)) {
            ++line_no;
            if (size_t hash = line.find('#'); hash != std::string::npos) line.resize(hash);
            line = trim(line);
            if (line.empty()) continue;
            size_t eq = line.find('=');
            if (eq == std::string::npos)
                throw ConfigError(path.string() + ":" + std::to_string(line_no) +
                                  ": expected key = value");
            cfg.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    for (const std::string& entry : overrides) {
        size_t eq = entry.find('=');
        if (eq == std::string::npos)
            throw ConfigError("override '" + entry + "' is not of the form key=value");
        cfg.set(trim(entry.substr(0, eq)), trim(entry.substr(eq + 1)));
    }
    return cfg;
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!valid_key(key)) throw ConfigError("invalid key name '" + key + "'");
    raw_[key] = value;
    touched_[key] = false;
}

const std::string* RunConfig::find(const std::string& key) {
    auto it = raw_.find(key);
    if (it == raw_.end()) return nullptr;
    touched_[key] = true;
    return &it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) {
    const std::string* text = find(key);
    double v = text ? parse_double(key, *text) : fallback;
    resolved_[key] = format_double(v);
    return v;
}

long RunConfig::get_long(const std::string& key, long fallback) {
    const std::string* text = find(key);
    long v = text ? parse_long(key, *text) : fallback;
    resolved_[key] = std::to_string(v);
    return v;
}

bool RunConfig::get_bool(const std::string& key, bool fallback) {
    const std::string* text = find(key);
    bool v = fallback;
    if (text) {
        if (*text == "true" || *text == "1")
            v = true;
        else if (*text == "false" || *text == "0")
            v = false;
        else
            throw ConfigError("key '" + key + "': expected true/false, got '" + *text + "'");
    }
    resolved_[key] = v ? "true" : "false";
    return v;
}

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) {
    const std::string* text = find(key);
    std::string v = text ? *text : fallback;
    resolved_[key] = v;
    return v;
}

std::vector<double> RunConfig::get_list(const std::string& key,
                                        const std::vector<double>& fallback) {
    const std::string* text = find(key);
    std::vector<double> v;
    if (text) {
        std::stringstream ss(*text);
        std::string item;
        while (std::getline(ss, item, ',')) v.push_back(parse_double(key, trim(item)));
        if (v.empty()) throw ConfigError("key '" + key + "': empty list");
    } else {
        v = fallback;
    }
    resolved_[key] = join(v);
    return v;
}

std::uint64_t RunConfig::require_seed() {
    const std::string* text = find("seed");
    if (!text) throw ConfigError("missing required key 'seed' (config file or --seed)");
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(text->data(), text->data() + text->size(), v);
    if (ec != std::errc() || ptr != text->data() + text->size())
        throw ConfigError("key 'seed': cannot parse '" + *text + "' as an unsigned integer");
    resolved_["seed"] = std::to_string(v);
    return v;
}

void RunConfig::check_unknown() const {
    std::string unknown;
    for (const auto& [key, used] : touched_)
        if (!used) unknown += unknown.empty() ? key : ", " + key;
    if (!unknown.empty())
        throw ConfigError("unknown config key(s) for this subcommand: " + unknown);
}

void RunConfig::write_resolved(const std::filesystem::path& dir) const {
    std::ofstream out(dir / "resolved_config.txt", std::ios::binary);
    if (!out) throw ConfigError("cannot write resolved config in " + dir.string());
    for (const auto& [key, value] : resolved_) out << key << " = " << value << '\n';
}

}  // namespace hmc
