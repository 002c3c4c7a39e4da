#include "qsdr/config.hpp"

#include <fstream>
#include <sstream>

#include "qsdr/errors.hpp"

namespace qsdr {

namespace {
std::string trimmed(const std::string& s) {
    std::size_t a = s.find_first_not_of(" \t\r");
    if (a == std::string::npos) return "";
    std::size_t b = s.find_last_not_of(" \t\r");
    return s.substr(a, b - a + 1);
}
}  // namespace

ConfigMap ConfigMap::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw FileNotFound(path);
    std::stringstream buffer;
    buffer << in.rdbuf();
    return from_string(buffer.str());
}

ConfigMap ConfigMap::from_string(const std::string& text) {
    ConfigMap cfg;
    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string t = trimmed(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("config line " + std::to_string(line_no) +
                              " is not `key = value`: " + t);
        }
        std::string key = trimmed(t.substr(0, eq));
        std::string value = trimmed(t.substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("config line " + std::to_string(line_no) + " has an empty key");
        }
        cfg.entries_[key] = value;
    }
    return cfg;
}

bool ConfigMap::has(const std::string& key) const { return entries_.count(key) > 0; }

void ConfigMap::set(const std::string& key, const std::string& value) {
    entries_[key] = value;
}

std::string ConfigMap::get_string(const std::string& key, const std::string& fallback) const {
    auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second;
}

double ConfigMap::get_double(const std::string& key, double fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        double v = std::stod(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not a number: " + it->second);
    }
}

int ConfigMap::get_int(const std::string& key, int fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        std::size_t pos = 0;
        int v = std::stoi(it->second, &pos);
        if (pos != it->second.size()) throw std::invalid_argument(it->second);
        return v;
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an integer: " + it->second);
    }
}

bool ConfigMap::get_bool(const std::string& key, bool fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const std::string& v = it->second;
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw ConfigError("config key " + key + " is not a boolean: " + v);
}

std::uint64_t ConfigMap::get_u64(const std::string& key, std::uint64_t fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    try {
        return std::stoull(it->second);
    } catch (const std::exception&) {
        throw ConfigError("config key " + key + " is not an unsigned integer: " + it->second);
    }
}

std::vector<double> ConfigMap::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
    auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    std::istringstream stream(it->second);
    std::string token;
    while (std::getline(stream, token, ',')) {
        token = trimmed(token);
        if (token.empty()) continue;
        try {
            out.push_back(std::stod(token));
        } catch (const std::exception&) {
            throw ConfigError("config key " + key + " has a bad entry: " + token);
        }
    }
    if (out.empty()) throw ConfigError("config key " + key + " is an empty list");
    return out;
}

std::vector<int> ConfigMap::get_ints(const std::string& key,
                                     const std::vector<int>& fallback) const {
    auto doubles = get_doubles(key, {});
    if (doubles.empty()) return fallback;
    std::vector<int> out;
    out.reserve(doubles.size());
    for (double v : doubles) out.push_back(static_cast<int>(v));
    return out;
}

}  // namespace qsdr
