#pragma once

#include <map>
#include <string>
#include <vector>

namespace qsdr {

// Flat key-value configuration document: one `key = value` pair per line,
// dotted namespaces, '#' comments. CLI flags override file values.
class ConfigMap {
public:
    ConfigMap() = default;

    static ConfigMap from_file(const std::string& path);
    static ConfigMap from_string(const std::string& text);

    bool has(const std::string& key) const;
    void set(const std::string& key, const std::string& value);

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    // comma-separated doubles
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;
    std::vector<int> get_ints(const std::string& key, const std::vector<int>& fallback) const;

    const std::map<std::string, std::string>& entries() const { return entries_; }

private:
    std::map<std::string, std::string> entries_;
};

}  // namespace qsdr
