#pragma once

#include <cstdint>
#include <map>
#include <string>

namespace vmo {

// Flat key-value configuration with INI-style sections; keys are addressed
// as "section.key". Precedence: file < environment (VMO_SECTION_KEY) < CLI
// flags, applied in that order by the caller.
class RunConfig {
public:
    static RunConfig parse(const std::string& text);
    static RunConfig from_file(const std::string& path);

    // Copies every VMO_<SECTION>_<KEY> environment variable over the file
    // values (section/key lowercased).
    void apply_environment();

    void set(const std::string& key, const std::string& value);
    bool has(const std::string& key) const;

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;

    // Sections sorted, keys sorted inside each; parse(serialize(c)) == c.
    std::string serialize() const;

    const std::map<std::string, std::string>& values() const { return values_; }
    bool operator==(const RunConfig& other) const { return values_ == other.values_; }

private:
    std::map<std::string, std::string> values_;
};

} // namespace vmo
