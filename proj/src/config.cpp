#include "varimotion/config.hpp"

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <stdexcept>

extern "C" char** environ;

namespace vmo {

namespace {

std::string trim(const std::string& s) {
    size_t begin = 0, end = s.size();
    while (begin < end && std::isspace(static_cast<unsigned char>(s[begin]))) ++begin;
    while (end > begin && std::isspace(static_cast<unsigned char>(s[end - 1]))) --end;
    return s.substr(begin, end - begin);
}

void validate_key(const std::string& key) {
    const size_t dot = key.find('.');
    if (dot == std::string::npos || dot == 0 || dot + 1 == key.size() ||
        key.find('.', dot + 1) != std::string::npos) {
        throw std::runtime_error("config key '" + key + "' must be section.key");
    }
    for (char c : key) {
        if (!std::isalnum(static_cast<unsigned char>(c)) && c != '_' && c != '.') {
            throw std::runtime_error("config key '" + key + "' has invalid characters");
        }
    }
}

} // namespace

RunConfig RunConfig::parse(const std::string& text) {
    RunConfig config;
    std::istringstream in(text);
    std::string line, section;
    int line_number = 0;
    while (std::getline(in, line)) {
        ++line_number;
        const std::string stripped = trim(line);
        if (stripped.empty() || stripped[0] == '#' || stripped[0] == ';') continue;
        if (stripped.front() == '[') {
            if (stripped.back() != ']' || stripped.size() < 3) {
                throw std::runtime_error("config line " + std::to_string(line_number) +
                                         ": malformed section header");
            }
            section = trim(stripped.substr(1, stripped.size() - 2));
            continue;
        }
        const size_t eq = stripped.find('=');
        if (eq == std::string::npos) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": expected key = value");
        }
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (section.empty()) {
            throw std::runtime_error("config line " + std::to_string(line_number) +
                                     ": key outside any [section]");
        }
        config.set(section + "." + key, value);
    }
    return config;
}

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse(buffer.str());
}

void RunConfig::apply_environment() {
    for (char** env = environ; env && *env; ++env) {
        const std::string entry(*env);
        if (entry.rfind("VMO_", 0) != 0) continue;
        const size_t eq = entry.find('=');
        if (eq == std::string::npos) continue;
        std::string name = entry.substr(4, eq - 4);
        const size_t underscore = name.find('_');
        if (underscore == std::string::npos) continue;
        std::string key = name;
        key[underscore] = '.';
        for (char& c : key) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        set(key, entry.substr(eq + 1));
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    validate_key(key);
    values_[key] = value;
}

bool RunConfig::has(const std::string& key) const { return values_.count(key) > 0; }

std::string RunConfig::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    size_t used = 0;
    double value = 0.0;
    try {
        value = std::stod(it->second, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != it->second.size()) {
        throw std::runtime_error("config key '" + key + "' is not a number: " + it->second);
    }
    return value;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    size_t used = 0;
    int value = 0;
    try {
        value = std::stoi(it->second, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != it->second.size()) {
        throw std::runtime_error("config key '" + key + "' is not an integer: " + it->second);
    }
    return value;
}

std::uint64_t RunConfig::get_u64(const std::string& key, std::uint64_t fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    size_t used = 0;
    std::uint64_t value = 0;
    try {
        value = std::stoull(it->second, &used);
    } catch (const std::exception&) {
        used = std::string::npos;
    }
    if (used != it->second.size()) {
        throw std::runtime_error("config key '" + key + "' is not an integer: " + it->second);
    }
    return value;
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    std::string section;
    for (const auto& [key, value] : values_) {
        const size_t dot = key.find('.');
        const std::string current = key.substr(0, dot);
        if (current != section) {
            if (!section.empty()) out << "\n";
            out << "[" << current << "]\n";
            section = current;
        }
        out << key.substr(dot + 1) << " = " << value << "\n";
    }
    return out.str();
}

} // namespace vmo
