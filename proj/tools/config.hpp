#pragma once

// Experiment configuration: a flat "key = value" text format.
//
//   # comment
//   command = find-cycle
//   map = mira
//   param.B = -0.58
//   x0 = 0.3 -0.7 0.2
//
// Keys are validated per command before anything is computed; unknown keys
// are rejected.

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "modelock/maps.hpp"

namespace modelock::cli {

/// Malformed or invalid configuration (exit code 2).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raw key/value pairs in file order.
class Config {
public:
    /// Parses the key-value grammar. `origin` prefixes error messages.
    static Config parse(std::string_view text, std::string_view origin = "config");
    static Config load(const std::string& path);

    std::optional<std::string> get(std::string_view key) const;
    void set(std::string_view key, std::string value);
    bool contains(std::string_view key) const { return get(key).has_value(); }

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

private:
    std::vector<std::pair<std::string, std::string>> entries_;
};

enum class ValueKind {
    text,
    number,
    integer,
    vec3,
    start,   ///< "x y z" or "random"
    period,  ///< positive integer or "auto"
    flag,    ///< yes / no
    choice,  ///< one of KeySpec::choices ('|'-separated)
};

struct KeySpec {
    std::string_view key;
    std::string_view fallback;  ///< default value
    ValueKind kind = ValueKind::text;
    std::string_view choices = {};
    bool required = false;
};

/// Commands understood by `run`.
std::vector<std::string_view> command_names();

/// Keys accepted by `command` (excluding param.* and check.*).
std::vector<KeySpec> command_keys(std::string_view command);

/// check.* keys accepted by `command`; a trailing '*' matches any suffix.
std::vector<std::string_view> check_keys(std::string_view command);

/// A validated configuration with typed accessors. Every accessor reads
/// the configured value or the documented default.
class Settings {
public:
    explicit Settings(Config cfg);

    const std::string& command() const { return command_; }
    const MapDef& map_def() const { return *map_; }
    BoundMap map() const;

    std::string text(std::string_view key) const;
    double number(std::string_view key) const;
    long integer(std::string_view key) const;
    State3 vec3(std::string_view key) const;
    bool flag(std::string_view key) const;

    /// check.* entries in file order.
    std::vector<std::pair<std::string, std::string>> checks() const;

    /// Every accepted key with its resolved value: command keys, all map
    /// parameters and the checks. Parsing the result reproduces the run.
    std::string resolved_text() const;

    const Config& raw() const { return cfg_; }

private:
    std::string_view fallback(std::string_view key) const;

    Config cfg_;
    std::string command_;
    const MapDef* map_ = nullptr;
    std::vector<KeySpec> keys_;
    ParamSet params_;
};

double parse_number(std::string_view s, std::string_view what);
long parse_integer(std::string_view s, std::string_view what);
std::vector<double> parse_numbers(std::string_view s, std::string_view what);

}  // namespace modelock::cli
