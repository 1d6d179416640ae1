#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "modelock/io.hpp"

namespace modelock::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(std::string_view k) {
    if (k.empty()) return false;
    return std::all_of(k.begin(), k.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    });
}

using VK = ValueKind;

const std::vector<KeySpec>& common_keys() {
    static const std::vector<KeySpec> k{
        {"command", "", VK::text, {}, true},
        {"map", "", VK::text, {}, true},
        {"threads", "1", VK::integer},
        {"seed", "1", VK::integer},
        {"title", "", VK::text},
        {"plot.axes", "0 1", VK::text},
    };
    return k;
}

const std::vector<KeySpec>& start_keys() {
    static const std::vector<KeySpec> k{
        {"x0", "random", VK::start},
        {"x0.lo", "-1 -1 -1", VK::vec3},
        {"x0.hi", "1 1 1", VK::vec3},
        {"x0.trials", "1000", VK::integer},
    };
    return k;
}

const std::vector<KeySpec>& cycle_keys() {
    static const std::vector<KeySpec> k{
        {"period", "auto", VK::period},
        {"saddle.period", "0", VK::integer},
        {"newton.tol", "1e-12", VK::number},
        {"newton.max_iter", "50", VK::integer},
    };
    return k;
}

const std::vector<KeySpec>& manifold_keys() {
    static const std::vector<KeySpec> k{
        {"attractors", "stable", VK::choice, "stable|none"},
        {"manifold.delta0", "1e-4", VK::number},
        {"manifold.h_max", "1e-3", VK::number},
        {"manifold.angle_max", "0.2", VK::number},
        {"manifold.length_max", "1000", VK::number},
        {"manifold.eps_att", "1e-6", VK::number},
        {"manifold.max_domains", "5000", VK::integer},
    };
    return k;
}

void append(std::vector<KeySpec>& to, const std::vector<KeySpec>& from) {
    to.insert(to.end(), from.begin(), from.end());
}

}  // namespace

double parse_number(std::string_view s, std::string_view what) {
    s = trim(s);
    double v = 0.0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end || std::isnan(v))
        throw ConfigError(std::string(what) + ": expected a number, got '" + std::string(s) + "'");
    return v;
}

long parse_integer(std::string_view s, std::string_view what) {
    s = trim(s);
    long v = 0;
    const auto* end = s.data() + s.size();
    auto [ptr, ec] = std::from_chars(s.data(), end, v);
    if (ec != std::errc() || ptr != end)
        throw ConfigError(std::string(what) + ": expected an integer, got '" + std::string(s) + "'");
    return v;
}

std::vector<double> parse_numbers(std::string_view s, std::string_view what) {
    std::vector<double> out;
    std::istringstream is{std::string(s)};
    std::string tok;
    while (is >> tok) out.push_back(parse_number(tok, what));
    return out;
}

Config Config::parse(std::string_view text, std::string_view origin) {
    Config cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto where = std::string(origin) + ":" + std::to_string(line_no);
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) throw ConfigError(where + ": expected 'key = value'");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where + ": invalid key '" + std::string(key) + "'");
        if (cfg.contains(key)) throw ConfigError(where + ": duplicate key '" + std::string(key) + "'");
        cfg.entries_.emplace_back(std::string(key), std::string(value));
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
}

std::optional<std::string> Config::get(std::string_view key) const {
    for (const auto& [k, v] : entries_)
        if (k == key) return v;
    return std::nullopt;
}

void Config::set(std::string_view key, std::string value) {
    for (auto& [k, v] : entries_)
        if (k == key) {
            v = std::move(value);
            return;
        }
    entries_.emplace_back(std::string(key), std::move(value));
}

std::vector<std::string_view> command_names() {
    return {"orbit", "lyapunov", "scan", "find-cycle", "classify", "continue", "manifold", "census"};
}

std::vector<KeySpec> command_keys(std::string_view command) {
    std::vector<KeySpec> k = common_keys();
    if (command == "orbit") {
        append(k, start_keys());
        append(k, {{"transient", "10000", VK::integer}, {"keep", "1000", VK::integer}});
    } else if (command == "lyapunov") {
        append(k, start_keys());
        append(k, {{"transient", "10000", VK::integer},
                   {"steps", "1000000", VK::integer},
                   {"sweep.param", "", VK::text},
                   {"sweep.from", "0", VK::number},
                   {"sweep.to", "0", VK::number},
                   {"sweep.count", "0", VK::integer}});
    } else if (command == "scan") {
        append(k, start_keys());
        append(k, {{"transient", "10000", VK::integer},
                   {"keep", "1000", VK::integer},
                   {"scan.param", "", VK::text, {}, true},
                   {"scan.from", "", VK::number, {}, true},
                   {"scan.to", "", VK::number, {}, true},
                   {"scan.count", "", VK::integer, {}, true},
                   {"scan.policy", "fixed", VK::choice, "fixed|follow"}});
    } else if (command == "find-cycle" || command == "classify") {
        append(k, start_keys());
        append(k, {{"transient", "20000", VK::integer}});
        append(k, cycle_keys());
        if (command == "find-cycle") append(k, {{"saddle", "no", VK::flag}});
    } else if (command == "continue") {
        append(k, start_keys());
        append(k, {{"transient", "20000", VK::integer}});
        append(k, cycle_keys());
        append(k, {{"cycle", "stable", VK::choice, "stable|saddle|both"},
                   {"cont.param", "", VK::text, {}, true},
                   {"cont.to", "", VK::number, {}, true},
                   {"cont.step", "", VK::number, {}, true},
                   {"cont.loc_tol", "1e-5", VK::number},
                   {"cont.max_halvings", "10", VK::integer}});
    } else if (command == "manifold") {
        append(k, start_keys());
        append(k, {{"transient", "20000", VK::integer}});
        append(k, cycle_keys());
        append(k, manifold_keys());
    } else if (command == "census") {
        append(k, start_keys());
        append(k, {{"transient", "20000", VK::integer},
                   {"keep", "60000", VK::integer},
                   {"census.n", "", VK::integer, {}, true},
                   {"census.sample", "orbit", VK::choice, "orbit|manifold"},
                   {"census.spacing", "1e-5", VK::number},
                   {"census.point_tol", "1e-6", VK::number},
                   {"census.curve_threshold", "0.7", VK::number},
                   {"lyapunov.steps", "200000", VK::integer}});
        append(k, cycle_keys());
        append(k, manifold_keys());
    } else {
        throw ConfigError("unknown command '" + std::string(command) + "'");
    }
    return k;
}

std::vector<std::string_view> check_keys(std::string_view command) {
    if (command == "lyapunov") return {"check.lambda", "check.lambda.*"};
    if (command == "scan") return {"check.distinct.*", "check.distinct_tol"};
    if (command == "find-cycle")
        return {"check.period", "check.saddle.period", "check.multipliers", "check.saddle.multipliers",
                "check.tol"};
    if (command == "classify")
        return {"check.period",   "check.saddle.period", "check.multipliers", "check.saddle.multipliers",
                "check.tol",      "check.prediction",    "check.stable.type", "check.saddle.type"};
    if (command == "continue") return {"check.stable.*", "check.saddle.*", "check.tol"};
    if (command == "manifold") return {"check.topology", "check.period", "check.saddle.period"};
    if (command == "census") return {"check.verdict", "check.toggle"};
    return {};
}

namespace {

bool matches(std::string_view pattern, std::string_view key) {
    if (!pattern.empty() && pattern.back() == '*') {
        const auto stem = pattern.substr(0, pattern.size() - 1);
        return key.size() > stem.size() && key.substr(0, stem.size()) == stem;
    }
    return pattern == key;
}

void check_value(const KeySpec& spec, const std::string& value) {
    const std::string what(spec.key);
    switch (spec.kind) {
        case VK::text: break;
        case VK::number: (void)parse_number(value, what); break;
        case VK::integer: (void)parse_integer(value, what); break;
        case VK::vec3:
            if (parse_numbers(value, what).size() != 3) throw ConfigError(what + ": expected three numbers");
            break;
        case VK::start:
            if (value != "random" && parse_numbers(value, what).size() != 3)
                throw ConfigError(what + ": expected three numbers or 'random'");
            break;
        case VK::period:
            if (value != "auto" && parse_integer(value, what) < 1)
                throw ConfigError(what + ": expected a positive integer or 'auto'");
            break;
        case VK::flag:
            if (value != "yes" && value != "no") throw ConfigError(what + ": expected yes or no");
            break;
        case VK::choice: {
            std::string_view rest = spec.choices;
            while (true) {
                const auto bar = rest.find('|');
                if (rest.substr(0, bar) == value) return;
                if (bar == std::string_view::npos) break;
                rest = rest.substr(bar + 1);
            }
            throw ConfigError(what + ": expected one of " + std::string(spec.choices) + ", got '" + value + "'");
        }
    }
}

}  // namespace

Settings::Settings(Config cfg) : cfg_(std::move(cfg)) {
    const auto cmd = cfg_.get("command");
    if (!cmd) throw ConfigError("missing key 'command'");
    command_ = *cmd;
    keys_ = command_keys(command_);
    const auto map_id = cfg_.get("map");
    if (!map_id) throw ConfigError("missing key 'map'");
    try {
        map_ = &find_map(*map_id);
    } catch (const SchemaError& e) {
        throw ConfigError(e.what());
    }

    const auto checks = check_keys(command_);
    ParamSet overrides;
    for (const auto& [key, value] : cfg_.entries()) {
        if (key.rfind("param.", 0) == 0) {
            const auto name = key.substr(6);
            if (!map_->index_of(name))
                throw ConfigError("unknown parameter '" + name + "' for map " + map_->id);
            const double v = parse_number(value, key);
            if (!std::isfinite(v)) throw ConfigError(key + ": value must be finite");
            overrides.add(name, v);
        } else if (key.rfind("check.", 0) == 0) {
            if (std::none_of(checks.begin(), checks.end(), [&](auto p) { return matches(p, key); }))
                throw ConfigError("unknown check '" + key + "' for command " + command_);
        } else {
            auto it = std::find_if(keys_.begin(), keys_.end(), [&](const KeySpec& s) { return s.key == key; });
            if (it == keys_.end()) throw ConfigError("unknown key '" + key + "' for command " + command_);
            check_value(*it, value);
        }
    }
    for (const auto& s : keys_)
        if (s.required && !cfg_.contains(s.key)) throw ConfigError("missing key '" + std::string(s.key) + "'");
    try {
        params_ = map_->complete(overrides);
    } catch (const SchemaError& e) {
        throw ConfigError(e.what());
    }
}

BoundMap Settings::map() const { return BoundMap(*map_, params_); }

std::string_view Settings::fallback(std::string_view key) const {
    for (const auto& s : keys_)
        if (s.key == key) return s.fallback;
    throw std::logic_error("key '" + std::string(key) + "' is not declared for " + command_);
}

std::string Settings::text(std::string_view key) const {
    const auto fb = fallback(key);
    if (auto v = cfg_.get(key)) return *v;
    return std::string(fb);
}

double Settings::number(std::string_view key) const { return parse_number(text(key), key); }

long Settings::integer(std::string_view key) const { return parse_integer(text(key), key); }

State3 Settings::vec3(std::string_view key) const {
    const auto v = parse_numbers(text(key), key);
    if (v.size() != 3) throw ConfigError(std::string(key) + ": expected three numbers");
    return {v[0], v[1], v[2]};
}

bool Settings::flag(std::string_view key) const { return text(key) == "yes"; }

std::vector<std::pair<std::string, std::string>> Settings::checks() const {
    std::vector<std::pair<std::string, std::string>> out;
    for (const auto& e : cfg_.entries())
        if (e.first.rfind("check.", 0) == 0) out.push_back(e);
    return out;
}

std::string Settings::resolved_text() const {
    std::ostringstream os;
    for (const auto& s : keys_) os << s.key << " = " << text(s.key) << '\n';
    for (const auto& [name, value] : params_.entries()) os << "param." << name << " = " << format_double(value) << '\n';
    for (const auto& [k, v] : checks()) os << k << " = " << v << '\n';
    return os.str();
}

}  // namespace modelock::cli
