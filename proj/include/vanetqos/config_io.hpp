#pragma once

// Flat `key = value` configuration files. Every key is optional; missing keys
// keep their defaults. Lines starting with '#' and blank lines are ignored.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <string_view>

#include "vanetqos/domain.hpp"

namespace vanetqos {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

inline std::string format_list(const std::vector<double>& vs) {
    std::string out;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        if (i) out += ",";
        out += format_double(vs[i]);
    }
    return out;
}

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
}

inline std::optional<double> parse_double(std::string_view s) {
    std::string buf(trim(s));
    if (buf.empty()) return std::nullopt;
    char* end = nullptr;
    double v = std::strtod(buf.c_str(), &end);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    return v;
}

inline std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::string buf(trim(s));
    if (buf.empty() || buf.front() == '-') return std::nullopt;
    char* end = nullptr;
    unsigned long long v = std::strtoull(buf.c_str(), &end, 10);
    if (end != buf.c_str() + buf.size()) return std::nullopt;
    return v;
}

inline std::optional<std::vector<double>> parse_list(std::string_view s) {
    std::vector<double> out;
    s = trim(s);
    if (s.empty()) return out;
    while (true) {
        auto comma = s.find(',');
        auto v = parse_double(s.substr(0, comma));
        if (!v) return std::nullopt;
        out.push_back(*v);
        if (comma == std::string_view::npos) break;
        s.remove_prefix(comma + 1);
    }
    return out;
}

struct KeyBinding {
    std::function<std::string(const SimConfig&)> get;
    std::function<bool(SimConfig&, std::string_view)> set;
};

inline KeyBinding bind_double(double SimConfig::*field) {
    return {[field](const SimConfig& c) { return format_double(c.*field); },
            [field](SimConfig& c, std::string_view v) {
                auto d = parse_double(v);
                if (d) c.*field = *d;
                return d.has_value();
            }};
}

template <class Accessor>
KeyBinding bind_double_at(Accessor acc) {
    return {[acc](const SimConfig& c) { return format_double(acc(c)); },
            [acc](SimConfig& c, std::string_view v) {
                auto d = parse_double(v);
                if (d) acc(c) = *d;
                return d.has_value();
            }};
}

template <class Accessor>
KeyBinding bind_count_at(Accessor acc) {
    return {[acc](const SimConfig& c) { return std::to_string(acc(c)); },
            [acc](SimConfig& c, std::string_view v) {
                auto d = parse_u64(v);
                if (d) acc(c) = static_cast<std::remove_cvref_t<decltype(acc(c))>>(*d);
                return d.has_value();
            }};
}

template <class Accessor>
KeyBinding bind_list_at(Accessor acc) {
    return {[acc](const SimConfig& c) { return format_list(acc(c)); },
            [acc](SimConfig& c, std::string_view v) {
                auto d = parse_list(v);
                if (d) acc(c) = *d;
                return d.has_value();
            }};
}

// Ordered so that serialization output is stable.
inline const std::vector<std::pair<std::string, KeyBinding>>& key_table() {
    static const auto table = [] {
        std::vector<std::pair<std::string, KeyBinding>> t;
        t.emplace_back("sim.tick", bind_double(&SimConfig::tick_s));
        t.emplace_back("sim.episode_duration", bind_double(&SimConfig::episode_duration_s));
        t.emplace_back("sim.episodes", bind_count_at([](auto& c) -> auto& { return c.episodes; }));
        t.emplace_back("sim.entry_interval", bind_double(&SimConfig::entry_interval_s));
        t.emplace_back("sim.coverage_radius", bind_double(&SimConfig::coverage_radius_m));
        t.emplace_back("sim.max_speed", bind_double(&SimConfig::max_speed_mps));
        t.emplace_back("sim.accel", bind_double(&SimConfig::accel_mps2));
        t.emplace_back("sim.decel", bind_double(&SimConfig::decel_mps2));
        t.emplace_back("sim.rsu_positions",
                       bind_list_at([](auto& c) -> auto& { return c.rsu_positions_m; }));
        t.emplace_back("sim.corridor_length", bind_double(&SimConfig::corridor_length_m));
        t.emplace_back("sim.t_active_max", bind_double(&SimConfig::t_active_max_s));
        t.emplace_back("sim.seed", bind_count_at([](auto& c) -> auto& { return c.seed; }));

        t.emplace_back("channel.phy_rate",
                       bind_double_at([](auto& c) -> auto& { return c.channel.phy_rate_bps; }));
        t.emplace_back("channel.contention_coeff",
                       bind_double_at([](auto& c) -> auto& { return c.channel.contention_coeff; }));

        t.emplace_back("reward.alpha1", bind_double_at([](auto& c) -> auto& { return c.reward.alpha1; }));
        t.emplace_back("reward.alpha2", bind_double_at([](auto& c) -> auto& { return c.reward.alpha2; }));
        t.emplace_back("reward.penalty", bind_double_at([](auto& c) -> auto& { return c.reward.penalty; }));
        t.emplace_back("reward.bonus", bind_double_at([](auto& c) -> auto& { return c.reward.bonus; }));

        t.emplace_back("rl.epsilon", bind_double_at([](auto& c) -> auto& { return c.rl.epsilon; }));
        t.emplace_back("rl.gamma", bind_double_at([](auto& c) -> auto& { return c.rl.gamma; }));
        t.emplace_back("rl.alpha", bind_double_at([](auto& c) -> auto& { return c.rl.alpha; }));
        t.emplace_back("rl.action_count",
                       bind_count_at([](auto& c) -> auto& { return c.rl.action_count; }));
        t.emplace_back("rl.hidden_neurons",
                       bind_count_at([](auto& c) -> auto& { return c.rl.hidden_neurons; }));
        t.emplace_back("rl.buffer_capacity",
                       bind_count_at([](auto& c) -> auto& { return c.rl.buffer_capacity; }));
        t.emplace_back("rl.batch_size", bind_count_at([](auto& c) -> auto& { return c.rl.batch_size; }));
        t.emplace_back("rl.target_sync_period",
                       bind_count_at([](auto& c) -> auto& { return c.rl.target_sync_period; }));
        t.emplace_back("rl.tv_bucket_edges",
                       bind_list_at([](auto& c) -> auto& { return c.rl.tv_bucket_edges; }));
        t.emplace_back("rl.tcv_bucket_edges",
                       bind_list_at([](auto& c) -> auto& { return c.rl.tcv_bucket_edges; }));

        for (std::size_t i = 0; i < kCategoryCount; ++i) {
            std::string prefix = "category.";
            for (char ch : to_string(kAllCategories[i]))
                prefix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
            prefix += ".";
            auto field = [i](double CategoryProfile::*m) {
                return bind_double_at([i, m](auto& c) -> auto& { return c.profiles[i].*m; });
            };
            t.emplace_back(prefix + "app_rate", field(&CategoryProfile::app_rate_bps));
            t.emplace_back(prefix + "packet_size", field(&CategoryProfile::packet_size_bytes));
            t.emplace_back(prefix + "send_interval", field(&CategoryProfile::send_interval_s));
            t.emplace_back(prefix + "r_threshold", field(&CategoryProfile::r_threshold_bps));
            t.emplace_back(prefix + "l_threshold", field(&CategoryProfile::l_threshold_s));
            t.emplace_back(prefix + "w_max", field(&CategoryProfile::w_max_s));
            t.emplace_back(prefix + "priority_weight", field(&CategoryProfile::priority_weight));
        }
        return t;
    }();
    return table;
}

}  // namespace detail

/// Canonical text form: `sim.profile_set` first, then every other key in a
/// fixed order. serialize(parse(serialize(c))) == serialize(c).
inline std::string serialize_config(const SimConfig& cfg) {
    std::string out = "sim.profile_set = " + std::string(to_string(cfg.profile_set)) + "\n";
    for (const auto& [key, binding] : detail::key_table()) out += key + " = " + binding.get(cfg) + "\n";
    return out;
}

/// Parses config text on top of the defaults. `sim.profile_set` is applied
/// before any `category.*` override regardless of its position in the file.
/// Unknown keys and malformed values raise ConfigError. No invariant checks
/// happen here; call validate_config on the result.
inline SimConfig parse_config(std::string_view text) {
    std::vector<ConfigViolation> errors;
    std::vector<std::pair<std::string, std::string>> entries;
    std::istringstream in{std::string(text)};
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto s = detail::trim(line);
        if (s.empty() || s.front() == '#') continue;
        auto eq = s.find('=');
        if (eq == std::string_view::npos) {
            errors.push_back({"line " + std::to_string(lineno), "expected key = value"});
            continue;
        }
        entries.emplace_back(std::string(detail::trim(s.substr(0, eq))), std::string(detail::trim(s.substr(eq + 1))));
    }

    SimConfig cfg;
    for (const auto& [key, value] : entries) {
        if (key != "sim.profile_set") continue;
        if (auto ps = parse_profile_set(value)) {
            cfg.profile_set = *ps;
            cfg.profiles = default_profiles(*ps);
        } else {
            errors.push_back({key, "unknown profile set '" + value + "' (per-category-sizes|uniform-900b)"});
        }
    }

    std::map<std::string, const detail::KeyBinding*> index;
    for (const auto& [key, binding] : detail::key_table()) index.emplace(key, &binding);
    for (const auto& [key, value] : entries) {
        if (key == "sim.profile_set") continue;
        auto it = index.find(key);
        if (it == index.end()) {
            errors.push_back({key, "unknown key"});
        } else if (!it->second->set(cfg, value)) {
            errors.push_back({key, "malformed value '" + value + "'"});
        }
    }
    if (!errors.empty()) throw ConfigError(std::move(errors));
    return cfg;
}

/// Loads a config file; the literal name "default" yields the built-in defaults.
inline SimConfig load_config_file(const std::string& path) {
    if (path == "default") return SimConfig{};
    std::ifstream f(path);
    if (!f) throw ConfigError({{"--config", "cannot open '" + path + "'"}});
    std::stringstream buf;
    buf << f.rdbuf();
    return parse_config(buf.str());
}

/// 64-bit FNV-1a over the canonical serialization.
inline std::uint64_t config_hash(const SimConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char ch : serialize_config(cfg)) {
        h ^= ch;
        h *= 0x100000001b3ULL;
    }
    return h;
}

}  // namespace vanetqos
