#pragma once

// Shared domain types: service categories, per-category profiles and the full
// simulation/learning configuration.

#include <array>
#include <cctype>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vanetqos {

enum class ServiceCategory : std::uint8_t { VO = 0, VI = 1, HDMAP = 2, BE = 3 };

inline constexpr std::size_t kCategoryCount = 4;
inline constexpr std::array<ServiceCategory, kCategoryCount> kAllCategories{
    ServiceCategory::VO, ServiceCategory::VI, ServiceCategory::HDMAP, ServiceCategory::BE};

constexpr std::size_t index_of(ServiceCategory c) noexcept { return static_cast<std::size_t>(c); }

constexpr std::string_view to_string(ServiceCategory c) noexcept {
    switch (c) {
        case ServiceCategory::VO: return "VO";
        case ServiceCategory::VI: return "VI";
        case ServiceCategory::HDMAP: return "HDMAP";
        case ServiceCategory::BE: return "BE";
    }
    return "?";
}

inline std::optional<ServiceCategory> parse_category(std::string_view name) {
    std::string lower;
    for (char ch : name) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    if (lower == "vo") return ServiceCategory::VO;
    if (lower == "vi") return ServiceCategory::VI;
    if (lower == "hdmap") return ServiceCategory::HDMAP;
    if (lower == "be") return ServiceCategory::BE;
    return std::nullopt;
}

/// Traffic profile and QoS thresholds of one service category.
///
/// The single rate threshold serves both as the normalizer of the throughput
/// term in the utility and as the minimum-rate constraint.
struct CategoryProfile {
    ServiceCategory category = ServiceCategory::VO;
    double app_rate_bps = 0.0;       // generation rate
    double packet_size_bytes = 0.0;
    double send_interval_s = 0.0;
    double r_threshold_bps = 0.0;
    double l_threshold_s = 0.0;
    double w_max_s = 0.0;            // largest waiting time an action may assign
    double priority_weight = 1.0;    // share weight in the static-priority channel mode
};

using ProfileTable = std::array<CategoryProfile, kCategoryCount>;

enum class ProfileSet { PerCategorySizes, Uniform900B };

constexpr std::string_view to_string(ProfileSet p) noexcept {
    return p == ProfileSet::PerCategorySizes ? "per-category-sizes" : "uniform-900b";
}

inline std::optional<ProfileSet> parse_profile_set(std::string_view s) {
    if (s == "per-category-sizes") return ProfileSet::PerCategorySizes;
    if (s == "uniform-900b") return ProfileSet::Uniform900B;
    return std::nullopt;
}

/// Default category profiles. Thresholds and maximum waits are the published
/// per-category values; packet schedules follow the per-category packet sizes
/// (125/600/600/900 B) unless the uniform 900 B variant is requested, in which
/// case send intervals are stretched to keep the application rates.
inline ProfileTable default_profiles(ProfileSet set = ProfileSet::PerCategorySizes) {
    ProfileTable t{{
        {ServiceCategory::VO, 100e3, 125.0, 10e-3, 100e3, 0.150, 0.92, 4.0},
        {ServiceCategory::VI, 5e6, 600.0, 1e-3, 1.25e6, 0.100, 2.0, 2.0},
        {ServiceCategory::HDMAP, 4e6, 600.0, 1.2e-3, 1.25e6, 0.100, 2.0, 2.0},
        {ServiceCategory::BE, 28e6, 900.0, 250e-6, 1.0e6, 1.000, 8.0, 1.0},
    }};
    if (set == ProfileSet::Uniform900B) {
        for (auto& p : t) {
            p.packet_size_bytes = 900.0;
            p.send_interval_s = 900.0 * 8.0 / p.app_rate_bps;
        }
    }
    return t;
}

struct ChannelParams {
    double phy_rate_bps = 6e6;
    double contention_coeff = 0.1;

    friend bool operator==(const ChannelParams&, const ChannelParams&) = default;
};

struct RewardConfig {
    double alpha1 = 0.3;
    double alpha2 = 0.7;
    double penalty = -0.5;
    double bonus = 0.5;
};

struct RlHyperparams {
    double epsilon = 0.2;   // exploration probability
    double gamma = 0.99;
    double alpha = 0.1;     // learning rate
    std::size_t action_count = 8;
    std::size_t hidden_neurons = 32;
    std::size_t buffer_capacity = 500;
    std::size_t batch_size = 32;
    std::size_t target_sync_period = 100;
    std::vector<double> tv_bucket_edges{5, 10, 20};
    std::vector<double> tcv_bucket_edges{2, 5, 10};
};

struct SimConfig {
    double tick_s = 0.1;
    double episode_duration_s = 250.0;
    std::size_t episodes = 50;
    double entry_interval_s = 0.66;
    double coverage_radius_m = 200.0;
    double max_speed_mps = 17.0;
    double accel_mps2 = 2.6;
    double decel_mps2 = 4.5;  // carried, unused by the corridor (no stop events)
    std::vector<double> rsu_positions_m{300.0};
    double corridor_length_m = 900.0;
    double t_active_max_s = 2.0;
    ProfileSet profile_set = ProfileSet::PerCategorySizes;
    ProfileTable profiles = default_profiles();
    ChannelParams channel{};
    RewardConfig reward{};
    RlHyperparams rl{};
    std::uint64_t seed = 1;

    const CategoryProfile& profile(ServiceCategory c) const { return profiles[index_of(c)]; }
};

struct ConfigViolation {
    std::string field;
    std::string message;
};

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<ConfigViolation> violations)
        : std::runtime_error(render(violations)), violations_(std::move(violations)) {}

    const std::vector<ConfigViolation>& violations() const noexcept { return violations_; }

private:
    static std::string render(const std::vector<ConfigViolation>& vs) {
        std::string out = "invalid configuration:";
        for (const auto& v : vs) out += "\n  " + v.field + ": " + v.message;
        return out;
    }

    std::vector<ConfigViolation> violations_;
};

/// Every violated invariant of `cfg`, in field order. Empty means valid.
inline std::vector<ConfigViolation> config_violations(const SimConfig& cfg) {
    std::vector<ConfigViolation> out;
    auto require = [&out](bool ok, std::string field, std::string msg) {
        if (!ok) out.push_back({std::move(field), std::move(msg)});
    };
    auto finite_pos = [](double x) { return std::isfinite(x) && x > 0.0; };

    require(finite_pos(cfg.tick_s), "tick", "must be > 0");
    require(std::isfinite(cfg.episode_duration_s) && cfg.episode_duration_s >= cfg.tick_s,
            "episode_duration", "must be >= tick");
    require(finite_pos(cfg.entry_interval_s), "entry_interval", "must be > 0");
    require(finite_pos(cfg.coverage_radius_m), "coverage_radius", "must be > 0");
    require(finite_pos(cfg.max_speed_mps), "max_speed", "must be > 0");
    require(std::isfinite(cfg.accel_mps2) && cfg.accel_mps2 >= 0.0, "accel", "must be >= 0");
    require(std::isfinite(cfg.decel_mps2) && cfg.decel_mps2 >= 0.0, "decel", "must be >= 0");
    require(finite_pos(cfg.t_active_max_s), "t_active_max", "must be > 0");
    require(finite_pos(cfg.corridor_length_m), "corridor_length", "must be > 0");

    if (cfg.rsu_positions_m.empty()) {
        out.push_back({"rsu_positions", "must not be empty"});
    } else {
        bool increasing = true;
        for (std::size_t i = 1; i < cfg.rsu_positions_m.size(); ++i)
            increasing = increasing && cfg.rsu_positions_m[i] > cfg.rsu_positions_m[i - 1];
        require(increasing, "rsu_positions", "rsu_positions not strictly increasing");
    }

    require(finite_pos(cfg.channel.phy_rate_bps), "channel.phy_rate", "must be > 0");
    require(std::isfinite(cfg.channel.contention_coeff) && cfg.channel.contention_coeff >= 0.0,
            "channel.contention_coeff", "must be >= 0");

    require(std::abs(cfg.reward.alpha1 + cfg.reward.alpha2 - 1.0) <= 1e-9, "reward.alpha1",
            "alpha1 + alpha2 must equal 1");
    require(cfg.reward.penalty <= 0.0, "reward.penalty", "must be <= 0");
    require(cfg.reward.bonus >= 0.0, "reward.bonus", "must be >= 0");

    const auto& rl = cfg.rl;
    require(rl.epsilon >= 0.0 && rl.epsilon <= 1.0, "rl.epsilon", "must lie in [0, 1]");
    require(rl.gamma >= 0.0 && rl.gamma < 1.0, "rl.gamma", "must lie in [0, 1)");
    require(finite_pos(rl.alpha), "rl.alpha", "must be > 0");
    require(rl.action_count == 8, "rl.action_count", "must be 8");
    require(rl.hidden_neurons >= 1, "rl.hidden_neurons", "must be >= 1");
    require(rl.batch_size >= 1 && rl.buffer_capacity >= rl.batch_size, "rl.buffer_capacity",
            "requires buffer_capacity >= batch_size >= 1");
    require(rl.target_sync_period >= 1, "rl.target_sync_period", "must be >= 1");
    auto sorted = [](const std::vector<double>& e) {
        for (std::size_t i = 1; i < e.size(); ++i)
            if (!(e[i] > e[i - 1])) return false;
        return true;
    };
    require(rl.tv_bucket_edges.size() == 3 && sorted(rl.tv_bucket_edges), "rl.tv_bucket_edges",
            "needs 3 strictly increasing edges");
    require(rl.tcv_bucket_edges.size() == 3 && sorted(rl.tcv_bucket_edges), "rl.tcv_bucket_edges",
            "needs 3 strictly increasing edges");

    for (std::size_t i = 0; i < kCategoryCount; ++i) {
        const auto& p = cfg.profiles[i];
        std::string prefix = "category.";
        for (char ch : to_string(kAllCategories[i]))
            prefix.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
        prefix += ".";
        require(p.category == kAllCategories[i], prefix + "category", "profile table out of order");
        require(finite_pos(p.w_max_s), prefix + "w_max", "must be > 0");
        require(finite_pos(p.r_threshold_bps), prefix + "r_threshold", "must be > 0");
        require(finite_pos(p.l_threshold_s), prefix + "l_threshold", "must be > 0");
        require(finite_pos(p.app_rate_bps), prefix + "app_rate", "must be > 0");
        require(finite_pos(p.priority_weight), prefix + "priority_weight", "must be > 0");
        if (finite_pos(p.packet_size_bytes) && finite_pos(p.send_interval_s) && finite_pos(p.app_rate_bps)) {
            const double scheduled = p.packet_size_bytes * 8.0 / p.send_interval_s;
            require(std::abs(scheduled - p.app_rate_bps) <= 0.05 * p.app_rate_bps, prefix + "app_rate",
                    "packet_size*8/send_interval must match app_rate within 5%");
        } else {
            out.push_back({prefix + "packet_size", "packet_size and send_interval must be > 0"});
        }
    }
    return out;
}

/// Returns `cfg` unchanged when every invariant holds; throws ConfigError
/// listing all violations otherwise.
inline const SimConfig& validate_config(const SimConfig& cfg) {
    auto violations = config_violations(cfg);
    if (!violations.empty()) throw ConfigError(std::move(violations));
    return cfg;
}

}  // namespace vanetqos
