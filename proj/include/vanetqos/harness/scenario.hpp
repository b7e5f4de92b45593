#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "vanetqos/agents/learners.hpp"
#include "vanetqos/domain.hpp"

namespace vanetqos {

enum class AgentMode { SingleAgent, MultiAgent, BaselineNoWait, BaselineStaticPriority, FixedWait };

constexpr bool uses_learner(AgentMode m) noexcept {
    return m == AgentMode::SingleAgent || m == AgentMode::MultiAgent;
}

/// Modes in which vehicles never wait.
constexpr bool always_active(AgentMode m) noexcept {
    return m == AgentMode::BaselineNoWait || m == AgentMode::BaselineStaticPriority;
}

struct Scenario {
    std::string name = "single-rsu";
    std::vector<double> rsu_positions_m{300.0};
    double corridor_length_m = 900.0;
    AgentMode mode = AgentMode::SingleAgent;
    LearnerKind learner = LearnerKind::TabularQ;
    ProfileSet profile_set = ProfileSet::PerCategorySizes;
    std::size_t episodes = 50;
    std::optional<std::string> pretrained_model;
};

inline const std::vector<std::string>& scenario_names() {
    static const std::vector<std::string> names{"single-rsu", "multi-rsu", "multi-rsu-shared"};
    return names;
}

/// Seven RSUs at 300 m spacing on a 2.4 km corridor.
inline std::vector<double> seven_rsu_layout() {
    std::vector<double> p;
    for (int i = 1; i <= 7; ++i) p.push_back(300.0 * i);
    return p;
}

/// Named layouts:
///   single-rsu        one RSU at 300 m on a 900 m corridor, one learner
///   multi-rsu         seven RSUs, one independent learner per RSU
///   multi-rsu-shared  seven RSUs sharing a single learner
inline std::optional<Scenario> make_scenario(std::string_view name) {
    Scenario s;
    s.name = std::string(name);
    if (name == "single-rsu") return s;
    if (name == "multi-rsu" || name == "multi-rsu-shared") {
        s.rsu_positions_m = seven_rsu_layout();
        s.corridor_length_m = 2400.0;
        s.mode = name == "multi-rsu" ? AgentMode::MultiAgent : AgentMode::SingleAgent;
        return s;
    }
    return std::nullopt;
}

/// Problems with a scenario definition; empty when usable.
inline std::vector<std::string> scenario_problems(const Scenario& s) {
    std::vector<std::string> out;
    if (s.mode == AgentMode::MultiAgent && s.rsu_positions_m.size() < 2)
        out.emplace_back("multi-agent mode requires at least 2 RSUs");
    if (s.rsu_positions_m.empty()) out.emplace_back("scenario has no RSUs");
    return out;
}

/// The config with the scenario's road layout and profile set applied.
inline SimConfig apply_scenario(SimConfig cfg, const Scenario& s) {
    cfg.rsu_positions_m = s.rsu_positions_m;
    cfg.corridor_length_m = s.corridor_length_m;
    if (cfg.profile_set != s.profile_set) {
        cfg.profile_set = s.profile_set;
        cfg.profiles = default_profiles(s.profile_set);
    }
    cfg.episodes = s.episodes;
    return cfg;
}

}  // namespace vanetqos
