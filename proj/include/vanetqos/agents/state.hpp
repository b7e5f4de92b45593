#pragma once

// Observation, tabular discretization, network input encoding, the action
// type and its mapping to a waiting time, and the epsilon-greedy policy.

#include <algorithm>
#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

#include "vanetqos/domain.hpp"
#include "vanetqos/rng.hpp"

namespace vanetqos {

/// What an RSU sees when deciding for one vehicle.
struct StateObs {
    int sojourn_level = 0;              // 0..4
    std::size_t total_vehicles = 0;     // active at the RSU
    ServiceCategory category = ServiceCategory::VO;
    std::size_t category_vehicles = 0;  // active at the RSU with this category

    friend bool operator==(const StateObs&, const StateObs&) = default;
};

struct DiscreteState {
    int sojourn_level = 0;  // 0..4
    int tv_bucket = 0;      // 0..3
    int category_index = 0; // 0..3
    int tcv_bucket = 0;     // 0..3

    static constexpr std::size_t kCount = 5 * 4 * 4 * 4;

    /// Row-major flat index in [0, kCount).
    std::size_t flat() const noexcept {
        return ((static_cast<std::size_t>(sojourn_level) * 4 + static_cast<std::size_t>(tv_bucket)) * 4 +
                static_cast<std::size_t>(category_index)) * 4 +
               static_cast<std::size_t>(tcv_bucket);
    }

    friend bool operator==(const DiscreteState&, const DiscreteState&) = default;
};

/// Number of edges strictly below `value`.
inline int bucket_of(double value, std::span<const double> edges) {
    return static_cast<int>(std::count_if(edges.begin(), edges.end(), [value](double e) { return e < value; }));
}

inline DiscreteState discretize(const StateObs& obs, std::span<const double> tv_edges,
                                std::span<const double> tcv_edges) {
    return {std::clamp(obs.sojourn_level, 0, 4), bucket_of(static_cast<double>(obs.total_vehicles), tv_edges),
            static_cast<int>(index_of(obs.category)),
            bucket_of(static_cast<double>(obs.category_vehicles), tcv_edges)};
}

inline DiscreteState discretize(const StateObs& obs, const RlHyperparams& rl) {
    return discretize(obs, rl.tv_bucket_edges, rl.tcv_bucket_edges);
}

inline constexpr std::size_t kEncodedStateSize = 11;

/// Network input layout, every slot in [0, 1]:
///   0      sojourn_level / 4
///   1      min(Tv, 40) / 40
///   2      min(Tcv, 40) / 40
///   3..6   one-hot category (VO, VI, HDMAP, BE)
///   7      tv_bucket / 3
///   8      tcv_bucket / 3
///   9      Tcv / Tv (0 when Tv == 0)
///   10     constant 1
inline std::array<double, kEncodedStateSize> encode(const StateObs& obs, const RlHyperparams& rl = {}) {
    constexpr double kCap = 40.0;
    const auto d = discretize(obs, rl);
    const double tv = static_cast<double>(obs.total_vehicles);
    const double tcv = static_cast<double>(obs.category_vehicles);
    std::array<double, kEncodedStateSize> x{};
    x[0] = std::clamp(obs.sojourn_level, 0, 4) / 4.0;
    x[1] = std::min(tv, kCap) / kCap;
    x[2] = std::min(tcv, kCap) / kCap;
    x[3 + index_of(obs.category)] = 1.0;
    x[7] = d.tv_bucket / 3.0;
    x[8] = d.tcv_bucket / 3.0;
    x[9] = tv > 0.0 ? std::min(1.0, tcv / tv) : 0.0;
    x[10] = 1.0;
    return x;
}

/// Action number, 1-based. Index 0 would map to a zero wait, which the
/// waiting-time constraint forbids.
struct Action {
    int index = 1;

    constexpr std::size_t slot() const noexcept { return static_cast<std::size_t>(index - 1); }
    static constexpr Action from_slot(std::size_t s) noexcept { return Action{static_cast<int>(s) + 1}; }

    friend bool operator==(const Action&, const Action&) = default;
};

/// w = a * w_max / action_count, so 0 < w <= w_max.
inline double map_action(Action a, const CategoryProfile& profile, std::size_t action_count) {
    if (a.index < 1 || static_cast<std::size_t>(a.index) > action_count)
        throw std::out_of_range("action index outside [1, action_count]");
    return a.index * (profile.w_max_s / static_cast<double>(action_count));
}

/// First index of the maximum value.
inline std::size_t argmax(std::span<const double> values) {
    return static_cast<std::size_t>(std::max_element(values.begin(), values.end()) - values.begin());
}

/// With probability epsilon a uniform action, otherwise the greedy one
/// (lowest index wins ties). The exploration draw is consumed only when
/// 0 < epsilon, so epsilon == 0 never touches the generator.
inline Action select_epsilon_greedy(std::span<const double> values, double epsilon, Rng& rng) {
    if (epsilon > 0.0 && rng.uniform() < epsilon) return Action::from_slot(rng.index(values.size()));
    return Action::from_slot(argmax(values));
}

struct Transition {
    StateObs state;
    Action action;
    double reward = 0.0;
    StateObs next_state;
    bool terminal = false;
};

}  // namespace vanetqos
