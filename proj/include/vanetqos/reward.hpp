#pragma once

// Latency/throughput utility, per-category constraint checks and the reward
// handed to the learners.

#include <algorithm>

#include "vanetqos/domain.hpp"

namespace vanetqos {

/// What one vehicle experienced over one decision interval.
struct IntervalMeasurement {
    ServiceCategory category = ServiceCategory::VO;
    double mean_latency_s = 0.0;
    double throughput_bps = 0.0;
    double duration_s = 0.0;
};

struct ConstraintStatus {
    bool latency_ok = false;
    bool rate_ok = false;
    bool wait_ok = false;
};

/// Latency bound and minimum rate are inclusive; the waiting time must lie in
/// (0, w_max].
inline ConstraintStatus check_constraints(const IntervalMeasurement& m, const CategoryProfile& profile,
                                          double w_assigned) {
    return {m.mean_latency_s <= profile.l_threshold_s, m.throughput_bps >= profile.r_threshold_bps,
            w_assigned > 0.0 && w_assigned <= profile.w_max_s};
}

/// alpha1 * min(R / R_max, 1) - alpha2 * (L / L_max) + penalty [L > L_max]
///   + bonus [L <= L_max and R >= R_min].
/// The throughput ratio saturates at 1; the latency ratio does not.
inline double utility(const IntervalMeasurement& m, const CategoryProfile& profile, const RewardConfig& rc) {
    const double rate_term = std::min(m.throughput_bps / profile.r_threshold_bps, 1.0);
    const double latency_term = m.mean_latency_s / profile.l_threshold_s;
    double u = rc.alpha1 * rate_term - rc.alpha2 * latency_term;
    const bool latency_ok = m.mean_latency_s <= profile.l_threshold_s;
    const bool rate_ok = m.throughput_bps >= profile.r_threshold_bps;
    if (!latency_ok) u += rc.penalty;
    if (latency_ok && rate_ok) u += rc.bonus;
    return u;
}

/// The reward is the utility, nothing more.
inline double reward_for_transition(const IntervalMeasurement& m, const CategoryProfile& profile,
                                    const RewardConfig& rc, [[maybe_unused]] double w_assigned) {
    return utility(m, profile, rc);
}

}  // namespace vanetqos
