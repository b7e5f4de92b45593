#pragma once

// Vehicle arrivals, 1-D corridor mobility, nearest-RSU association and
// sojourn-time estimation.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "vanetqos/domain.hpp"
#include "vanetqos/rng.hpp"

namespace vanetqos {

enum class Phase : std::uint8_t { Waiting, Active };

struct Vehicle {
    std::uint64_t id = 0;
    ServiceCategory category = ServiceCategory::VO;
    double position_m = 0.0;
    double speed_mps = 0.0;
    double spawn_time_s = 0.0;
    double queue_bytes = 0.0;
    double wait_until_s = 0.0;      // phase == Waiting  <=>  now < wait_until
    Phase phase = Phase::Active;
    double active_since_s = 0.0;
    double bytes_sent_this_cycle = 0.0;
    std::optional<std::size_t> assoc_rsu;
    bool departed = false;

    /// x_v: allowed to transmit right now.
    bool transmitting() const noexcept { return phase == Phase::Active && assoc_rsu.has_value(); }
};

struct SojournState {
    double seconds_remaining = 0.0;
    int level = 0;  // 0..4
};

/// Fixed-interval arrival clock. Tracks how many entry boundaries have been
/// emitted so repeated calls never double-count.
struct ArrivalClock {
    std::uint64_t emitted = 0;
    std::uint64_t next_id = 0;
};

/// Emits one vehicle per entry-interval boundary k*interval (k >= 1) that is
/// <= now and has not been emitted yet. Categories are uniform over the four.
inline std::vector<Vehicle> spawn_step(ArrivalClock& clock, double now, Rng& category_rng, const SimConfig& cfg) {
    constexpr double kBoundaryTol = 1e-9;
    std::vector<Vehicle> out;
    while (static_cast<double>(clock.emitted + 1) * cfg.entry_interval_s <= now + kBoundaryTol) {
        ++clock.emitted;
        Vehicle v;
        v.id = clock.next_id++;
        v.category = kAllCategories[category_rng.index(kCategoryCount)];
        v.spawn_time_s = static_cast<double>(clock.emitted) * cfg.entry_interval_s;
        v.wait_until_s = v.spawn_time_s;
        v.active_since_s = v.spawn_time_s;
        out.push_back(v);
    }
    return out;
}

/// Constant-acceleration kinematics capped at max_speed. Sets `departed` once
/// the vehicle passes the corridor end.
inline Vehicle mobility_step(Vehicle v, double dt, const SimConfig& cfg) {
    v.speed_mps = std::min(cfg.max_speed_mps, v.speed_mps + cfg.accel_mps2 * dt);
    v.position_m += v.speed_mps * dt;
    if (v.position_m > cfg.corridor_length_m) v.departed = true;
    return v;
}

/// Nearest RSU within `radius`; ties go to the lower index.
inline std::optional<std::size_t> associate_rsu(double position, std::span<const double> rsu_positions,
                                                double radius) {
    std::optional<std::size_t> best;
    double best_d = 0.0;
    for (std::size_t i = 0; i < rsu_positions.size(); ++i) {
        const double d = std::abs(position - rsu_positions[i]);
        if (d > radius) continue;
        if (!best || d < best_d) {
            best = i;
            best_d = d;
        }
    }
    return best;
}

inline std::optional<std::size_t> associate_rsu(const Vehicle& v, std::span<const double> rsu_positions,
                                                double radius) {
    return associate_rsu(v.position_m, rsu_positions, radius);
}

/// Remaining time inside an RSU's coverage, discretized in fifths of a
/// full-speed traversal of the coverage diameter.
inline SojournState sojourn(const Vehicle& v, double rsu_position, double radius, double max_speed) {
    constexpr double kMinSpeed = 0.1;
    const double remaining_m = std::max(0.0, rsu_position + radius - v.position_m);
    SojournState s;
    s.seconds_remaining = remaining_m / std::max(v.speed_mps, kMinSpeed);
    const double full = 2.0 * radius / max_speed;
    s.level = static_cast<int>(std::min(4.0, std::floor(5.0 * s.seconds_remaining / full)));
    return s;
}

}  // namespace vanetqos
