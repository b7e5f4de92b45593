#pragma once

// Abstract shared medium per RSU: fluid application queues drained by a
// contention-degraded capacity that is split by (weighted) max-min fairness.

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

#include "vanetqos/domain.hpp"
#include "vanetqos/traffic.hpp"

namespace vanetqos {

/// Equal shares model the plain channel; Weighted uses per-category
/// priority weights as a static stand-in for EDCA access categories.
enum class SharingMode { Equal, Weighted };

/// phy_rate / (1 + coeff * max(0, n - 1)).
inline double effective_capacity(std::size_t active, const ChannelParams& p) {
    const double extra = active > 1 ? static_cast<double>(active - 1) : 0.0;
    return p.phy_rate_bps / (1.0 + p.contention_coeff * extra);
}

/// Weighted max-min (water-filling) split of `capacity` among flows with the
/// given demands. Flows whose demand is below their weighted fair share get
/// exactly their demand; the rest share the remainder in proportion to weight.
inline std::vector<double> weighted_max_min_allocate(std::span<const double> demands, std::span<const double> weights,
                                                     double capacity) {
    const std::size_t n = demands.size();
    std::vector<double> alloc(n, 0.0);
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return demands[a] / weights[a] < demands[b] / weights[b];
    });

    double remaining = std::max(0.0, capacity);
    double weight_left = 0.0;
    for (double w : weights) weight_left += w;

    for (std::size_t k = 0; k < n; ++k) {
        const std::size_t i = order[k];
        const double fair = remaining * weights[i] / weight_left;
        if (demands[i] <= fair) {
            alloc[i] = demands[i];
            remaining = std::max(0.0, remaining - demands[i]);
            weight_left -= weights[i];
            continue;
        }
        for (std::size_t j = k; j < n; ++j) alloc[order[j]] = remaining * weights[order[j]] / weight_left;
        break;
    }
    return alloc;
}

inline std::vector<double> max_min_allocate(std::span<const double> demands, double capacity) {
    std::vector<double> ones(demands.size(), 1.0);
    return weighted_max_min_allocate(demands, ones, capacity);
}

struct TickOutcome {
    std::vector<double> drained_bits;       // parallel to the input vehicles
    std::vector<double> allocated_rate_bps;
    std::vector<double> queue_delay_s;
    std::size_t active_count = 0;
    double capacity_bits = 0.0;             // effective_capacity(active_count) * dt
};

/// Adds `dt` worth of application traffic to the vehicle's queue.
inline void generate_traffic(Vehicle& v, const CategoryProfile& profile, double dt) {
    v.queue_bytes += profile.app_rate_bps * dt / 8.0;
}

/// One fluid step for the vehicles associated with one RSU:
///  1. every vehicle generates app_rate * dt regardless of phase;
///  2. ACTIVE vehicles with backlog share effective_capacity(n) * dt by max-min;
///  3. queues drain by their allocation;
///  4. delay = backlog / allocated rate for ACTIVE vehicles (floored at 1 bit/s),
///     age of the oldest queued bit (backlog / app_rate) for WAITING ones.
inline TickOutcome channel_tick(std::span<Vehicle* const> vehicles, const ProfileTable& profiles, double dt,
                                const ChannelParams& params, SharingMode mode = SharingMode::Equal) {
    constexpr double kMinRate = 1.0;
    const std::size_t n = vehicles.size();
    TickOutcome out;
    out.drained_bits.assign(n, 0.0);
    out.allocated_rate_bps.assign(n, 0.0);
    out.queue_delay_s.assign(n, 0.0);

    std::vector<std::size_t> contenders;
    for (std::size_t i = 0; i < n; ++i) {
        Vehicle& v = *vehicles[i];
        generate_traffic(v, profiles[index_of(v.category)], dt);
        if (v.phase == Phase::Active && v.queue_bytes > 0.0) contenders.push_back(i);
    }

    out.active_count = contenders.size();
    out.capacity_bits = effective_capacity(out.active_count, params) * dt;

    std::vector<double> demand(contenders.size()), weight(contenders.size());
    for (std::size_t k = 0; k < contenders.size(); ++k) {
        const Vehicle& v = *vehicles[contenders[k]];
        demand[k] = v.queue_bytes * 8.0;
        weight[k] = mode == SharingMode::Weighted ? profiles[index_of(v.category)].priority_weight : 1.0;
    }
    const auto alloc = weighted_max_min_allocate(demand, weight, out.capacity_bits);

    for (std::size_t k = 0; k < contenders.size(); ++k) {
        const std::size_t i = contenders[k];
        Vehicle& v = *vehicles[i];
        const double bits = std::min(alloc[k], v.queue_bytes * 8.0);
        out.drained_bits[i] = bits;
        out.allocated_rate_bps[i] = alloc[k] / dt;
        v.queue_bytes = std::max(0.0, v.queue_bytes - bits / 8.0);
        v.bytes_sent_this_cycle += bits / 8.0;
    }

    for (std::size_t i = 0; i < n; ++i) {
        const Vehicle& v = *vehicles[i];
        const double backlog_bits = v.queue_bytes * 8.0;
        if (v.phase == Phase::Active) {
            out.queue_delay_s[i] = backlog_bits / std::max(out.allocated_rate_bps[i], kMinRate);
        } else {
            out.queue_delay_s[i] = backlog_bits / profiles[index_of(v.category)].app_rate_bps;
        }
    }
    return out;
}

/// Channel of one RSU plus its running accounting.
class RsuChannel {
public:
    explicit RsuChannel(ChannelParams params = {}, SharingMode mode = SharingMode::Equal)
        : params_(params), mode_(mode) {}

    TickOutcome tick(std::span<Vehicle* const> vehicles, const ProfileTable& profiles, double dt) {
        auto out = channel_tick(vehicles, profiles, dt, params_, mode_);
        for (double b : out.drained_bits) drained_bits_ += b;
        capacity_bits_ += out.capacity_bits;
        ++ticks_;
        return out;
    }

    /// Zeroes all accounting; idempotent.
    void reset() {
        drained_bits_ = 0.0;
        capacity_bits_ = 0.0;
        ticks_ = 0;
    }

    double total_drained_bits() const noexcept { return drained_bits_; }
    double total_capacity_bits() const noexcept { return capacity_bits_; }
    std::size_t ticks() const noexcept { return ticks_; }
    const ChannelParams& params() const noexcept { return params_; }
    SharingMode mode() const noexcept { return mode_; }

    friend bool operator==(const RsuChannel&, const RsuChannel&) = default;

private:
    ChannelParams params_;
    SharingMode mode_;
    double drained_bits_ = 0.0;
    double capacity_bits_ = 0.0;
    std::size_t ticks_ = 0;
};

inline void reset_rsu_channel(RsuChannel& ch) { ch.reset(); }

}  // namespace vanetqos
