#pragma once

// One episode of the corridor: arrivals, mobility, RSU association, decision
// epochs, channel ticks, KPI recording and learner updates.

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "vanetqos/agents/learners.hpp"
#include "vanetqos/agents/state.hpp"
#include "vanetqos/channel.hpp"
#include "vanetqos/domain.hpp"
#include "vanetqos/harness/scenario.hpp"
#include "vanetqos/metrics.hpp"
#include "vanetqos/reward.hpp"
#include "vanetqos/rng.hpp"
#include "vanetqos/traffic.hpp"

namespace vanetqos {

struct EpisodeStats {
    std::size_t decisions = 0;
    std::size_t transitions = 0;
    std::size_t terminal_transitions = 0;
    std::size_t learner_calls = 0;     // act + observe
    std::size_t wait_violations = 0;   // assigned waits outside (0, w_max]
    std::size_t vehicles_spawned = 0;
    double channel_drained_bits = 0.0;
    double channel_capacity_bits = 0.0;

    EpisodeStats& operator+=(const EpisodeStats& o) {
        decisions += o.decisions;
        transitions += o.transitions;
        terminal_transitions += o.terminal_transitions;
        learner_calls += o.learner_calls;
        wait_violations += o.wait_violations;
        vehicles_spawned += o.vehicles_spawned;
        channel_drained_bits += o.channel_drained_bits;
        channel_capacity_bits += o.channel_capacity_bits;
        return *this;
    }
};

struct EpisodeResult {
    MetricsLedger ledger;
    EpisodeStats stats;
};

namespace detail {

/// The transition a vehicle has open at its current RSU.
struct PendingDecision {
    std::size_t rsu = 0;
    StateObs obs;
    Action action;
    double wait_s = 0.0;
    double start_s = 0.0;
    double active_latency_sum = 0.0;
    std::size_t active_samples = 0;
    double waiting_latency_sum = 0.0;
    std::size_t waiting_samples = 0;
    double bits = 0.0;
};

struct TrackedVehicle {
    Vehicle v;
    std::optional<PendingDecision> pending;
};

class EpisodeRunner {
public:
    EpisodeRunner(const Scenario& scenario, const SimConfig& cfg, std::span<Learner* const> learners,
                  std::uint64_t seed, std::size_t episode, bool learn)
        : scenario_(scenario),
          cfg_(cfg),
          learners_(learners),
          learn_(learn),
          category_rng_(make_stream(seed, Stream::Categories, episode)),
          ledger_(episode, cfg.rsu_positions_m.size(), cfg.episode_duration_s) {
        if (uses_learner(scenario.mode) && learners.size() != cfg.rsu_positions_m.size())
            throw std::invalid_argument("run_episode needs one learner slot per RSU");
        const auto sharing =
            scenario.mode == AgentMode::BaselineStaticPriority ? SharingMode::Weighted : SharingMode::Equal;
        channels_.assign(cfg.rsu_positions_m.size(), RsuChannel(cfg.channel, sharing));
    }

    EpisodeResult run() {
        const double dt = cfg_.tick_s;
        const auto steps = static_cast<std::size_t>(std::llround(cfg_.episode_duration_s / dt));
        for (std::size_t k = 1; k <= steps; ++k) step(static_cast<double>(k) * dt, dt);
        const double end = static_cast<double>(steps) * dt;
        for (auto& t : vehicles_)
            if (t.pending) close(t, end, true);
        for (const auto& ch : channels_) {
            stats_.channel_drained_bits += ch.total_drained_bits();
            stats_.channel_capacity_bits += ch.total_capacity_bits();
        }
        return {std::move(ledger_), stats_};
    }

private:
    void step(double now, double dt) {
        for (auto& v : spawn_step(clock_, now, category_rng_, cfg_)) {
            vehicles_.push_back({v, std::nullopt});
            ++stats_.vehicles_spawned;
        }

        std::vector<TrackedVehicle> kept;
        kept.reserve(vehicles_.size());
        std::vector<std::size_t> fresh;  // indices into kept needing a first decision
        for (auto& t : vehicles_) {
            t.v = mobility_step(t.v, dt, cfg_);
            if (t.v.departed) {
                if (t.pending) close(t, now, true);
                continue;
            }
            const auto assoc = associate_rsu(t.v, cfg_.rsu_positions_m, cfg_.coverage_radius_m);
            if (assoc != t.v.assoc_rsu) {
                if (t.pending) close(t, now, true);
                t.v.assoc_rsu = assoc;
                if (assoc) fresh.push_back(kept.size());
            }
            if (always_active(scenario_.mode)) {
                t.v.phase = Phase::Active;
            } else if (t.v.phase == Phase::Waiting && now >= t.v.wait_until_s) {
                t.v.phase = Phase::Active;
                t.v.active_since_s = now;
                t.v.bytes_sent_this_cycle = 0.0;
            }
            kept.push_back(std::move(t));
        }
        vehicles_ = std::move(kept);

        count_active();

        if (!always_active(scenario_.mode)) {
            std::size_t next_fresh = 0;
            for (std::size_t i = 0; i < vehicles_.size(); ++i) {
                auto& t = vehicles_[i];
                if (!t.v.assoc_rsu) continue;
                const bool first = next_fresh < fresh.size() && fresh[next_fresh] == i;
                if (first) ++next_fresh;
                const bool cycle_over =
                    t.pending && t.v.phase == Phase::Active &&
                    (t.v.queue_bytes <= kEmptyQueue || now - t.v.active_since_s >= cfg_.t_active_max_s - kTimeTol);
                if (!first && !cycle_over) continue;
                if (t.pending) close(t, now, false);
                decide(t, now);
            }
        }

        std::vector<std::vector<Vehicle*>> by_rsu(channels_.size());
        std::vector<std::vector<TrackedVehicle*>> tracked_by_rsu(channels_.size());
        for (auto& t : vehicles_) {
            if (t.v.assoc_rsu) {
                by_rsu[*t.v.assoc_rsu].push_back(&t.v);
                tracked_by_rsu[*t.v.assoc_rsu].push_back(&t);
            } else {
                generate_traffic(t.v, cfg_.profile(t.v.category), dt);
            }
        }
        for (std::size_t r = 0; r < channels_.size(); ++r) {
            const auto out = channels_[r].tick(by_rsu[r], cfg_.profiles, dt);
            ledger_.record_tick(r, out, by_rsu[r], now, dt);
            for (std::size_t i = 0; i < tracked_by_rsu[r].size(); ++i) {
                auto& p = tracked_by_rsu[r][i]->pending;
                if (!p) continue;
                p->bits += out.drained_bits[i];
                if (by_rsu[r][i]->phase == Phase::Active) {
                    p->active_latency_sum += out.queue_delay_s[i];
                    ++p->active_samples;
                } else {
                    p->waiting_latency_sum += out.queue_delay_s[i];
                    ++p->waiting_samples;
                }
            }
        }
    }

    void count_active() {
        active_total_.assign(channels_.size(), 0);
        active_by_cat_.assign(channels_.size(), {});
        for (const auto& t : vehicles_) {
            if (!t.v.assoc_rsu || t.v.phase != Phase::Active) continue;
            ++active_total_[*t.v.assoc_rsu];
            ++active_by_cat_[*t.v.assoc_rsu][index_of(t.v.category)];
        }
    }

    StateObs observe(const Vehicle& v, std::size_t rsu) const {
        StateObs obs;
        obs.sojourn_level =
            sojourn(v, cfg_.rsu_positions_m[rsu], cfg_.coverage_radius_m, cfg_.max_speed_mps).level;
        obs.total_vehicles = active_total_[rsu];
        obs.category = v.category;
        obs.category_vehicles = active_by_cat_[rsu][index_of(v.category)];
        return obs;
    }

    void decide(TrackedVehicle& t, double now) {
        const std::size_t rsu = *t.v.assoc_rsu;
        const auto& profile = cfg_.profile(t.v.category);
        PendingDecision p;
        p.rsu = rsu;
        p.obs = observe(t.v, rsu);
        if (scenario_.mode == AgentMode::FixedWait) {
            p.action = Action{static_cast<int>(cfg_.rl.action_count)};
        } else {
            p.action = learners_[rsu]->act(p.obs, learn_);
            ++stats_.learner_calls;
        }
        p.wait_s = map_action(p.action, profile, cfg_.rl.action_count);
        if (!(p.wait_s > 0.0 && p.wait_s <= profile.w_max_s)) ++stats_.wait_violations;
        p.start_s = now;
        t.v.wait_until_s = now + p.wait_s;
        t.v.phase = Phase::Waiting;
        t.pending = p;
        ++stats_.decisions;
    }

    /// Completes the open transition with what the vehicle experienced since
    /// its last decision.
    void close(TrackedVehicle& t, double now, bool terminal) {
        const PendingDecision p = *t.pending;
        t.pending.reset();
        const double duration = now - p.start_s;
        if (duration <= 0.0) return;

        IntervalMeasurement m;
        m.category = t.v.category;
        m.duration_s = duration;
        m.throughput_bps = p.bits / duration;
        if (p.active_samples)
            m.mean_latency_s = p.active_latency_sum / static_cast<double>(p.active_samples);
        else if (p.waiting_samples)
            m.mean_latency_s = p.waiting_latency_sum / static_cast<double>(p.waiting_samples);

        const auto& profile = cfg_.profile(t.v.category);
        const double reward = reward_for_transition(m, profile, cfg_.reward, p.wait_s);
        ledger_.add_reward(p.rsu, reward);
        ++stats_.transitions;
        if (terminal) ++stats_.terminal_transitions;

        if (!uses_learner(scenario_.mode) || !learn_) return;
        Transition tr;
        tr.state = p.obs;
        tr.action = p.action;
        tr.reward = reward;
        tr.next_state = observe(t.v, p.rsu);
        tr.terminal = terminal;
        learners_[p.rsu]->observe(tr);
        ++stats_.learner_calls;
    }

    static constexpr double kEmptyQueue = 1e-9;
    static constexpr double kTimeTol = 1e-9;

    const Scenario& scenario_;
    const SimConfig& cfg_;
    std::span<Learner* const> learners_;
    bool learn_;
    Rng category_rng_;
    ArrivalClock clock_;
    MetricsLedger ledger_;
    EpisodeStats stats_;
    std::vector<RsuChannel> channels_;
    std::vector<TrackedVehicle> vehicles_;
    std::vector<std::size_t> active_total_;
    std::vector<std::array<std::size_t, kCategoryCount>> active_by_cat_;
};

}  // namespace detail

/// Runs one episode. `learners` holds one slot per RSU (the same pointer in
/// every slot for a shared single agent) and may be empty for baselines.
/// With `learn` false the learners act greedily and are never updated.
/// Deterministic given (scenario, cfg, seed, episode, learner state).
inline EpisodeResult run_episode(const Scenario& scenario, const SimConfig& cfg, std::span<Learner* const> learners,
                                 std::uint64_t seed, std::size_t episode = 0, bool learn = true) {
    return detail::EpisodeRunner(scenario, cfg, learners, seed, episode, learn).run();
}

}  // namespace vanetqos
