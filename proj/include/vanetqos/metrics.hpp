#pragma once

// KPI accounting: per-(RSU, category) latency samples and delivered bytes,
// per-vehicle throughput for fairness, 5 s windowed series and CSV output.

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "vanetqos/channel.hpp"
#include "vanetqos/domain.hpp"
#include "vanetqos/traffic.hpp"

namespace vanetqos {

/// (sum x)^2 / (n * sum x^2); in [1/n, 1].
inline double jain_index(std::span<const double> values) {
    if (values.empty()) throw std::invalid_argument("jain_index needs at least one value");
    double sum = 0.0, sq = 0.0;
    for (double v : values) {
        if (v < 0.0) throw std::invalid_argument("jain_index needs non-negative values");
        sum += v;
        sq += v * v;
    }
    if (sq == 0.0) throw std::invalid_argument("jain_index is undefined for an all-zero allocation");
    return sum * sum / (static_cast<double>(values.size()) * sq);
}

struct CategoryTally {
    std::vector<double> latency_samples;  // one per ACTIVE tick, seconds
    double bytes_delivered = 0.0;
    double active_time_s = 0.0;
};

struct VehicleTally {
    ServiceCategory category = ServiceCategory::VO;
    double bits = 0.0;
    double associated_time_s = 0.0;
};

struct WindowTally {
    double latency_sum = 0.0;
    std::size_t samples = 0;
    double bits = 0.0;
};

struct RsuTally {
    std::array<CategoryTally, kCategoryCount> categories;
    std::map<std::uint64_t, VehicleTally> vehicles;
    double reward_sum = 0.0;
    std::size_t transitions = 0;
};

class MetricsLedger {
public:
    static constexpr double kDefaultWindow = 5.0;

    MetricsLedger(std::size_t episode, std::size_t rsu_count, double duration_s, double window_s = kDefaultWindow)
        : episode_(episode), duration_s_(duration_s), window_s_(window_s), rsus_(rsu_count) {}

    /// Call once per tick per RSU with that RSU's channel outcome.
    void record_tick(std::size_t rsu, const TickOutcome& out, std::span<Vehicle* const> vehicles, double now,
                     double dt) {
        auto& r = rsus_.at(rsu);
        const auto window = static_cast<std::size_t>(std::max(0.0, (now - 0.5 * dt) / window_s_));
        for (std::size_t i = 0; i < vehicles.size(); ++i) {
            const Vehicle& v = *vehicles[i];
            auto& cat = r.categories[index_of(v.category)];
            auto& veh = r.vehicles[v.id];
            veh.category = v.category;
            veh.associated_time_s += dt;
            veh.bits += out.drained_bits[i];
            cat.bytes_delivered += out.drained_bits[i] / 8.0;
            auto& w = windows_[{window, rsu, index_of(v.category)}];
            w.bits += out.drained_bits[i];
            if (v.phase != Phase::Active) continue;
            cat.latency_samples.push_back(out.queue_delay_s[i]);
            cat.active_time_s += dt;
            w.latency_sum += out.queue_delay_s[i];
            ++w.samples;
        }
    }

    void add_reward(std::size_t rsu, double reward) {
        rsus_.at(rsu).reward_sum += reward;
        ++rsus_.at(rsu).transitions;
    }

    std::size_t episode() const noexcept { return episode_; }
    double duration_s() const noexcept { return duration_s_; }
    double window_s() const noexcept { return window_s_; }
    const std::vector<RsuTally>& rsus() const noexcept { return rsus_; }
    const std::map<std::tuple<std::size_t, std::size_t, std::size_t>, WindowTally>& windows() const noexcept {
        return windows_;
    }

    double reward_sum() const {
        double s = 0.0;
        for (const auto& r : rsus_) s += r.reward_sum;
        return s;
    }
    std::size_t transitions() const {
        std::size_t n = 0;
        for (const auto& r : rsus_) n += r.transitions;
        return n;
    }

    /// Pooled mean of the category's latency samples over all RSUs; NaN if none.
    double mean_latency(ServiceCategory c) const {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : rsus_) {
            for (double s : r.categories[index_of(c)].latency_samples) sum += s;
            n += r.categories[index_of(c)].latency_samples.size();
        }
        return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    }

    /// Pooled mean over every latency sample of every category and RSU.
    double mean_latency() const {
        double sum = 0.0;
        std::size_t n = 0;
        for (const auto& r : rsus_)
            for (const auto& cat : r.categories) {
                for (double s : cat.latency_samples) sum += s;
                n += cat.latency_samples.size();
            }
        return n ? sum / static_cast<double>(n) : std::numeric_limits<double>::quiet_NaN();
    }

    /// Category bits delivered over all RSUs divided by the episode duration.
    double throughput(ServiceCategory c) const {
        double bytes = 0.0;
        for (const auto& r : rsus_) bytes += r.categories[index_of(c)].bytes_delivered;
        return bytes * 8.0 / duration_s_;
    }

    double total_bytes_delivered() const {
        double bytes = 0.0;
        for (const auto& r : rsus_)
            for (const auto& cat : r.categories) bytes += cat.bytes_delivered;
        return bytes;
    }

    friend bool operator==(const MetricsLedger& a, const MetricsLedger& b) {
        auto same_rsu = [](const RsuTally& x, const RsuTally& y) {
            for (std::size_t c = 0; c < kCategoryCount; ++c) {
                if (x.categories[c].latency_samples != y.categories[c].latency_samples) return false;
                if (x.categories[c].bytes_delivered != y.categories[c].bytes_delivered) return false;
                if (x.categories[c].active_time_s != y.categories[c].active_time_s) return false;
            }
            if (x.vehicles.size() != y.vehicles.size()) return false;
            for (auto ix = x.vehicles.begin(), iy = y.vehicles.begin(); ix != x.vehicles.end(); ++ix, ++iy)
                if (ix->first != iy->first || ix->second.bits != iy->second.bits ||
                    ix->second.associated_time_s != iy->second.associated_time_s)
                    return false;
            return x.reward_sum == y.reward_sum && x.transitions == y.transitions;
        };
        if (a.episode_ != b.episode_ || a.rsus_.size() != b.rsus_.size()) return false;
        for (std::size_t i = 0; i < a.rsus_.size(); ++i)
            if (!same_rsu(a.rsus_[i], b.rsus_[i])) return false;
        return true;
    }

private:
    std::size_t episode_;
    double duration_s_;
    double window_s_;
    std::vector<RsuTally> rsus_;
    std::map<std::tuple<std::size_t, std::size_t, std::size_t>, WindowTally> windows_;
};

/// Free-function form of MetricsLedger::record_tick.
inline void record_tick(MetricsLedger& ledger, std::size_t rsu, const TickOutcome& out,
                        std::span<Vehicle* const> vehicles, double now, double dt) {
    ledger.record_tick(rsu, out, vehicles, now, dt);
}

struct SummaryRow {
    std::size_t episode = 0;
    std::size_t rsu = 0;
    ServiceCategory category = ServiceCategory::VO;
    double mean_latency_s = 0.0;
    double throughput_bps = 0.0;
    double jain = 0.0;         // over per-vehicle mean throughputs in the category
    double reward_sum = 0.0;   // the RSU's episode reward
    std::size_t vehicles = 0;
};

/// One row per (RSU, category) that produced at least one latency sample,
/// ordered by RSU then category.
inline std::vector<SummaryRow> episode_summary(const MetricsLedger& ledger) {
    std::vector<SummaryRow> rows;
    for (std::size_t r = 0; r < ledger.rsus().size(); ++r) {
        const auto& rsu = ledger.rsus()[r];
        for (auto c : kAllCategories) {
            const auto& cat = rsu.categories[index_of(c)];
            if (cat.latency_samples.empty()) continue;
            SummaryRow row;
            row.episode = ledger.episode();
            row.rsu = r;
            row.category = c;
            row.mean_latency_s = std::accumulate(cat.latency_samples.begin(), cat.latency_samples.end(), 0.0) /
                                 static_cast<double>(cat.latency_samples.size());
            row.throughput_bps = cat.bytes_delivered * 8.0 / ledger.duration_s();
            std::vector<double> per_vehicle;
            for (const auto& [id, v] : rsu.vehicles)
                if (v.category == c && v.associated_time_s > 0.0) per_vehicle.push_back(v.bits / v.associated_time_s);
            row.vehicles = per_vehicle.size();
            double sum = 0.0;
            for (double x : per_vehicle) sum += x;
            row.jain = sum > 0.0 ? jain_index(per_vehicle) : std::numeric_limits<double>::quiet_NaN();
            row.reward_sum = rsu.reward_sum;
            rows.push_back(row);
        }
    }
    return rows;
}

namespace detail {

inline std::string fmt9(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

inline std::ofstream open_for_write(const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot open '" + path + "' for writing");
    return f;
}

}  // namespace detail

inline constexpr std::string_view kMetricsCsvHeader =
    "episode,rsu,category,mean_latency_s,throughput_bps,jain,reward_sum,vehicles";

inline std::string metrics_csv(std::span<const SummaryRow> rows) {
    std::string out(kMetricsCsvHeader);
    out += '\n';
    for (const auto& r : rows) {
        out += std::to_string(r.episode) + ',' + std::to_string(r.rsu) + ',' + std::string(to_string(r.category)) +
               ',' + detail::fmt9(r.mean_latency_s) + ',' + detail::fmt9(r.throughput_bps) + ',' +
               detail::fmt9(r.jain) + ',' + detail::fmt9(r.reward_sum) + ',' + std::to_string(r.vehicles) + '\n';
    }
    return out;
}

/// Rows are written in the order given (run_training emits them sorted by
/// episode, RSU, category).
inline void write_csv(std::span<const SummaryRow> rows, const std::string& path) {
    auto f = detail::open_for_write(path);
    f << metrics_csv(rows);
    if (!f) throw std::runtime_error("failed writing '" + path + "'");
}

inline constexpr std::string_view kTimeseriesCsvHeader =
    "episode,window_start_s,rsu,category,mean_latency_s,throughput_bps,samples";

inline void append_timeseries_rows(std::string& out, const MetricsLedger& l) {
    for (const auto& [key, w] : l.windows()) {
        const auto [window, rsu, cat] = key;
        const double mean = w.samples ? w.latency_sum / static_cast<double>(w.samples)
                                      : std::numeric_limits<double>::quiet_NaN();
        out += std::to_string(l.episode()) + ',' + detail::fmt9(static_cast<double>(window) * l.window_s()) + ',' +
               std::to_string(rsu) + ',' + std::string(to_string(kAllCategories[cat])) + ',' + detail::fmt9(mean) +
               ',' + detail::fmt9(w.bits / l.window_s()) + ',' + std::to_string(w.samples) + '\n';
    }
}

inline std::string timeseries_csv(std::span<const MetricsLedger> ledgers) {
    std::string out(kTimeseriesCsvHeader);
    out += '\n';
    for (const auto& l : ledgers) append_timeseries_rows(out, l);
    return out;
}

}  // namespace vanetqos
