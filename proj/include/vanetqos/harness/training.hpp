#pragma once

// Multi-episode runs with persistent learner state, model transfer and the
// on-disk outputs of a run.

#include <array>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include "vanetqos/agents/model_io.hpp"
#include "vanetqos/config_io.hpp"
#include "vanetqos/harness/simulation.hpp"

namespace vanetqos {

/// Headline numbers of one episode.
struct EpisodeKpi {
    std::size_t episode = 0;
    double reward_sum = 0.0;
    std::size_t transitions = 0;
    double mean_latency_s = 0.0;                              // pooled over all samples
    std::array<double, kCategoryCount> category_latency_s{};  // NaN when absent
    std::array<double, kCategoryCount> category_throughput_bps{};
};

struct TrainingOptions {
    const Learner* pretrained = nullptr;  // copied into every agent when set
    bool learn = true;                    // false: greedy evaluation, no updates
};

struct TrainingResult {
    std::vector<SummaryRow> rows;
    std::vector<EpisodeKpi> episodes;
    std::string timeseries_rows;  // CSV body without header
    std::vector<std::unique_ptr<Learner>> learners;
    EpisodeStats totals;

    std::vector<double> reward_curve() const {
        std::vector<double> r;
        for (const auto& e : episodes) r.push_back(e.reward_sum);
        return r;
    }
};

/// Learners for a scenario: none for baselines, one for a single agent, one
/// per RSU for multi-agent. A pretrained learner is cloned into every slot and
/// each clone gets its own exploration stream.
inline std::vector<std::unique_ptr<Learner>> make_learners(const Scenario& s, const SimConfig& cfg,
                                                           std::uint64_t seed, const Learner* pretrained = nullptr) {
    std::vector<std::unique_ptr<Learner>> out;
    if (!uses_learner(s.mode)) return out;
    const std::size_t count = s.mode == AgentMode::MultiAgent ? cfg.rsu_positions_m.size() : 1;
    for (std::size_t r = 0; r < count; ++r) {
        if (pretrained) {
            auto copy = pretrained->clone();
            copy->reseed(stream_seed(seed, Stream::Exploration, r));
            out.push_back(std::move(copy));
        } else {
            out.push_back(make_learner(s.learner, cfg.rl, stream_seed(seed, Stream::Init, r),
                                       stream_seed(seed, Stream::Exploration, r)));
        }
    }
    return out;
}

/// Per-RSU learner slots (shared pointer repeated for a single agent).
inline std::vector<Learner*> learner_slots(const std::vector<std::unique_ptr<Learner>>& learners,
                                           std::size_t rsu_count) {
    std::vector<Learner*> slots;
    if (learners.empty()) return slots;
    for (std::size_t r = 0; r < rsu_count; ++r) slots.push_back(learners.size() == 1 ? learners[0].get()
                                                                                     : learners[r].get());
    return slots;
}

inline EpisodeKpi kpi_of(const MetricsLedger& ledger) {
    EpisodeKpi k;
    k.episode = ledger.episode();
    k.reward_sum = ledger.reward_sum();
    k.transitions = ledger.transitions();
    k.mean_latency_s = ledger.mean_latency();
    for (auto c : kAllCategories) {
        k.category_latency_s[index_of(c)] = ledger.mean_latency(c);
        k.category_throughput_bps[index_of(c)] = ledger.throughput(c);
    }
    return k;
}

/// Sequential episodes sharing learner state. `cfg.episodes == 0` runs a
/// single greedy evaluation episode of the (pretrained) learners.
inline TrainingResult run_training(const Scenario& scenario, const SimConfig& cfg, std::uint64_t seed,
                                   TrainingOptions opts = {}) {
    validate_config(cfg);
    TrainingResult result;
    result.learners = make_learners(scenario, cfg, seed, opts.pretrained);
    const auto slots = learner_slots(result.learners, cfg.rsu_positions_m.size());
    const bool eval_only = cfg.episodes == 0;
    const std::size_t episodes = eval_only ? 1 : cfg.episodes;
    for (std::size_t e = 0; e < episodes; ++e) {
        auto ep = run_episode(scenario, cfg, slots, seed, e, opts.learn && !eval_only);
        auto rows = episode_summary(ep.ledger);
        result.rows.insert(result.rows.end(), rows.begin(), rows.end());
        append_timeseries_rows(result.timeseries_rows, ep.ledger);
        result.episodes.push_back(kpi_of(ep.ledger));
        result.totals += ep.stats;
    }
    return result;
}

inline std::string rewards_csv(const TrainingResult& r) {
    std::string out = "episode,reward_sum,transitions,mean_latency_s\n";
    for (const auto& e : r.episodes)
        out += std::to_string(e.episode) + ',' + detail::fmt9(e.reward_sum) + ',' + std::to_string(e.transitions) +
               ',' + detail::fmt9(e.mean_latency_s) + '\n';
    return out;
}

/// Writes metrics.csv, timeseries.csv, rewards.csv, model file(s) and
/// manifest.txt into `dir`. Returns the model paths written.
inline std::vector<std::string> write_run_outputs(const std::string& dir, const TrainingResult& r,
                                                  const Scenario& scenario, const SimConfig& cfg,
                                                  std::uint64_t seed) {
    namespace fs = std::filesystem;
    fs::create_directories(dir);
    auto write_text = [](const fs::path& p, const std::string& text) {
        auto f = detail::open_for_write(p.string());
        f << text;
        if (!f) throw std::runtime_error("failed writing '" + p.string() + "'");
    };
    write_csv(r.rows, (fs::path(dir) / "metrics.csv").string());
    write_text(fs::path(dir) / "timeseries.csv", std::string(kTimeseriesCsvHeader) + "\n" + r.timeseries_rows);
    write_text(fs::path(dir) / "rewards.csv", rewards_csv(r));

    std::vector<std::string> models;
    for (std::size_t i = 0; i < r.learners.size(); ++i) {
        const auto name = r.learners.size() == 1 ? std::string("model.txt") : "model_rsu" + std::to_string(i) + ".txt";
        const auto path = (fs::path(dir) / name).string();
        save_model(*r.learners[i], path);
        models.push_back(path);
    }

    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    std::string manifest = "scenario = " + scenario.name + "\n";
    manifest += "learner = " + std::string(to_string(scenario.learner)) + "\n";
    manifest += "seed = " + std::to_string(seed) + "\n";
    manifest += "episodes = " + std::to_string(r.episodes.size()) + "\n";
    manifest += "config_hash = " + std::string(hash) + "\n";
    manifest += "--- config ---\n" + serialize_config(cfg);
    write_text(fs::path(dir) / "manifest.txt", manifest);
    return models;
}

}  // namespace vanetqos
