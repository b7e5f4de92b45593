#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vanetqos/harness/cli.hpp"
#include "vanetqos/harness/training.hpp"

using namespace vanetqos;
namespace fs = std::filesystem;

namespace {

class SpyLearner final : public Learner {
public:
    SpyLearner() : Learner(RlHyperparams{}, 0, 0) {}
    LearnerKind kind() const noexcept override { return LearnerKind::TabularQ; }
    Action act(const StateObs&, bool) override {
        ++calls;
        return Action{3};
    }
    void observe(const Transition&) override { ++calls; }
    std::unique_ptr<Learner> clone() const override { return std::make_unique<SpyLearner>(*this); }
    int calls = 0;
};

SimConfig short_config(double duration = 30.0, std::size_t episodes = 3) {
    SimConfig cfg;
    cfg.episode_duration_s = duration;
    cfg.episodes = episodes;
    return cfg;
}

struct Run {
    Scenario scenario;
    SimConfig cfg;
    TrainingResult result;
};

Run train(const std::string& name, LearnerKind kind, std::uint64_t seed, SimConfig base = short_config()) {
    Scenario s = *make_scenario(name);
    s.learner = kind;
    s.episodes = base.episodes;
    const auto cfg = apply_scenario(base, s);
    return {s, cfg, run_training(s, cfg, seed)};
}

std::string model_text(const Learner& l) {
    std::ostringstream out;
    save_model(l, out);
    return out.str();
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("vanetqos_test_" + name);
    fs::remove_all(dir);
    return dir;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr) {
    std::ostringstream out, err;
    const int code = cli_main(args, out, err);
    if (out_text) *out_text = out.str();
    if (err_text) *err_text = err.str();
    return code;
}

}  // namespace

TEST(Episode, NoWaitBaselineNeverCallsLearner) {
    SpyLearner spy;
    Learner* slots[] = {&spy};
    Scenario s = *make_scenario("single-rsu");
    s.mode = AgentMode::BaselineNoWait;
    const auto cfg = apply_scenario(short_config(), s);
    const auto r = run_episode(s, cfg, slots, 1);
    EXPECT_EQ(spy.calls, 0);
    EXPECT_EQ(r.stats.learner_calls, 0u);
    EXPECT_EQ(r.stats.decisions, 0u);
    EXPECT_GT(r.ledger.total_bytes_delivered(), 0.0);
}

TEST(Episode, SpyCountsMatchStats) {
    SpyLearner spy;
    Learner* slots[] = {&spy};
    Scenario s = *make_scenario("single-rsu");
    const auto cfg = apply_scenario(short_config(), s);
    const auto r = run_episode(s, cfg, slots, 1);
    EXPECT_GT(spy.calls, 0);
    EXPECT_EQ(static_cast<std::size_t>(spy.calls), r.stats.learner_calls);
    EXPECT_EQ(r.stats.learner_calls, r.stats.decisions + r.stats.transitions);
}

TEST(Episode, EmptyRoadHasNoTransitions) {
    Scenario s = *make_scenario("single-rsu");
    auto cfg = apply_scenario(short_config(), s);
    cfg.entry_interval_s = cfg.episode_duration_s + 1.0;
    auto learner = make_learner(LearnerKind::TabularQ, cfg.rl, 1, 2);
    Learner* slots[] = {learner.get()};
    const auto r = run_episode(s, cfg, slots, 1);
    EXPECT_EQ(r.stats.transitions, 0u);
    EXPECT_EQ(r.stats.vehicles_spawned, 0u);
    EXPECT_EQ(r.ledger.transitions(), 0u);
}

TEST(Episode, SameSeedSameLedger) {
    Scenario s = *make_scenario("single-rsu");
    const auto cfg = apply_scenario(short_config(), s);
    auto a = make_learner(LearnerKind::TabularQ, cfg.rl, 1, 2);
    auto b = make_learner(LearnerKind::TabularQ, cfg.rl, 1, 2);
    Learner* sa[] = {a.get()};
    Learner* sb[] = {b.get()};
    EXPECT_TRUE(run_episode(s, cfg, sa, 5).ledger == run_episode(s, cfg, sb, 5).ledger);
}

TEST(Episode, DeparturesCloseTerminalTransitions) {
    Scenario s = *make_scenario("single-rsu");
    const auto cfg = apply_scenario(short_config(80.0), s);
    auto l = make_learner(LearnerKind::TabularQ, cfg.rl, 1, 2);
    Learner* slots[] = {l.get()};
    const auto r = run_episode(s, cfg, slots, 3);
    EXPECT_GT(r.stats.terminal_transitions, 0u);
    EXPECT_LT(r.stats.terminal_transitions, r.stats.transitions);
    EXPECT_EQ(r.stats.transitions, r.ledger.transitions());
}

TEST(Episode, ConservationPerEpisode) {
    const auto run = train("multi-rsu", LearnerKind::TabularQ, 4, short_config(60.0, 2));
    EXPECT_GT(run.result.totals.channel_drained_bits, 0.0);
    EXPECT_LE(run.result.totals.channel_drained_bits, run.result.totals.channel_capacity_bits);
}

TEST(Episode, SingleAndMultiAgentAgreeOnOneRsu) {
    Scenario single = *make_scenario("single-rsu");
    Scenario multi = single;
    multi.mode = AgentMode::MultiAgent;
    const auto cfg = apply_scenario(short_config(40.0, 3), single);
    EXPECT_FALSE(scenario_problems(multi).empty());  // rejected as a user-facing scenario
    const auto a = run_training(single, cfg, 9);
    const auto b = run_training(multi, cfg, 9);
    EXPECT_EQ(metrics_csv(a.rows), metrics_csv(b.rows));
    EXPECT_EQ(a.timeseries_rows, b.timeseries_rows);
    ASSERT_EQ(a.learners.size(), 1u);
    ASSERT_EQ(b.learners.size(), 1u);
    EXPECT_EQ(model_text(*a.learners[0]), model_text(*b.learners[0]));
}

TEST(Episode, WaitsRespectCategoryMaximum) {
    for (auto kind : {LearnerKind::TabularQ, LearnerKind::Dqn, LearnerKind::ActorCritic}) {
        const auto run = train("single-rsu", kind, 2, short_config(40.0, 2));
        EXPECT_GT(run.result.totals.decisions, 0u);
        EXPECT_EQ(run.result.totals.wait_violations, 0u) << to_string(kind);
    }
    Scenario s = *make_scenario("single-rsu");
    s.mode = AgentMode::FixedWait;
    const auto r = run_training(s, apply_scenario(short_config(40.0, 1), s), 2);
    EXPECT_GT(r.totals.decisions, 0u);
    EXPECT_EQ(r.totals.wait_violations, 0u);
}

TEST(Episode, StaticPriorityFavoursVoice) {
    Scenario equal = *make_scenario("single-rsu");
    equal.mode = AgentMode::BaselineNoWait;
    Scenario weighted = equal;
    weighted.mode = AgentMode::BaselineStaticPriority;
    const auto cfg = apply_scenario(short_config(60.0, 1), equal);
    const auto a = run_training(equal, cfg, 1);
    const auto b = run_training(weighted, cfg, 1);
    const auto vo = index_of(ServiceCategory::VO);
    EXPECT_LT(b.episodes[0].category_latency_s[vo], a.episodes[0].category_latency_s[vo]);
}

TEST(Training, DeterministicOutputs) {
    for (auto kind : {LearnerKind::TabularQ, LearnerKind::Dqn, LearnerKind::ActorCritic}) {
        const auto a = train("single-rsu", kind, 11);
        const auto b = train("single-rsu", kind, 11);
        const auto da = scratch("det_a"), db = scratch("det_b");
        write_run_outputs(da.string(), a.result, a.scenario, a.cfg, 11);
        write_run_outputs(db.string(), b.result, b.scenario, b.cfg, 11);
        for (const char* f : {"metrics.csv", "timeseries.csv", "rewards.csv", "model.txt", "manifest.txt"})
            EXPECT_EQ(slurp(da / f), slurp(db / f)) << f << " " << to_string(kind);
        fs::remove_all(da);
        fs::remove_all(db);
    }
}

TEST(Training, LearnerChoiceDoesNotPerturbTraffic) {
    const auto q = train("single-rsu", LearnerKind::TabularQ, 6, short_config(40.0, 1));
    const auto d = train("single-rsu", LearnerKind::Dqn, 6, short_config(40.0, 1));
    EXPECT_EQ(q.result.totals.vehicles_spawned, d.result.totals.vehicles_spawned);
}

TEST(Training, MultiAgentFromPretrainedWritesSevenModels) {
    const auto pre = train("single-rsu", LearnerKind::TabularQ, 3, short_config(30.0, 2));
    Scenario m = *make_scenario("multi-rsu");
    m.episodes = 10;
    const auto cfg = apply_scenario(short_config(20.0, 10), m);
    const auto r = run_training(m, cfg, 3, {pre.result.learners[0].get(), true});
    EXPECT_EQ(r.episodes.size(), 10u);
    ASSERT_EQ(r.learners.size(), 7u);
    const auto dir = scratch("multi");
    const auto models = write_run_outputs(dir.string(), r, m, cfg, 3);
    EXPECT_EQ(models.size(), 7u);
    for (const auto& p : models) EXPECT_TRUE(fs::exists(p));
    fs::remove_all(dir);
}

TEST(Training, ZeroEpisodesEvaluatesWithoutLearning) {
    const auto pre = train("single-rsu", LearnerKind::TabularQ, 3, short_config(30.0, 2));
    const auto before = model_text(*pre.result.learners[0]);
    Scenario s = *make_scenario("single-rsu");
    s.episodes = 0;
    const auto cfg = apply_scenario(short_config(30.0, 0), s);
    const auto r = run_training(s, cfg, 3, {pre.result.learners[0].get(), true});
    EXPECT_EQ(r.episodes.size(), 1u);
    EXPECT_GT(r.totals.decisions, 0u);
    EXPECT_EQ(model_text(*r.learners[0]), before);
    EXPECT_EQ(model_text(*pre.result.learners[0]), before);
}

TEST(Cli, ValidateDefault) {
    std::string out;
    EXPECT_EQ(cli({"validate-config", "--config", "default"}, &out), 0);
    EXPECT_NE(out.find("config ok"), std::string::npos);
}

TEST(Cli, ValidateRejectsBadFile) {
    const auto dir = scratch("badcfg");
    fs::create_directories(dir);
    std::ofstream(dir / "bad.cfg") << "sim.tick = 0\n";
    std::ofstream(dir / "typo.cfg") << "sim.tock = 1\n";
    std::string err;
    EXPECT_EQ(cli({"validate-config", "--config", (dir / "bad.cfg").string()}, nullptr, &err), 1);
    EXPECT_NE(err.find("tick"), std::string::npos);
    EXPECT_EQ(cli({"validate-config", "--config", (dir / "typo.cfg").string()}, nullptr, &err), 1);
    EXPECT_NE(err.find("sim.tock"), std::string::npos);
    EXPECT_EQ(cli({"validate-config", "--config", (dir / "missing.cfg").string()}), 1);
    fs::remove_all(dir);
}

TEST(Cli, TrainWritesOutputsThenEval) {
    const auto dir = scratch("cli_train");
    std::string out;
    ASSERT_EQ(cli({"train", "--learner", "q", "--scenario", "single-rsu", "--episodes", "5", "--seed", "7", "--out",
                   dir.string()},
                  &out),
              0);
    EXPECT_TRUE(fs::exists(dir / "metrics.csv"));
    EXPECT_TRUE(fs::exists(dir / "model.txt"));
    EXPECT_TRUE(fs::exists(dir / "manifest.txt"));
    EXPECT_NE(slurp(dir / "manifest.txt").find("seed = 7"), std::string::npos);
    EXPECT_NE(out.find("reward_sum"), std::string::npos);

    const auto eval_dir = dir / "eval";
    EXPECT_EQ(cli({"eval", "--model", (dir / "model.txt").string(), "--seed", "8", "--out", eval_dir.string()}), 0);
    EXPECT_EQ(slurp(eval_dir / "model.txt"), slurp(dir / "model.txt"));
    fs::remove_all(dir);
}

TEST(Cli, UnknownLearnerListsOptions) {
    std::string err;
    EXPECT_EQ(cli({"train", "--learner", "sarsa"}, nullptr, &err), 1);
    EXPECT_NE(err.find("q"), std::string::npos);
    EXPECT_NE(err.find("dqn"), std::string::npos);
    EXPECT_NE(err.find("ac"), std::string::npos);
}

TEST(Cli, UnknownScenarioListsOptions) {
    std::string err;
    EXPECT_EQ(cli({"train", "--scenario", "highway", "--episodes", "1"}, nullptr, &err), 1);
    EXPECT_NE(err.find("multi-rsu-shared"), std::string::npos);
}

TEST(Cli, MissingModelIsRuntimeError) {
    EXPECT_EQ(cli({"eval", "--model", "/nonexistent/model.txt"}), 2);
}

TEST(Cli, BaselineRuns) {
    std::string out;
    EXPECT_EQ(cli({"baseline", "--baseline", "static-priority", "--episodes", "1", "--seed", "2"}, &out), 0);
    EXPECT_NE(out.find("wait violations 0"), std::string::npos);
    EXPECT_EQ(cli({"baseline", "--baseline", "random"}), 1);
}

TEST(Cli, NoSubcommandIsUsageError) { EXPECT_EQ(cli({}), 1); }
