#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "vanetqos/metrics.hpp"
#include "vanetqos/rng.hpp"

using namespace vanetqos;

namespace {

Vehicle make(std::uint64_t id, ServiceCategory c, Phase phase = Phase::Active) {
    Vehicle v;
    v.id = id;
    v.category = c;
    v.phase = phase;
    v.assoc_rsu = 0;
    return v;
}

TickOutcome outcome(std::vector<double> bits, std::vector<double> delay) {
    TickOutcome o;
    o.drained_bits = std::move(bits);
    o.queue_delay_s = std::move(delay);
    o.allocated_rate_bps.assign(o.drained_bits.size(), 0.0);
    return o;
}

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    std::stringstream s;
    s << f.rdbuf();
    return s.str();
}

MetricsLedger full_episode(std::size_t episode) {
    MetricsLedger l(episode, 1, 10.0);
    std::vector<Vehicle> vs;
    for (std::size_t i = 0; i < 4; ++i) vs.push_back(make(i, kAllCategories[i]));
    std::vector<Vehicle*> p;
    for (auto& v : vs) p.push_back(&v);
    l.record_tick(0, outcome({1e5, 2e5, 3e5, 4e5}, {0.01, 0.02, 0.03, 0.04}), p, 0.1, 0.1);
    l.add_reward(0, -1.5);
    return l;
}

}  // namespace

TEST(Jain, Examples) {
    EXPECT_NEAR(jain_index(std::vector<double>{1, 1, 1, 1}), 1.0, 1e-12);
    EXPECT_NEAR(jain_index(std::vector<double>{1, 0, 0, 0}), 0.25, 1e-12);
    EXPECT_NEAR(jain_index(std::vector<double>{4, 2}), 0.9, 1e-12);
}

TEST(Jain, InvalidInputs) {
    EXPECT_THROW(jain_index(std::vector<double>{}), std::invalid_argument);
    EXPECT_THROW(jain_index(std::vector<double>{0, 0}), std::invalid_argument);
    EXPECT_THROW(jain_index(std::vector<double>{1, -1}), std::invalid_argument);
}

TEST(Jain, BoundsAndScaleInvariance) {
    Rng rng(3);
    for (int trial = 0; trial < 2000; ++trial) {
        std::vector<double> x(1 + rng.index(20));
        for (auto& v : x) v = rng.bernoulli(0.3) ? 0.0 : rng.uniform(0.0, 1e6);
        x[0] = rng.uniform(1.0, 10.0);
        const double j = jain_index(x);
        const double n = static_cast<double>(x.size());
        ASSERT_GE(j, 1.0 / n - 1e-12);
        ASSERT_LE(j, 1.0 + 1e-12);
        auto scaled = x;
        const double c = rng.uniform(1e-3, 1e3);
        for (auto& v : scaled) v *= c;
        ASSERT_NEAR(jain_index(scaled), j, 1e-12);
    }
}

TEST(RecordTick, SamplesOnlyForActiveVehicles) {
    MetricsLedger l(0, 1, 60.0);
    auto waiting = make(1, ServiceCategory::VI, Phase::Waiting);
    Vehicle* p[] = {&waiting};
    record_tick(l, 0, outcome({0.0}, {0.3}), p, 0.1, 0.1);
    EXPECT_TRUE(std::isnan(l.mean_latency(ServiceCategory::VI)));
    EXPECT_TRUE(l.rsus()[0].categories[index_of(ServiceCategory::VI)].latency_samples.empty());

    auto v = make(2, ServiceCategory::VI);
    Vehicle* q[] = {&v};
    record_tick(l, 0, outcome({1e5}, {0.05}), q, 0.2, 0.1);
    const auto& samples = l.rsus()[0].categories[index_of(ServiceCategory::VI)].latency_samples;
    ASSERT_EQ(samples.size(), 1u);
    EXPECT_EQ(samples[0], 0.05);
    record_tick(l, 0, outcome({1e5}, {0.07}), q, 0.3, 0.1);
    EXPECT_EQ(samples.size(), 2u);
}

TEST(Summary, ThroughputOfOneVehicle) {
    MetricsLedger l(0, 1, 1.0);
    auto v = make(1, ServiceCategory::HDMAP);
    Vehicle* p[] = {&v};
    for (int k = 1; k <= 10; ++k) l.record_tick(0, outcome({1.25e5}, {0.01}), p, k * 0.1, 0.1);
    const auto rows = episode_summary(l);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_EQ(rows[0].category, ServiceCategory::HDMAP);
    EXPECT_NEAR(rows[0].throughput_bps, 1.25e6, 1e-6);
    EXPECT_NEAR(rows[0].mean_latency_s, 0.01, 1e-15);
    EXPECT_NEAR(l.throughput(ServiceCategory::HDMAP), 1.25e6, 1e-6);
}

TEST(Summary, AbsentCategoryHasNoRow) {
    MetricsLedger l(0, 1, 1.0);
    auto v = make(1, ServiceCategory::BE);
    Vehicle* p[] = {&v};
    l.record_tick(0, outcome({1.0}, {0.5}), p, 0.1, 0.1);
    for (const auto& r : episode_summary(l)) EXPECT_NE(r.category, ServiceCategory::VO);
    EXPECT_TRUE(std::isnan(l.mean_latency(ServiceCategory::VO)));
}

TEST(Summary, EqualVehiclesAreFair) {
    MetricsLedger l(0, 1, 1.0);
    auto a = make(1, ServiceCategory::VI), b = make(2, ServiceCategory::VI);
    Vehicle* p[] = {&a, &b};
    l.record_tick(0, outcome({5e4, 5e4}, {0.1, 0.1}), p, 0.1, 0.1);
    const auto rows = episode_summary(l);
    ASSERT_EQ(rows.size(), 1u);
    EXPECT_NEAR(rows[0].jain, 1.0, 1e-12);
    EXPECT_EQ(rows[0].vehicles, 2u);
}

TEST(Summary, RewardAndTransitionCount) {
    auto l = full_episode(0);
    l.add_reward(0, 0.5);
    EXPECT_EQ(l.reward_sum(), -1.0);
    EXPECT_EQ(l.transitions(), 2u);
    for (const auto& r : episode_summary(l)) EXPECT_EQ(r.reward_sum, -1.0);
}

TEST(Csv, EmptyRunIsHeaderOnly) {
    EXPECT_EQ(metrics_csv({}), std::string(kMetricsCsvHeader) + "\n");
    const auto path = (std::filesystem::temp_directory_path() / "vanetqos_empty.csv").string();
    write_csv({}, path);
    EXPECT_EQ(slurp(path), std::string(kMetricsCsvHeader) + "\n");
    std::filesystem::remove(path);
}

TEST(Csv, TwoEpisodesFourCategories) {
    std::vector<SummaryRow> rows;
    for (std::size_t e = 0; e < 2; ++e) {
        const auto r = episode_summary(full_episode(e));
        rows.insert(rows.end(), r.begin(), r.end());
    }
    const auto text = metrics_csv(rows);
    EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 9);
    EXPECT_EQ(text.substr(0, text.find('\n')), kMetricsCsvHeader);
}

TEST(Csv, PureFunctionOfLedger) {
    const auto a = episode_summary(full_episode(3));
    const auto b = episode_summary(full_episode(3));
    EXPECT_EQ(metrics_csv(a), metrics_csv(b));
    const MetricsLedger ledgers[] = {full_episode(3)};
    EXPECT_EQ(timeseries_csv(ledgers), timeseries_csv(ledgers));
}

TEST(Timeseries, WindowsKeyedByStart) {
    MetricsLedger l(0, 1, 12.0, 5.0);
    auto v = make(1, ServiceCategory::VO);
    Vehicle* p[] = {&v};
    for (int k = 1; k <= 120; ++k) l.record_tick(0, outcome({10.0}, {0.01}), p, k * 0.1, 0.1);
    EXPECT_EQ(l.windows().size(), 3u);
    const MetricsLedger ledgers[] = {l};
    const auto text = timeseries_csv(ledgers);
    EXPECT_NE(text.find("\n0,0,0,VO,0.01,"), std::string::npos);
    EXPECT_NE(text.find("\n0,10,0,VO,"), std::string::npos);
}
