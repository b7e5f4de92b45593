#pragma once

// Command-line front end: train, eval, baseline, validate-config.
// Exit codes: 0 success, 1 configuration/usage error, 2 runtime failure.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "vanetqos/agents/model_io.hpp"
#include "vanetqos/config_io.hpp"
#include "vanetqos/harness/training.hpp"

namespace vanetqos {

namespace detail {

struct CliOptions {
    std::string config = "default";
    std::string scenario = "single-rsu";
    std::string learner = "q";
    std::optional<std::size_t> episodes;
    std::optional<std::uint64_t> seed;
    std::string out;
    std::string model;
    std::string baseline = "no-wait";
};

inline std::string join(const std::vector<std::string>& xs) {
    std::string s;
    for (const auto& x : xs) s += (s.empty() ? "" : ", ") + x;
    return s;
}

inline std::string fixed(double v, int prec) {
    if (std::isnan(v)) return "-";
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

inline void print_summary(std::ostream& out, const TrainingResult& r) {
    char line[200];
    std::snprintf(line, sizeof line, "%7s %14s %6s %12s %12s %12s\n", "episode", "reward_sum", "trans", "latency_s",
                  "hdmap_lat_s", "hdmap_Mbps");
    out << line;
    for (const auto& e : r.episodes) {
        const auto hd = index_of(ServiceCategory::HDMAP);
        std::snprintf(line, sizeof line, "%7zu %14s %6zu %12s %12s %12s\n", e.episode, fixed(e.reward_sum, 2).c_str(),
                      e.transitions, fixed(e.mean_latency_s, 4).c_str(), fixed(e.category_latency_s[hd], 4).c_str(),
                      fixed(e.category_throughput_bps[hd] / 1e6, 3).c_str());
        out << line;
    }
    out << "decisions " << r.totals.decisions << ", transitions " << r.totals.transitions << ", wait violations "
        << r.totals.wait_violations << "\n";
}

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline SimConfig load_cli_config(const CliOptions& o) {
    SimConfig cfg = validate_config(load_config_file(o.config));
    if (o.seed) cfg.seed = *o.seed;
    return cfg;
}

inline Scenario cli_scenario(const CliOptions& o, const SimConfig& cfg) {
    auto s = make_scenario(o.scenario);
    if (!s) throw UsageError("unknown scenario '" + o.scenario + "' (options: " + join(scenario_names()) + ")");
    s->profile_set = cfg.profile_set;
    s->episodes = o.episodes.value_or(cfg.episodes);
    if (const auto problems = scenario_problems(*s); !problems.empty()) throw UsageError(join(problems));
    return *s;
}

inline SimConfig scenario_config(const SimConfig& cfg, const Scenario& s) {
    SimConfig c = apply_scenario(cfg, s);
    c.profiles = cfg.profiles;  // keep per-category overrides from the config file
    return validate_config(c);
}

inline void finish_run(std::ostream& out, const CliOptions& o, const TrainingResult& r, const Scenario& s,
                       const SimConfig& cfg) {
    print_summary(out, r);
    if (o.out.empty()) return;
    const auto models = write_run_outputs(o.out, r, s, cfg, cfg.seed);
    out << "wrote " << o.out << " (" << models.size() << " model file" << (models.size() == 1 ? "" : "s") << ")\n";
}

inline int run_train(const CliOptions& o, std::ostream& out) {
    const SimConfig base = load_cli_config(o);
    Scenario s = cli_scenario(o, base);
    s.learner = *parse_learner_kind(o.learner);
    const SimConfig cfg = scenario_config(base, s);
    std::unique_ptr<Learner> pretrained;
    if (!o.model.empty()) {
        pretrained = load_model(o.model, cfg.rl, stream_seed(cfg.seed, Stream::Exploration, 0));
        s.learner = pretrained->kind();
    }
    const auto r = run_training(s, cfg, cfg.seed, {pretrained.get(), true});
    finish_run(out, o, r, s, cfg);
    return 0;
}

inline int run_eval(const CliOptions& o, std::ostream& out) {
    if (o.model.empty()) throw UsageError("eval needs --model PATH");
    const SimConfig base = load_cli_config(o);
    Scenario s = cli_scenario(o, base);
    if (!o.episodes) s.episodes = 1;
    const SimConfig cfg = scenario_config(base, s);
    auto model = load_model(o.model, cfg.rl, stream_seed(cfg.seed, Stream::Exploration, 0));
    s.learner = model->kind();
    const auto r = run_training(s, cfg, cfg.seed, {model.get(), false});
    finish_run(out, o, r, s, cfg);
    return 0;
}

inline int run_baseline(const CliOptions& o, std::ostream& out) {
    static const std::map<std::string, AgentMode> modes{{"no-wait", AgentMode::BaselineNoWait},
                                                        {"static-priority", AgentMode::BaselineStaticPriority},
                                                        {"fixed-wait", AgentMode::FixedWait}};
    const SimConfig base = load_cli_config(o);
    Scenario s = cli_scenario(o, base);
    s.mode = modes.at(o.baseline);
    s.name += "/" + o.baseline;
    const SimConfig cfg = scenario_config(base, s);
    const auto r = run_training(s, cfg, cfg.seed);
    finish_run(out, o, r, s, cfg);
    return 0;
}

inline int run_validate(const CliOptions& o, std::ostream& out) {
    const SimConfig cfg = validate_config(load_config_file(o.config));
    char hash[24];
    std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(config_hash(cfg)));
    out << "config ok: " << o.config << " (hash " << hash << ")\n";
    return 0;
}

}  // namespace detail

/// Runs the command line given without the program name.
inline int cli_main(const std::vector<std::string>& args, std::ostream& out = std::cout,
                    std::ostream& err = std::cerr) {
    detail::CliOptions o;
    CLI::App app{"Waiting-time QoS control for roadside units"};
    app.name("vanetqos");
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "config file, or 'default'");
        sub->add_option("--scenario", o.scenario, "single-rsu | multi-rsu | multi-rsu-shared");
        sub->add_option("--episodes", o.episodes, "number of episodes");
        sub->add_option("--seed", o.seed, "master seed");
        sub->add_option("--out", o.out, "output directory");
    };
    auto* train = app.add_subcommand("train", "train a learner");
    common(train);
    train->add_option("--learner", o.learner, "learning algorithm")->check(CLI::IsMember({"q", "dqn", "ac"}));
    train->add_option("--model", o.model, "start from a saved model");
    auto* eval = app.add_subcommand("eval", "greedy evaluation of a saved model");
    common(eval);
    eval->add_option("--model", o.model, "saved model")->required();
    auto* baseline = app.add_subcommand("baseline", "run a non-learning comparator");
    common(baseline);
    baseline->add_option("--baseline", o.baseline, "comparator")
        ->check(CLI::IsMember({"no-wait", "static-priority", "fixed-wait"}));
    auto* validate = app.add_subcommand("validate-config", "check a config file");
    validate->add_option("--config", o.config, "config file, or 'default'");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }

    try {
        if (*train) return detail::run_train(o, out);
        if (*eval) return detail::run_eval(o, out);
        if (*baseline) return detail::run_baseline(o, out);
        return detail::run_validate(o, out);
    } catch (const ConfigError& e) {
        err << e.what() << "\n";
        return 1;
    } catch (const detail::UsageError& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        err << "runtime error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace vanetqos
