#pragma once

// Plain-text model files:
//
//   vanetqos-model 1
//   kind <tabular-q|dqn|actor-critic>
//   dims <d0> <d1> [<d2>]
//   seed <init seed>
//   steps <train steps>
//   section <name> <value count>
//   <values, 8 per line, %.17g>
//   ...
//   end
//
// Values are written with 17 significant digits so load(save(m)) == m and
// save(load(save(m))) is byte-identical to save(m).

#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "vanetqos/agents/learners.hpp"

namespace vanetqos {

class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

inline constexpr int kModelFormatVersion = 1;

namespace detail {

inline std::string_view model_kind_name(LearnerKind k) {
    switch (k) {
        case LearnerKind::TabularQ: return "tabular-q";
        case LearnerKind::Dqn: return "dqn";
        case LearnerKind::ActorCritic: return "actor-critic";
    }
    return "?";
}

inline void write_section(std::ostream& out, std::string_view name, std::span<const double> values) {
    out << "section " << name << ' ' << values.size() << '\n';
    char buf[40];
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::snprintf(buf, sizeof buf, "%.17g", values[i]);
        out << buf << ((i % 8 == 7 || i + 1 == values.size()) ? '\n' : ' ');
    }
}

inline std::vector<double> read_section(std::istream& in, std::string_view name) {
    std::string tag, got;
    std::size_t count = 0;
    if (!(in >> tag >> got >> count) || tag != "section" || got != name)
        throw ModelError("malformed model file: expected section '" + std::string(name) + "'");
    std::vector<double> values(count);
    for (auto& v : values) {
        std::string tok;
        if (!(in >> tok)) throw ModelError("malformed model file: truncated section '" + std::string(name) + "'");
        char* end = nullptr;
        v = std::strtod(tok.c_str(), &end);
        if (end != tok.c_str() + tok.size() || !std::isfinite(v))
            throw ModelError("malformed model file: bad value '" + tok + "'");
    }
    return values;
}

inline void load_params(Mlp& net, const std::vector<double>& values) {
    if (values.size() != net.params().size()) throw ModelError("model dimension mismatch in network parameters");
    std::copy(values.begin(), values.end(), net.params().begin());
}

}  // namespace detail

inline void save_model(const Learner& learner, std::ostream& out) {
    const auto& rl = learner.hyperparams();
    out << "vanetqos-model " << kModelFormatVersion << '\n';
    out << "kind " << detail::model_kind_name(learner.kind()) << '\n';
    switch (learner.kind()) {
        case LearnerKind::TabularQ: {
            const auto& q = static_cast<const QLearner&>(learner);
            out << "dims " << DiscreteState::kCount << ' ' << q.table().actions << '\n';
            out << "seed " << learner.init_seed() << '\n';
            out << "steps " << learner.updates() << '\n';
            detail::write_section(out, "q", q.table().values);
            break;
        }
        case LearnerKind::Dqn: {
            const auto& d = static_cast<const DqnLearner&>(learner);
            out << "dims " << kEncodedStateSize << ' ' << rl.hidden_neurons << ' ' << rl.action_count << '\n';
            out << "seed " << learner.init_seed() << '\n';
            out << "steps " << d.agent().train_steps << '\n';
            detail::write_section(out, "online", d.agent().online.params());
            detail::write_section(out, "target", d.agent().target.params());
            break;
        }
        case LearnerKind::ActorCritic: {
            const auto& a = static_cast<const ActorCriticLearner&>(learner);
            out << "dims " << kEncodedStateSize << ' ' << rl.hidden_neurons << ' ' << rl.action_count << '\n';
            out << "seed " << learner.init_seed() << '\n';
            out << "steps " << learner.updates() << '\n';
            detail::write_section(out, "actor", a.agent().actor.params());
            detail::write_section(out, "critic", a.agent().critic.params());
            break;
        }
    }
    out << "end\n";
}

inline void save_model(const Learner& learner, const std::string& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot write model file '" + path + "'");
    save_model(learner, f);
    if (!f) throw ModelError("failed writing model file '" + path + "'");
}

/// Reads a model; its dimensions must match `rl` (hidden size, action count).
/// The exploration stream is seeded with `explore_seed`.
inline std::unique_ptr<Learner> load_model(std::istream& in, const RlHyperparams& rl, std::uint64_t explore_seed) {
    std::string word, kind_name;
    int version = 0;
    if (!(in >> word >> version) || word != "vanetqos-model")
        throw ModelError("malformed model file: missing 'vanetqos-model' header");
    if (version != kModelFormatVersion)
        throw ModelError("unsupported model format version " + std::to_string(version));
    if (!(in >> word >> kind_name) || word != "kind") throw ModelError("malformed model file: missing kind");

    std::string dims_line;
    in >> word;
    if (word != "dims") throw ModelError("malformed model file: missing dims");
    std::getline(in, dims_line);
    std::istringstream dims_in(dims_line);
    std::vector<std::size_t> dims;
    for (std::size_t d; dims_in >> d;) dims.push_back(d);

    std::uint64_t seed = 0, steps = 0;
    if (!(in >> word >> seed) || word != "seed") throw ModelError("malformed model file: missing seed");
    if (!(in >> word >> steps) || word != "steps") throw ModelError("malformed model file: missing steps");

    std::unique_ptr<Learner> learner;
    if (kind_name == "tabular-q") {
        if (dims != std::vector<std::size_t>{DiscreteState::kCount, rl.action_count})
            throw ModelError("model dimension mismatch: tabular model does not match " +
                             std::to_string(DiscreteState::kCount) + "x" + std::to_string(rl.action_count));
        auto q = std::make_unique<QLearner>(rl, seed, explore_seed);
        auto values = detail::read_section(in, "q");
        if (values.size() != q->table().values.size()) throw ModelError("model dimension mismatch in q table");
        q->table().values = std::move(values);
        learner = std::move(q);
    } else if (kind_name == "dqn" || kind_name == "actor-critic") {
        if (dims != std::vector<std::size_t>{kEncodedStateSize, rl.hidden_neurons, rl.action_count})
            throw ModelError("model dimension mismatch: network is not " + std::to_string(kEncodedStateSize) + "x" +
                             std::to_string(rl.hidden_neurons) + "x" + std::to_string(rl.action_count));
        if (kind_name == "dqn") {
            auto d = std::make_unique<DqnLearner>(rl, seed, explore_seed);
            detail::load_params(d->agent().online, detail::read_section(in, "online"));
            detail::load_params(d->agent().target, detail::read_section(in, "target"));
            d->agent().train_steps = steps;
            learner = std::move(d);
        } else {
            auto a = std::make_unique<ActorCriticLearner>(rl, seed, explore_seed);
            detail::load_params(a->agent().actor, detail::read_section(in, "actor"));
            detail::load_params(a->agent().critic, detail::read_section(in, "critic"));
            learner = std::move(a);
        }
    } else {
        throw ModelError("malformed model file: unknown kind '" + kind_name + "'");
    }
    if (!(in >> word) || word != "end") throw ModelError("malformed model file: missing end marker");
    learner->restore_update_count(steps);
    return learner;
}

inline std::unique_ptr<Learner> load_model(const std::string& path, const RlHyperparams& rl,
                                           std::uint64_t explore_seed) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ModelError("cannot read model file '" + path + "'");
    return load_model(f, rl, explore_seed);
}

}  // namespace vanetqos
