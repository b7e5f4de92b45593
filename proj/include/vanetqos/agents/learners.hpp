#pragma once

// Tabular Q-learning, DQN and online actor-critic, each usable through the
// common Learner interface the simulator drives.

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "vanetqos/agents/mlp.hpp"
#include "vanetqos/agents/replay_buffer.hpp"
#include "vanetqos/agents/state.hpp"
#include "vanetqos/domain.hpp"
#include "vanetqos/rng.hpp"

namespace vanetqos {

enum class LearnerKind { TabularQ, Dqn, ActorCritic };

constexpr std::string_view to_string(LearnerKind k) noexcept {
    switch (k) {
        case LearnerKind::TabularQ: return "q";
        case LearnerKind::Dqn: return "dqn";
        case LearnerKind::ActorCritic: return "ac";
    }
    return "?";
}

inline std::optional<LearnerKind> parse_learner_kind(std::string_view s) {
    if (s == "q") return LearnerKind::TabularQ;
    if (s == "dqn") return LearnerKind::Dqn;
    if (s == "ac") return LearnerKind::ActorCritic;
    return std::nullopt;
}

// ---------------------------------------------------------------------------
// Tabular Q-learning

struct QTable {
    std::size_t actions = 8;
    std::vector<double> values = std::vector<double>(DiscreteState::kCount * 8, 0.0);

    QTable() = default;
    explicit QTable(std::size_t action_count)
        : actions(action_count), values(DiscreteState::kCount * action_count, 0.0) {}

    std::span<double> row(const DiscreteState& s) { return {values.data() + s.flat() * actions, actions}; }
    std::span<const double> row(const DiscreteState& s) const {
        return {values.data() + s.flat() * actions, actions};
    }
    double& at(const DiscreteState& s, Action a) { return row(s)[a.slot()]; }
    double at(const DiscreteState& s, Action a) const { return row(s)[a.slot()]; }

    friend bool operator==(const QTable&, const QTable&) = default;
};

struct DiscreteTransition {
    DiscreteState state;
    Action action;
    double reward = 0.0;
    DiscreteState next_state;
    bool terminal = false;
};

/// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') * (1 - terminal) - Q(s,a)).
/// Returns the TD error.
inline double q_update(QTable& table, const DiscreteTransition& t, double alpha, double gamma) {
    double bootstrap = 0.0;
    if (!t.terminal) {
        auto next = table.row(t.next_state);
        bootstrap = *std::max_element(next.begin(), next.end());
    }
    double& q = table.at(t.state, t.action);
    const double td = t.reward + gamma * bootstrap - q;
    q += alpha * td;
    if (!std::isfinite(q)) throw NumericalError("q-table entry became non-finite");
    return td;
}

// ---------------------------------------------------------------------------
// DQN

struct DqnAgent {
    Mlp online;
    Mlp target;
    ReplayBuffer buffer;
    std::size_t train_steps = 0;
    std::size_t sync_period = 100;

    void sync_target() { target = online; }
};

inline double dqn_target(double reward, double gamma, double max_next_q, bool terminal) {
    return reward + (terminal ? 0.0 : gamma * max_next_q);
}

/// One gradient-descent step on (1/K) sum (y_i - Q(s_i, a_i))^2 with targets
/// from the frozen target network. Returns the loss before the update. The
/// target network is re-synced every `sync_period` steps.
inline double dqn_train_step(DqnAgent& agent, std::span<const Transition> batch, double alpha, double gamma,
                             const RlHyperparams& enc = {}) {
    const double k = static_cast<double>(batch.size());
    std::vector<double> grad(agent.online.params().size(), 0.0);
    std::vector<double> upstream(agent.online.outputs(), 0.0);
    double loss = 0.0;
    for (const auto& t : batch) {
        const auto next_x = encode(t.next_state, enc);
        const auto next_q = agent.target.predict(next_x);
        const double y = dqn_target(t.reward, gamma, *std::max_element(next_q.begin(), next_q.end()), t.terminal);
        const auto x = encode(t.state, enc);
        const auto cache = agent.online.forward(x);
        const double err = y - cache.output[t.action.slot()];
        loss += err * err / k;
        std::fill(upstream.begin(), upstream.end(), 0.0);
        upstream[t.action.slot()] = -2.0 * err / k;
        agent.online.accumulate_gradients(cache, upstream, grad);
    }
    if (!std::isfinite(loss)) throw NumericalError("dqn loss is not finite");
    agent.online.apply(grad, -alpha);
    ++agent.train_steps;
    if (agent.train_steps % agent.sync_period == 0) agent.sync_target();
    return loss;
}

/// Samples a batch and trains; nullopt while the buffer holds fewer than
/// `batch_size` transitions.
inline std::optional<double> dqn_train_from_buffer(DqnAgent& agent, std::size_t batch_size, double alpha,
                                                   double gamma, Rng& replay_rng, const RlHyperparams& enc = {}) {
    if (agent.buffer.size() < batch_size) return std::nullopt;
    const auto batch = agent.buffer.sample(batch_size, replay_rng);
    return dqn_train_step(agent, batch, alpha, gamma, enc);
}

// ---------------------------------------------------------------------------
// Actor-critic

struct ActorCriticAgent {
    Mlp actor;   // logits over actions
    Mlp critic;  // scalar state value
};

struct AcGradients {
    double delta = 0.0;
    std::vector<double> actor;   // ascent direction: grad log pi(a|s) * delta
    std::vector<double> critic;  // descent direction: grad of delta^2 w.r.t. phi
};

inline std::vector<double> policy(const ActorCriticAgent& agent, std::span<const double> x) {
    return softmax(agent.actor.predict(x));
}

/// delta = r + gamma V(s') (1 - terminal) - V(s). The critic gradient treats
/// the bootstrapped target as a constant.
inline AcGradients ac_gradients(const ActorCriticAgent& agent, const Transition& t, double gamma,
                                const RlHyperparams& enc = {}) {
    const auto x = encode(t.state, enc);
    const auto critic_cache = agent.critic.forward(x);
    const double v_next = t.terminal ? 0.0 : agent.critic.predict(encode(t.next_state, enc))[0];
    AcGradients g;
    g.delta = t.reward + gamma * v_next - critic_cache.output[0];
    if (!std::isfinite(g.delta))
        throw NumericalError("actor-critic TD error is not finite (reward=" + std::to_string(t.reward) + ")");

    const auto actor_cache = agent.actor.forward(x);
    const auto pi = softmax(actor_cache.output);
    std::vector<double> upstream(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i)
        upstream[i] = g.delta * ((i == t.action.slot() ? 1.0 : 0.0) - pi[i]);
    g.actor = agent.actor.gradients(actor_cache, upstream);

    const double d_value = -2.0 * g.delta;
    g.critic = agent.critic.gradients(critic_cache, std::span<const double>(&d_value, 1));
    return g;
}

struct AcStepResult {
    double delta = 0.0;
    bool actor_updated = false;
    bool critic_updated = false;
};

/// theta += alpha * grad log pi(a|s) * delta;  phi -= alpha * grad delta^2.
inline AcStepResult ac_train_step(ActorCriticAgent& agent, const Transition& t, double alpha, double gamma,
                                  const RlHyperparams& enc = {}) {
    const auto g = ac_gradients(agent, t, gamma, enc);
    agent.actor.apply(g.actor, alpha);
    agent.critic.apply(g.critic, -alpha);
    return {g.delta, g.delta != 0.0, g.delta != 0.0};
}

// ---------------------------------------------------------------------------
// Learner interface

/// A decision maker owned by one RSU (or shared by all RSUs in single-agent
/// mode). Mutated only between simulation ticks.
class Learner {
public:
    Learner(RlHyperparams rl, std::uint64_t init_seed, std::uint64_t explore_seed)
        : rl_(std::move(rl)), init_seed_(init_seed), explore_(explore_seed) {}
    virtual ~Learner() = default;

    virtual LearnerKind kind() const noexcept = 0;
    /// `explore` false means greedy evaluation.
    virtual Action act(const StateObs& obs, bool explore) = 0;
    virtual void observe(const Transition& t) = 0;
    virtual std::unique_ptr<Learner> clone() const = 0;

    /// Gives a copy its own exploration/sampling stream.
    virtual void reseed(std::uint64_t seed) { explore_ = Rng(seed); }

    const RlHyperparams& hyperparams() const noexcept { return rl_; }
    std::uint64_t init_seed() const noexcept { return init_seed_; }
    std::uint64_t updates() const noexcept { return updates_; }
    void restore_update_count(std::uint64_t n) noexcept { updates_ = n; }

protected:
    RlHyperparams rl_;
    std::uint64_t init_seed_;
    Rng explore_;
    std::uint64_t updates_ = 0;
};

class QLearner final : public Learner {
public:
    QLearner(RlHyperparams rl, std::uint64_t init_seed, std::uint64_t explore_seed)
        : Learner(std::move(rl), init_seed, explore_seed), table_(rl_.action_count) {}

    LearnerKind kind() const noexcept override { return LearnerKind::TabularQ; }

    Action act(const StateObs& obs, bool explore) override {
        return select_epsilon_greedy(table_.row(discretize(obs, rl_)), explore ? rl_.epsilon : 0.0, explore_);
    }

    void observe(const Transition& t) override {
        q_update(table_, {discretize(t.state, rl_), t.action, t.reward, discretize(t.next_state, rl_), t.terminal},
                 rl_.alpha, rl_.gamma);
        ++updates_;
    }

    std::unique_ptr<Learner> clone() const override { return std::make_unique<QLearner>(*this); }

    QTable& table() noexcept { return table_; }
    const QTable& table() const noexcept { return table_; }

private:
    QTable table_;
};

class DqnLearner final : public Learner {
public:
    DqnLearner(RlHyperparams rl, std::uint64_t init_seed, std::uint64_t explore_seed)
        : Learner(std::move(rl), init_seed, explore_seed), replay_(splitmix64(explore_seed)) {
        Rng init(init_seed);
        agent_.online = Mlp::random(kEncodedStateSize, rl_.hidden_neurons, rl_.action_count, init);
        agent_.target = agent_.online;
        agent_.buffer = ReplayBuffer(rl_.buffer_capacity);
        agent_.sync_period = rl_.target_sync_period;
    }

    LearnerKind kind() const noexcept override { return LearnerKind::Dqn; }

    Action act(const StateObs& obs, bool explore) override {
        const auto q = agent_.online.predict(encode(obs, rl_));
        return select_epsilon_greedy(q, explore ? rl_.epsilon : 0.0, explore_);
    }

    void observe(const Transition& t) override {
        agent_.buffer.push(t);
        if (dqn_train_from_buffer(agent_, rl_.batch_size, rl_.alpha, rl_.gamma, replay_, rl_)) ++updates_;
    }

    void reseed(std::uint64_t seed) override {
        Learner::reseed(seed);
        replay_ = Rng(splitmix64(seed));
    }

    std::unique_ptr<Learner> clone() const override { return std::make_unique<DqnLearner>(*this); }

    DqnAgent& agent() noexcept { return agent_; }
    const DqnAgent& agent() const noexcept { return agent_; }

private:
    DqnAgent agent_;
    Rng replay_;
};

class ActorCriticLearner final : public Learner {
public:
    ActorCriticLearner(RlHyperparams rl, std::uint64_t init_seed, std::uint64_t explore_seed)
        : Learner(std::move(rl), init_seed, explore_seed) {
        Rng init(init_seed);
        agent_.actor = Mlp::random(kEncodedStateSize, rl_.hidden_neurons, rl_.action_count, init);
        agent_.critic = Mlp::random(kEncodedStateSize, rl_.hidden_neurons, 1, init);
    }

    LearnerKind kind() const noexcept override { return LearnerKind::ActorCritic; }

    /// Samples from the policy while training; greedy otherwise.
    Action act(const StateObs& obs, bool explore) override {
        const auto pi = policy(agent_, encode(obs, rl_));
        if (!explore) return Action::from_slot(argmax(pi));
        double u = explore_.uniform();
        for (std::size_t i = 0; i < pi.size(); ++i) {
            if (u < pi[i]) return Action::from_slot(i);
            u -= pi[i];
        }
        return Action::from_slot(pi.size() - 1);
    }

    void observe(const Transition& t) override {
        ac_train_step(agent_, t, rl_.alpha, rl_.gamma, rl_);
        ++updates_;
    }

    std::unique_ptr<Learner> clone() const override { return std::make_unique<ActorCriticLearner>(*this); }

    ActorCriticAgent& agent() noexcept { return agent_; }
    const ActorCriticAgent& agent() const noexcept { return agent_; }

private:
    ActorCriticAgent agent_;
};

inline std::unique_ptr<Learner> make_learner(LearnerKind kind, const RlHyperparams& rl, std::uint64_t init_seed,
                                             std::uint64_t explore_seed) {
    switch (kind) {
        case LearnerKind::TabularQ: return std::make_unique<QLearner>(rl, init_seed, explore_seed);
        case LearnerKind::Dqn: return std::make_unique<DqnLearner>(rl, init_seed, explore_seed);
        case LearnerKind::ActorCritic: return std::make_unique<ActorCriticLearner>(rl, init_seed, explore_seed);
    }
    return nullptr;
}

}  // namespace vanetqos
