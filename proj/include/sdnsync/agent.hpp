#pragma once

// Double deep Q-learning agent: MLP Q-network, lagging target network,
// replay memory and the episodic training loop.

#include <cstdint>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdnsync/envcore.hpp"
#include "sdnsync/mlp.hpp"
#include "sdnsync/rng.hpp"

namespace sdnsync {

struct AgentConfig {
    double learning_rate = 0.01;
    int batch_size = 256;
    double gamma = 0.4;
    double epsilon_decay = 10.0;
    double soft_update = 0.01;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    int episodes = 300;
    bool use_double_q = true;
    std::vector<std::size_t> hidden = {128, 128};
    std::size_t replay_capacity = 40000;

    void validate() const;
    AdamConfig adam() const { return {learning_rate, beta1, beta2, adam_epsilon}; }
};

/// 1 / (1 + E / epsilon_decay)
double exploration_probability(double episode, double epsilon_decay);

class TrainingError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Minibatch of transitions, states stored row-major.
template <typename T>
struct TransitionBatch {
    std::size_t size = 0;
    std::vector<T> states;
    std::vector<std::size_t> actions;
    std::vector<T> rewards;
    std::vector<T> next_states;
};

/// Ring buffer of (s, a, r, phi); the oldest entry is overwritten first.
template <typename T>
class ReplayBuffer {
public:
    ReplayBuffer(std::size_t capacity, std::size_t state_dim);

    void push(std::span<const T> state, std::size_t action, T reward, std::span<const T> next_state);

    std::size_t size() const { return size_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t state_dim() const { return dim_; }
    std::uint64_t total_pushed() const { return pushed_; }

    /// Insertion serial number of the entry at slot `i` of the ring (0-based
    /// count of pushes before it).
    std::uint64_t serial_at(std::size_t i) const { return serial_.at(i); }

    /// `b` distinct entries chosen uniformly (Floyd's algorithm).
    void sample(Rng& rng, std::size_t b, TransitionBatch<T>& out);

    /// Copies slot indices into a batch.
    void gather(std::span<const std::size_t> slots, TransitionBatch<T>& out) const;

private:
    std::size_t capacity_;
    std::size_t dim_;
    std::size_t size_ = 0;
    std::size_t head_ = 0;
    std::uint64_t pushed_ = 0;
    std::vector<T> states_;
    std::vector<T> next_states_;
    std::vector<std::size_t> actions_;
    std::vector<T> rewards_;
    std::vector<std::uint64_t> serial_;
    std::vector<std::size_t> slots_;
    std::vector<unsigned char> taken_;
};

template <typename T>
class DdqnAgent {
public:
    DdqnAgent(std::size_t state_dim, std::size_t num_actions, AgentConfig cfg, std::uint64_t weight_seed);

    const AgentConfig& config() const { return cfg_; }
    Mlp<T>& main() { return main_; }
    const Mlp<T>& main() const { return main_; }
    Mlp<T>& target() { return target_; }
    const Mlp<T>& target() const { return target_; }
    AdamState<T>& adam_state() { return adam_; }
    const AdamState<T>& adam_state() const { return adam_; }

    void set_backend(kernels::Backend be) { backend_ = be; }

    std::vector<T> q_values(std::span<const T> state) const;

    /// argmax of the main network, lowest index on ties.
    std::size_t greedy_action(std::span<const T> state) const;

    /// Uniform action with probability P_eps, greedy otherwise. `explored`
    /// reports which branch ran.
    std::size_t select_action(std::span<const T> state, double episode, Rng& rng, bool* explored = nullptr) const;

    /// y_j = r_j + gamma * Q_target(phi_j, argmax_a Q_main(phi_j, a)) with
    /// double-Q, else r_j + gamma * max_a Q_target(phi_j, a).
    std::vector<T> td_targets(const TransitionBatch<T>& batch);

    /// Mean squared TD error against fixed targets and its gradient with
    /// respect to the main parameters.
    T loss_and_gradient(const TransitionBatch<T>& batch, std::span<const T> targets, std::vector<T>& grad);

    /// One Adam step on the batch; returns the loss before the step.
    T train_step(const TransitionBatch<T>& batch);

    void soft_update() { sdnsync::soft_update<T>(target_.parameters(), main_.parameters(), cfg_.soft_update); }

private:
    AgentConfig cfg_;
    Mlp<T> main_;
    Mlp<T> target_;
    AdamState<T> adam_;
    kernels::Backend backend_ = kernels::Backend::OpenMP;
    typename Mlp<T>::Workspace ws_;
    typename Mlp<T>::Workspace ws_next_;
    typename Mlp<T>::Workspace ws_target_;
    std::vector<T> grad_;
    std::vector<T> d_selected_;
    std::vector<std::size_t> next_actions_;
    mutable typename Mlp<T>::Workspace ws_single_;
};

using Agent = DdqnAgent<float>;

std::size_t argmax_lowest(std::span<const float> q);
std::size_t argmax_lowest(std::span<const double> q);

/// Everything needed to restore a trainer between episodes.
struct Checkpoint {
    int version = 1;
    std::vector<std::size_t> layer_sizes;
    std::vector<float> theta;
    std::vector<float> theta_target;
    AdamState<float> adam;
    std::string exploration_rng;
    std::string replay_rng;
    int episode = 0;

    friend bool operator==(const Checkpoint&, const Checkpoint&) = default;
};

void save_checkpoint(const Checkpoint& ck, const std::string& path);
Checkpoint load_checkpoint(const std::string& path);

std::string rng_state(const Rng& rng);
void set_rng_state(Rng& rng, const std::string& state);

struct EpisodeRecord {
    int episode = 0;
    int steps = 0;
    double r_sync_sum = 0.0;
    double r_place_sum = 0.0;
    double r_total_sum = 0.0;
    double app_metric = 0.0;  // mean spr_detect_rate or lb_loss over the episode
    int relocations = 0;
    double exploration = 0.0;

    double r_sync_mean() const { return steps ? r_sync_sum / steps : 0.0; }
    double r_place_mean() const { return steps ? r_place_sum / steps : 0.0; }
    double r_total_mean() const { return steps ? r_total_sum / steps : 0.0; }

    friend bool operator==(const EpisodeRecord&, const EpisodeRecord&) = default;
};

/// Name of the per-episode application metric.
std::string app_metric_name(AppKind kind);

/// Flat action for the current step; receives the env before the step.
using Policy = std::function<std::size_t(const SyncPlacementEnv&)>;

/// Resets `env` with `episode_seed` and runs one horizon under `policy`.
EpisodeRecord rollout_episode(SyncPlacementEnv& env, std::uint64_t episode_seed, const Policy& policy, int episode,
                              double exploration = 0.0);

/// Seed of training episode E (1-based) in a replica.
std::uint64_t training_episode_seed(std::uint64_t replica_seed, int episode);
/// Seed of evaluation episode i; independent of the replica so every policy
/// and seed is scored on the same dynamics draws.
std::uint64_t evaluation_episode_seed(std::uint64_t eval_seed, int index);

struct TrainingOptions {
    std::uint64_t replica_seed = 0;
    /// Called after each episode with the trainer's checkpoint.
    std::function<void(const Checkpoint&)> on_checkpoint;
    int checkpoint_every = 0;
    kernels::Backend backend = kernels::Backend::OpenMP;
};

struct TrainingResult {
    Agent agent;
    std::vector<EpisodeRecord> episodes;
    std::uint64_t gradient_steps = 0;
};

/// Episodes E = 1..M: epsilon-greedy acting, replay, one train step and one
/// soft update per environment step once the buffer holds a batch.
TrainingResult run_training(SyncPlacementEnv& env, const AgentConfig& cfg, const TrainingOptions& opts);

Checkpoint make_checkpoint(const Agent& agent, const Rng& exploration, const Rng& replay, int episode);
/// Restores networks and optimizer state; layer sizes must match.
void restore_checkpoint(const Checkpoint& ck, Agent& agent, Rng* exploration = nullptr, Rng* replay = nullptr);

/// Greedy policy of a frozen agent.
Policy greedy_policy(const Agent& agent);

}  // namespace sdnsync
