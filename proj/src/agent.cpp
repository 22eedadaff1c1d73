#include "sdnsync/agent.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include <json.hpp>

namespace sdnsync {

void AgentConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("agent." + msg); };
    if (!(learning_rate > 0.0)) fail("learning_rate must be positive");
    if (batch_size <= 0) fail("batch_size must be positive");
    if (!(gamma >= 0.0 && gamma < 1.0)) fail("gamma must lie in [0, 1)");
    if (!(epsilon_decay > 0.0)) fail("epsilon_decay must be positive");
    if (!(soft_update > 0.0 && soft_update <= 1.0)) fail("soft_update must lie in (0, 1]");
    if (!(beta1 >= 0.0 && beta1 < 1.0)) fail("beta1 must lie in [0, 1)");
    if (!(beta2 >= 0.0 && beta2 < 1.0)) fail("beta2 must lie in [0, 1)");
    if (!(adam_epsilon > 0.0)) fail("adam_epsilon must be positive");
    if (episodes <= 0) fail("episodes must be positive");
    if (replay_capacity < static_cast<std::size_t>(batch_size)) fail("replay_capacity must be at least batch_size");
    for (std::size_t h : hidden)
        if (h == 0) fail("hidden layer sizes must be positive");
}

double exploration_probability(double episode, double epsilon_decay) {
    return 1.0 / (1.0 + episode / epsilon_decay);
}

template <typename V>
static std::size_t argmax_impl(std::span<const V> q) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < q.size(); ++i)
        if (q[i] > q[best]) best = i;
    return best;
}

std::size_t argmax_lowest(std::span<const float> q) { return argmax_impl(q); }
std::size_t argmax_lowest(std::span<const double> q) { return argmax_impl(q); }

// ---- replay ----

template <typename T>
ReplayBuffer<T>::ReplayBuffer(std::size_t capacity, std::size_t state_dim)
    : capacity_(capacity),
      dim_(state_dim),
      states_(capacity * state_dim),
      next_states_(capacity * state_dim),
      actions_(capacity),
      rewards_(capacity),
      serial_(capacity),
      taken_(capacity) {
    if (capacity == 0) throw std::invalid_argument("replay capacity must be positive");
}

template <typename T>
void ReplayBuffer<T>::push(std::span<const T> state, std::size_t action, T reward, std::span<const T> next_state) {
    if (state.size() != dim_ || next_state.size() != dim_) throw std::invalid_argument("replay: state size mismatch");
    std::copy(state.begin(), state.end(), states_.begin() + static_cast<std::ptrdiff_t>(head_ * dim_));
    std::copy(next_state.begin(), next_state.end(), next_states_.begin() + static_cast<std::ptrdiff_t>(head_ * dim_));
    actions_[head_] = action;
    rewards_[head_] = reward;
    serial_[head_] = pushed_++;
    head_ = (head_ + 1) % capacity_;
    size_ = std::min(size_ + 1, capacity_);
}

template <typename T>
void ReplayBuffer<T>::sample(Rng& rng, std::size_t b, TransitionBatch<T>& out) {
    if (b > size_) throw std::invalid_argument("replay: batch larger than buffer");
    slots_.clear();
    for (std::size_t j = size_ - b; j < size_; ++j) {
        std::size_t pick = static_cast<std::size_t>(uniform_index(rng, j + 1));
        if (taken_[pick]) pick = j;
        taken_[pick] = 1;
        slots_.push_back(pick);
    }
    for (std::size_t s : slots_) taken_[s] = 0;
    gather(slots_, out);
}

template <typename T>
void ReplayBuffer<T>::gather(std::span<const std::size_t> slots, TransitionBatch<T>& out) const {
    out.size = slots.size();
    out.states.resize(out.size * dim_);
    out.next_states.resize(out.size * dim_);
    out.actions.resize(out.size);
    out.rewards.resize(out.size);
    for (std::size_t i = 0; i < slots.size(); ++i) {
        const std::size_t s = slots[i];
        if (s >= size_) throw std::out_of_range("replay: slot out of range");
        std::copy_n(states_.begin() + static_cast<std::ptrdiff_t>(s * dim_), dim_,
                    out.states.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        std::copy_n(next_states_.begin() + static_cast<std::ptrdiff_t>(s * dim_), dim_,
                    out.next_states.begin() + static_cast<std::ptrdiff_t>(i * dim_));
        out.actions[i] = actions_[s];
        out.rewards[i] = rewards_[s];
    }
}

// ---- agent ----

template <typename T>
DdqnAgent<T>::DdqnAgent(std::size_t state_dim, std::size_t num_actions, AgentConfig cfg, std::uint64_t weight_seed)
    : cfg_(std::move(cfg)) {
    cfg_.validate();
    std::vector<std::size_t> sizes{state_dim};
    sizes.insert(sizes.end(), cfg_.hidden.begin(), cfg_.hidden.end());
    sizes.push_back(num_actions);
    main_ = Mlp<T>(sizes);
    Rng rng(weight_seed);
    main_.init_fan_in(rng);
    target_ = main_;
}

template <typename T>
std::vector<T> DdqnAgent<T>::q_values(std::span<const T> state) const {
    const auto q = main_.forward(state, 1, ws_single_, kernels::Backend::Serial);
    return {q.begin(), q.end()};
}

template <typename T>
std::size_t DdqnAgent<T>::greedy_action(std::span<const T> state) const {
    return argmax_lowest(main_.forward(state, 1, ws_single_, kernels::Backend::Serial));
}

template <typename T>
std::size_t DdqnAgent<T>::select_action(std::span<const T> state, double episode, Rng& rng, bool* explored) const {
    const bool explore = uniform01(rng) < exploration_probability(episode, cfg_.epsilon_decay);
    if (explored) *explored = explore;
    if (explore) return static_cast<std::size_t>(uniform_index(rng, main_.output_dim()));
    return greedy_action(state);
}

template <typename T>
std::vector<T> DdqnAgent<T>::td_targets(const TransitionBatch<T>& batch) {
    const std::size_t b = batch.size;
    const std::size_t na = main_.output_dim();
    const T gamma = static_cast<T>(cfg_.gamma);
    std::vector<T> y(b);
    if (cfg_.use_double_q) {
        const auto q_main = main_.forward(batch.next_states, b, ws_next_, backend_);
        next_actions_.resize(b);
        for (std::size_t j = 0; j < b; ++j) next_actions_[j] = argmax_lowest(q_main.subspan(j * na, na));
        const auto q_next = target_.forward_selected(batch.next_states, b, next_actions_, ws_target_, backend_);
        for (std::size_t j = 0; j < b; ++j) y[j] = batch.rewards[j] + gamma * q_next[j];
        return y;
    }
    const auto q_target = target_.forward(batch.next_states, b, ws_target_, backend_);
    for (std::size_t j = 0; j < b; ++j) {
        const auto row = q_target.subspan(j * na, na);
        y[j] = batch.rewards[j] + gamma * *std::max_element(row.begin(), row.end());
    }
    return y;
}

template <typename T>
T DdqnAgent<T>::loss_and_gradient(const TransitionBatch<T>& batch, std::span<const T> targets, std::vector<T>& grad) {
    const std::size_t b = batch.size;
    const std::size_t na = main_.output_dim();
    for (std::size_t j = 0; j < b; ++j)
        if (batch.actions[j] >= na) throw std::out_of_range("transition action out of range");
    const auto q = main_.forward_selected(batch.states, b, batch.actions, ws_, backend_);
    d_selected_.resize(b);
    T loss = 0;
    const T scale = T(2) / static_cast<T>(b);
    for (std::size_t j = 0; j < b; ++j) {
        const T residual = q[j] - targets[j];
        loss += residual * residual;
        d_selected_[j] = scale * residual;
    }
    loss /= static_cast<T>(b);
    grad.resize(main_.num_parameters());
    main_.backward_selected(ws_, batch.actions, d_selected_, grad, backend_);
    return loss;
}

template <typename T>
T DdqnAgent<T>::train_step(const TransitionBatch<T>& batch) {
    if (batch.size == 0) throw std::invalid_argument("train_step on an empty batch");
    const auto y = td_targets(batch);
    const T loss = loss_and_gradient(batch, y, grad_);
    bool finite = std::isfinite(loss);
    for (std::size_t k = 0; finite && k < grad_.size(); ++k) finite = std::isfinite(grad_[k]);
    if (!finite) throw TrainingError("non-finite TD loss or gradient (loss = " + std::to_string(loss) + ")");
    adam_update<T>(main_.parameters(), grad_, adam_, cfg_.adam());
    return loss;
}

template class ReplayBuffer<float>;
template class ReplayBuffer<double>;
template class DdqnAgent<float>;
template class DdqnAgent<double>;

// ---- checkpoints ----

std::string rng_state(const Rng& rng) {
    std::ostringstream os;
    os << rng;
    return os.str();
}

void set_rng_state(Rng& rng, const std::string& state) {
    std::istringstream is(state);
    is >> rng;
    if (!is) throw std::invalid_argument("malformed RNG state");
}

void save_checkpoint(const Checkpoint& ck, const std::string& path) {
    nlohmann::json j;
    j["format"] = "sdnsync-checkpoint";
    j["version"] = ck.version;
    j["layer_sizes"] = ck.layer_sizes;
    j["theta"] = ck.theta;
    j["theta_target"] = ck.theta_target;
    j["adam"] = {{"m", ck.adam.m}, {"v", ck.adam.v}, {"step", ck.adam.step}};
    j["rng"] = {{"exploration", ck.exploration_rng}, {"replay", ck.replay_rng}};
    j["episode"] = ck.episode;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write checkpoint " + path);
    out << j.dump() << '\n';
    if (!out) throw std::runtime_error("failed writing checkpoint " + path);
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read checkpoint " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
        if (j.at("format") != "sdnsync-checkpoint") throw std::runtime_error("not a checkpoint file");
        Checkpoint ck;
        ck.version = j.at("version").get<int>();
        if (ck.version != 1) throw std::runtime_error("unsupported checkpoint version " + std::to_string(ck.version));
        ck.layer_sizes = j.at("layer_sizes").get<std::vector<std::size_t>>();
        ck.theta = j.at("theta").get<std::vector<float>>();
        ck.theta_target = j.at("theta_target").get<std::vector<float>>();
        ck.adam.m = j.at("adam").at("m").get<std::vector<float>>();
        ck.adam.v = j.at("adam").at("v").get<std::vector<float>>();
        ck.adam.step = j.at("adam").at("step").get<long long>();
        ck.exploration_rng = j.at("rng").at("exploration").get<std::string>();
        ck.replay_rng = j.at("rng").at("replay").get<std::string>();
        ck.episode = j.at("episode").get<int>();
        if (ck.theta.size() != ck.theta_target.size()) throw std::runtime_error("theta/theta_target size mismatch");
        return ck;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed checkpoint " + path + ": " + e.what());
    }
}

Checkpoint make_checkpoint(const Agent& agent, const Rng& exploration, const Rng& replay, int episode) {
    Checkpoint ck;
    ck.layer_sizes = agent.main().layer_sizes();
    const auto th = agent.main().parameters();
    const auto tt = agent.target().parameters();
    ck.theta.assign(th.begin(), th.end());
    ck.theta_target.assign(tt.begin(), tt.end());
    ck.adam = agent.adam_state();
    ck.exploration_rng = rng_state(exploration);
    ck.replay_rng = rng_state(replay);
    ck.episode = episode;
    return ck;
}

void restore_checkpoint(const Checkpoint& ck, Agent& agent, Rng* exploration, Rng* replay) {
    if (ck.layer_sizes != agent.main().layer_sizes())
        throw std::invalid_argument("checkpoint layer sizes do not match the environment's network");
    if (ck.theta.size() != agent.main().num_parameters()) throw std::invalid_argument("checkpoint parameter count");
    std::copy(ck.theta.begin(), ck.theta.end(), agent.main().parameters().begin());
    std::copy(ck.theta_target.begin(), ck.theta_target.end(), agent.target().parameters().begin());
    agent.adam_state() = ck.adam;
    if (exploration) set_rng_state(*exploration, ck.exploration_rng);
    if (replay) set_rng_state(*replay, ck.replay_rng);
}

// ---- episodes ----

std::string app_metric_name(AppKind kind) { return kind == AppKind::Spr ? "spr_detect_rate" : "lb_loss"; }

std::uint64_t training_episode_seed(std::uint64_t replica_seed, int episode) {
    return mix_seed(substream_seed(replica_seed, Stream::Dynamics), static_cast<std::uint64_t>(episode));
}

std::uint64_t evaluation_episode_seed(std::uint64_t eval_seed, int index) {
    return mix_seed(mix_seed(eval_seed, 0xE7A1), static_cast<std::uint64_t>(index));
}

EpisodeRecord rollout_episode(SyncPlacementEnv& env, std::uint64_t episode_seed, const Policy& policy, int episode,
                              double exploration) {
    env.reset(episode_seed);
    const std::string metric = app_metric_name(env.application().kind);
    EpisodeRecord rec;
    rec.episode = episode;
    rec.exploration = exploration;
    double metric_sum = 0.0;
    for (int t = 0; t < env.config().horizon; ++t) {
        const auto out = env.step(policy(env));
        rec.r_sync_sum += out.r_sync;
        rec.r_place_sum += out.r_place;
        rec.r_total_sum += out.r_total;
        metric_sum += out.app_metrics.at(metric);
        rec.relocations += out.relocated ? 1 : 0;
        ++rec.steps;
    }
    rec.app_metric = rec.steps ? metric_sum / rec.steps : 0.0;
    return rec;
}

static std::vector<float> to_float(const std::vector<double>& v) { return {v.begin(), v.end()}; }

TrainingResult run_training(SyncPlacementEnv& env, const AgentConfig& cfg, const TrainingOptions& opts) {
    cfg.validate();
    const std::size_t dim = env.state_dim();
    TrainingResult result{Agent(dim, env.actions().size(), cfg, substream_seed(opts.replica_seed, Stream::WeightInit)),
                          {},
                          0};
    Agent& agent = result.agent;
    agent.set_backend(opts.backend);
    Rng explore_rng(substream_seed(opts.replica_seed, Stream::Exploration));
    Rng replay_rng(substream_seed(opts.replica_seed, Stream::Replay));
    ReplayBuffer<float> replay(cfg.replay_capacity, dim);
    TransitionBatch<float> batch;
    const std::string metric = app_metric_name(env.application().kind);
    const auto b = static_cast<std::size_t>(cfg.batch_size);

    for (int e = 1; e <= cfg.episodes; ++e) {
        const double p_eps = exploration_probability(e, cfg.epsilon_decay);
        env.reset(training_episode_seed(opts.replica_seed, e));
        auto s = to_float(env.encoded_state());
        EpisodeRecord rec;
        rec.episode = e;
        rec.exploration = p_eps;
        double metric_sum = 0.0;
        try {
            for (int t = 0; t < env.config().horizon; ++t) {
                const std::size_t a = agent.select_action(s, e, explore_rng);
                const auto out = env.step(a);
                const auto phi = to_float(out.next_state.encode(env.config().staleness_cap));
                replay.push(s, a, static_cast<float>(out.r_total), phi);
                if (replay.size() >= b) {
                    replay.sample(replay_rng, b, batch);
                    agent.train_step(batch);
                    agent.soft_update();
                    ++result.gradient_steps;
                }
                s = phi;
                rec.r_sync_sum += out.r_sync;
                rec.r_place_sum += out.r_place;
                rec.r_total_sum += out.r_total;
                metric_sum += out.app_metrics.at(metric);
                rec.relocations += out.relocated ? 1 : 0;
                ++rec.steps;
            }
        } catch (const TrainingError& err) {
            throw TrainingError("training diverged in episode " + std::to_string(e) + ": " + err.what());
        }
        rec.app_metric = rec.steps ? metric_sum / rec.steps : 0.0;
        result.episodes.push_back(rec);
        if (opts.on_checkpoint && opts.checkpoint_every > 0 && (e % opts.checkpoint_every == 0 || e == cfg.episodes))
            opts.on_checkpoint(make_checkpoint(agent, explore_rng, replay_rng, e));
    }
    return result;
}

Policy greedy_policy(const Agent& agent) {
    auto net = std::make_shared<const Mlp<float>>(agent.main());
    auto ws = std::make_shared<Mlp<float>::Workspace>();
    return [net, ws](const SyncPlacementEnv& env) {
        const auto s = to_float(env.encoded_state());
        return argmax_lowest(net->forward(s, 1, *ws, kernels::Backend::Serial));
    };
}

}  // namespace sdnsync
