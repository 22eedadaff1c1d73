#include "oracle.hpp"

#include <algorithm>
#include <stdexcept>

namespace sdnsync::oracle {

namespace {

void dfs(const std::vector<std::vector<std::pair<NodeId, double>>>& adj, NodeId at, NodeId goal, double cost,
         std::vector<char>& on_path, double& best) {
    if (at == goal) {
        best = std::min(best, cost);
        return;
    }
    for (const auto& [next, d] : adj[static_cast<std::size_t>(at)]) {
        if (on_path[static_cast<std::size_t>(next)]) continue;
        on_path[static_cast<std::size_t>(next)] = 1;
        dfs(adj, next, goal, cost + d, on_path, best);
        on_path[static_cast<std::size_t>(next)] = 0;
    }
}

}  // namespace

double brute_shortest_path(const Topology& topology, NodeId a, NodeId b) {
    if (topology.num_nodes > kMaxBruteNodes)
        throw std::invalid_argument("brute_shortest_path: more than 10 nodes");
    std::vector<std::vector<std::pair<NodeId, double>>> adj(static_cast<std::size_t>(topology.num_nodes));
    for (const auto& l : topology.links) {
        if (!l.up) continue;
        adj[static_cast<std::size_t>(l.u)].push_back({l.v, l.delay});
        adj[static_cast<std::size_t>(l.v)].push_back({l.u, l.delay});
    }
    double best = kUnreachable;
    std::vector<char> on_path(static_cast<std::size_t>(topology.num_nodes), 0);
    on_path[static_cast<std::size_t>(a)] = 1;
    dfs(adj, a, b, 0.0, on_path, best);
    return best;
}

BestAction brute_best_action(const SyncPlacementEnv& env) {
    BestAction best{0, -kUnreachable};
    for (std::size_t i = 0; i < env.actions().size(); ++i) {
        SyncPlacementEnv copy = env;
        const double r = copy.step(i).r_total;
        if (r > best.r_total) best = {i, r};
    }
    return best;
}

std::vector<double> naive_forward(const Mlp<double>& net, std::span<const double> input) {
    std::vector<double> x(input.begin(), input.end());
    const auto& sizes = net.layer_sizes();
    for (std::size_t l = 0; l + 1 < sizes.size(); ++l) {
        const auto w = net.weights(l);
        const auto b = net.bias(l);
        std::vector<double> y(sizes[l + 1]);
        for (std::size_t o = 0; o < y.size(); ++o) {
            double acc = b[o];
            for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * w[i * y.size() + o];
            y[o] = (l + 2 < sizes.size()) ? std::max(acc, 0.0) : acc;
        }
        x = std::move(y);
    }
    return x;
}

double td_loss(const Mlp<double>& net, std::span<const double> states, std::span<const std::size_t> actions,
               std::span<const double> targets) {
    const std::size_t dim = net.input_dim();
    double loss = 0.0;
    for (std::size_t j = 0; j < actions.size(); ++j) {
        const auto q = naive_forward(net, states.subspan(j * dim, dim));
        const double r = q[actions[j]] - targets[j];
        loss += r * r;
    }
    return loss / static_cast<double>(actions.size());
}

std::vector<double> finite_diff_grad(const Mlp<double>& net, std::span<const double> states,
                                     std::span<const std::size_t> actions, std::span<const double> targets,
                                     double perturbation) {
    if (!(perturbation > 0.0)) throw std::invalid_argument("finite_diff_grad: perturbation must be positive");
    Mlp<double> probe = net;
    auto params = probe.parameters();
    std::vector<double> grad(params.size());
    for (std::size_t k = 0; k < params.size(); ++k) {
        const double keep = params[k];
        params[k] = keep + perturbation;
        const double up = td_loss(probe, states, actions, targets);
        params[k] = keep - perturbation;
        const double down = td_loss(probe, states, actions, targets);
        params[k] = keep;
        grad[k] = (up - down) / (2.0 * perturbation);
    }
    return grad;
}

}  // namespace sdnsync::oracle
