#include "sdnsync/apps.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace sdnsync {

std::string to_string(AppKind kind) { return kind == AppKind::Spr ? "spr" : "lb"; }

AppKind app_kind_from_string(const std::string& name) {
    if (name == "spr") return AppKind::Spr;
    if (name == "lb") return AppKind::Lb;
    throw std::invalid_argument("application must be \"spr\" or \"lb\", got \"" + name + "\"");
}

std::vector<NodePair> default_spr_pairs(const Topology& topology) {
    const auto owner = topology.node_domains();
    std::vector<NodePair> pairs;
    for (NodeId s : topology.focal().switches) {
        for (NodeId d = 0; d < topology.num_nodes; ++d) {
            if (owner[static_cast<std::size_t>(d)] != topology.focal_domain) pairs.emplace_back(s, d);
        }
    }
    return pairs;
}

namespace {

// Delay of `path` on the live truth graph, or kUnreachable if a hop is dead.
double true_path_delay(const RoutingGraph& truth, std::span<const NodeId> path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const auto arcs = truth.arcs(path[i - 1]);
        const auto it = std::find_if(arcs.begin(), arcs.end(), [&](const auto& a) { return a.to == path[i]; });
        if (it == arcs.end()) return kUnreachable;
        total += it->delay;
    }
    return total;
}

}  // namespace

SprDetection spr_detect(const Topology& perceived, const Topology& truth, std::span<const NodePair> pairs) {
    if (pairs.empty()) throw std::invalid_argument("spr_detect: empty pair list");
    if (perceived.num_nodes != truth.num_nodes) throw std::invalid_argument("spr_detect: node sets differ");

    const RoutingGraph seen(perceived);
    const RoutingGraph real(truth);
    SprDetection out;

    // Pairs are grouped by source so each tree is built once.
    std::vector<NodePair> sorted(pairs.begin(), pairs.end());
    std::stable_sort(sorted.begin(), sorted.end(), [](const auto& a, const auto& b) { return a.first < b.first; });

    std::size_t i = 0;
    while (i < sorted.size()) {
        const NodeId src = sorted[i].first;
        const auto tree = seen.shortest_path_tree(src);
        const auto optimum = real.distances_from(src);
        for (; i < sorted.size() && sorted[i].first == src; ++i) {
            const NodeId dst = sorted[i].second;
            const double best = optimum[static_cast<std::size_t>(dst)];
            if (!reachable(best)) {
                ++out.excluded;
                continue;
            }
            ++out.evaluated;
            const auto path = tree.path_to(dst);
            if (path.empty()) continue;
            const double actual = true_path_delay(real, path);
            if (reachable(actual) && actual <= best + 1e-9 * std::max(1.0, best)) ++out.detect_count;
        }
    }
    out.rate = out.evaluated > 0 ? static_cast<double>(out.detect_count) / out.evaluated : 1.0;
    return out;
}

double spr_reward(int detect_count, double k) {
    if (detect_count < 0) throw std::invalid_argument("spr_reward: negative detect count");
    return k * detect_count;
}

namespace {

struct Server {
    NodeId node;
    double capacity;
};

std::vector<Server> servers_of(const Topology& t) {
    std::vector<Server> out;
    for (const auto& d : t.domains) {
        for (const auto& [node, cap] : d.servers) out.push_back({node, cap});
    }
    std::sort(out.begin(), out.end(), [](const Server& a, const Server& b) { return a.node < b.node; });
    return out;
}

NodeId argmax_capacity(const std::vector<Server>& servers) {
    NodeId best = servers.front().node;
    double cap = servers.front().capacity;
    for (const auto& s : servers) {
        if (s.capacity > cap) {
            cap = s.capacity;
            best = s.node;
        }
    }
    return best;
}

}  // namespace

LbOutcome lb_loss(const Topology& perceived, const Topology& truth) {
    const auto real = servers_of(truth);
    const auto seen = servers_of(perceived);
    if (real.empty() || seen.empty()) throw std::invalid_argument("lb_loss: the network has no servers");

    LbOutcome out;
    out.perceived_best = argmax_capacity(seen);
    out.actual_best = argmax_capacity(real);
    auto true_capacity = [&real](NodeId n) {
        const auto it = std::find_if(real.begin(), real.end(), [n](const Server& s) { return s.node == n; });
        if (it == real.end()) throw std::invalid_argument("lb_loss: perceived server missing from the truth");
        return it->capacity;
    };
    out.loss = true_capacity(out.actual_best) - true_capacity(out.perceived_best);
    return out;
}

double lb_reward(double loss, const LbConfig& cfg) { return cfg.capacity_reference - loss; }

AppEvaluation evaluate_application(const ApplicationConfig& cfg, const Topology& perceived, const Topology& truth,
                                   std::span<const NodePair> spr_pairs) {
    AppEvaluation eval;
    if (cfg.kind == AppKind::Spr) {
        const auto det = spr_detect(perceived, truth, spr_pairs);
        eval.r_sync = cfg.spr.k > 0.0 ? spr_reward(det.detect_count, cfg.spr.k) : det.rate;
        eval.metrics["spr_detect_rate"] = det.rate;
    } else {
        const auto lb = lb_loss(perceived, truth);
        eval.r_sync = lb_reward(lb.loss, cfg.lb);
        eval.metrics["lb_loss"] = lb.loss;
    }
    return eval;
}

}  // namespace sdnsync
