#include "sdnsync/netmodel.hpp"

#include <algorithm>
#include <fstream>
#include <functional>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "sdnsync/rng.hpp"
#include "sdnsync/serialization.hpp"

namespace sdnsync {

std::vector<DomainId> Topology::node_domains() const {
    std::vector<DomainId> owner(static_cast<std::size_t>(num_nodes), -1);
    for (const auto& d : domains) {
        for (NodeId n : d.switches) {
            if (n >= 0 && n < num_nodes) owner[static_cast<std::size_t>(n)] = d.id;
        }
    }
    return owner;
}

std::vector<DomainId> Topology::neighbor_domains() const {
    std::vector<DomainId> out;
    for (const auto& d : domains) {
        if (d.id != focal_domain) out.push_back(d.id);
    }
    return out;
}

void Topology::validate() const {
    auto fail = [](const std::string& msg) { throw TopologyError("invalid topology: " + msg); };
    if (num_nodes <= 0) fail("no nodes");
    if (domains.size() < 2) fail("fewer than two domains");
    for (std::size_t i = 0; i < domains.size(); ++i) {
        if (domains[i].id != static_cast<DomainId>(i)) fail("domain ids must be dense and ordered");
    }
    if (focal_domain < 0 || focal_domain >= static_cast<DomainId>(domains.size())) fail("focal domain out of range");

    std::vector<int> seen(static_cast<std::size_t>(num_nodes), 0);
    for (const auto& d : domains) {
        const std::string tag = "domain " + std::to_string(d.id) + ": ";
        if (d.switches.empty()) fail(tag + "no switches");
        for (NodeId n : d.switches) {
            if (n < 0 || n >= num_nodes) fail(tag + "switch id out of range");
            if (seen[static_cast<std::size_t>(n)]++) fail(tag + "node " + std::to_string(n) + " in two domains");
        }
        std::set<NodeId> members(d.switches.begin(), d.switches.end());
        if (d.candidate_sites.empty()) fail(tag + "no candidate sites");
        for (NodeId s : d.candidate_sites) {
            if (!members.contains(s)) fail(tag + "candidate site outside the domain");
        }
        if (std::find(d.candidate_sites.begin(), d.candidate_sites.end(), d.controller_site) ==
            d.candidate_sites.end()) {
            fail(tag + "controller site is not a candidate site");
        }
        for (const auto& [node, cap] : d.servers) {
            if (!members.contains(node)) fail(tag + "server outside the domain");
            if (!(cap >= 0.0)) fail(tag + "negative server capacity");
        }
    }
    if (std::find(seen.begin(), seen.end(), 0) != seen.end()) fail("node without a domain");

    std::set<std::pair<NodeId, NodeId>> pairs;
    for (const auto& l : links) {
        if (l.u < 0 || l.u >= num_nodes || l.v < 0 || l.v >= num_nodes) fail("link endpoint out of range");
        if (l.u == l.v) fail("self loop");
        if (!(l.delay > 0.0)) fail("non-positive link delay");
        if (!pairs.emplace(std::min(l.u, l.v), std::max(l.u, l.v)).second) fail("duplicate link");
    }
}

DomainId link_owner(const Link& link, std::span<const DomainId> node_domains) {
    return std::min(node_domains[static_cast<std::size_t>(link.u)], node_domains[static_cast<std::size_t>(link.v)]);
}

namespace {

void check_generation(const GenerationConfig& cfg) {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("generation config: " + msg); };
    if (cfg.num_domains < 2) fail("num_domains must be >= 2");
    if (cfg.switches_min < 1 || cfg.switches_max > 64 || cfg.switches_min > cfg.switches_max)
        fail("switches range must satisfy 1 <= min <= max <= 64");
    auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
    if (!prob(cfg.intra_density) || !prob(cfg.inter_density) || !prob(cfg.server_prob))
        fail("densities and server_prob must lie in [0, 1]");
    if (!(cfg.delay_min > 0.0) || cfg.delay_min > cfg.delay_max) fail("delay range must satisfy 0 < min <= max");
    if (cfg.capacity_min < 0.0 || cfg.capacity_min > cfg.capacity_max) fail("capacity range invalid");
    if (cfg.max_candidate_sites < 0) fail("max_candidate_sites must be >= 0");
    if (cfg.max_retries < 1) fail("max_retries must be >= 1");
}

Topology draw_topology(const GenerationConfig& cfg, Rng& rng) {
    Topology topo;
    topo.focal_domain = 0;
    const int span = cfg.switches_max - cfg.switches_min + 1;
    NodeId next = 0;
    for (int d = 0; d < cfg.num_domains; ++d) {
        Domain dom;
        dom.id = d;
        const int size = cfg.switches_min + static_cast<int>(uniform_index(rng, static_cast<std::uint64_t>(span)));
        for (int i = 0; i < size; ++i) dom.switches.push_back(next++);
        topo.domains.push_back(std::move(dom));
    }
    topo.num_nodes = next;

    const auto owner = topo.node_domains();
    for (NodeId a = 0; a < topo.num_nodes; ++a) {
        for (NodeId b = a + 1; b < topo.num_nodes; ++b) {
            const bool same = owner[static_cast<std::size_t>(a)] == owner[static_cast<std::size_t>(b)];
            const double p = same ? cfg.intra_density : cfg.inter_density;
            if (uniform01(rng) < p) {
                topo.links.push_back({a, b, uniform(rng, cfg.delay_min, cfg.delay_max), true});
            }
        }
    }

    for (auto& dom : topo.domains) {
        for (NodeId n : dom.switches) {
            if (uniform01(rng) < cfg.server_prob) {
                dom.servers[n] = uniform(rng, cfg.capacity_min, cfg.capacity_max);
            }
        }
        dom.candidate_sites = dom.switches;
        if (dom.id == topo.focal_domain && cfg.max_candidate_sites > 0 &&
            cfg.max_candidate_sites < static_cast<int>(dom.switches.size())) {
            std::vector<NodeId> pool = dom.switches;
            std::vector<NodeId> chosen;
            for (int i = 0; i < cfg.max_candidate_sites; ++i) {
                const auto k = uniform_index(rng, pool.size());
                chosen.push_back(pool[k]);
                pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(k));
            }
            std::sort(chosen.begin(), chosen.end());
            dom.candidate_sites = std::move(chosen);
        }
        dom.controller_site = dom.candidate_sites[uniform_index(rng, dom.candidate_sites.size())];
    }
    return topo;
}

}  // namespace

Topology generate_topology(const GenerationConfig& cfg) {
    check_generation(cfg);
    for (int attempt = 0; attempt < cfg.max_retries; ++attempt) {
        Rng rng(mix_seed(cfg.rng_seed, static_cast<std::uint64_t>(attempt)));
        Topology topo = draw_topology(cfg, rng);
        if (!connected(topo)) continue;
        if (cfg.server_prob > 0.0) {
            const bool any_server = std::any_of(topo.domains.begin(), topo.domains.end(),
                                                [](const Domain& d) { return !d.servers.empty(); });
            if (!any_server) continue;
        }
        topo.validate();
        return topo;
    }
    throw TopologyError("could not generate a connected topology in " + std::to_string(cfg.max_retries) +
                        " attempts; raise the link densities or shrink the instance");
}

double perturb_capacity(double capacity, double draw, double lo, double hi) {
    return std::clamp(capacity + draw, lo, hi);
}

Topology step_dynamics(const Topology& topology, const DynamicsConfig& dyn, std::int64_t t) {
    Topology next = topology;
    Rng rng(mix_seed(dyn.rng_seed, static_cast<std::uint64_t>(t)));
    if (dyn.link_flip_prob > 0.0) {
        for (auto& l : next.links) {
            if (uniform01(rng) < dyn.link_flip_prob) l.up = !l.up;
        }
    }
    if (dyn.capacity_step > 0.0) {
        for (auto& d : next.domains) {
            for (auto& [node, cap] : d.servers) {
                const double draw = uniform(rng, -dyn.capacity_step, dyn.capacity_step);
                cap = perturb_capacity(cap, draw, dyn.capacity_min, dyn.capacity_max);
            }
        }
    }
    return next;
}

RoutingGraph::RoutingGraph(const Topology& topology) : adjacency_(static_cast<std::size_t>(topology.num_nodes)) {
    for (const auto& l : topology.links) {
        if (!l.up) continue;
        adjacency_[static_cast<std::size_t>(l.u)].push_back({l.v, l.delay});
        adjacency_[static_cast<std::size_t>(l.v)].push_back({l.u, l.delay});
    }
    // Deterministic relaxation order independent of link list order.
    for (auto& arcs : adjacency_) {
        std::sort(arcs.begin(), arcs.end(), [](const Arc& a, const Arc& b) { return a.to < b.to; });
    }
}

std::vector<double> RoutingGraph::distances_from(NodeId source) const {
    return shortest_path_tree(source).distance;
}

std::vector<NodeId> RoutingGraph::PathTree::path_to(NodeId target) const {
    std::vector<NodeId> path;
    if (!reachable(distance[static_cast<std::size_t>(target)])) return path;
    for (NodeId n = target; n != -1; n = parent[static_cast<std::size_t>(n)]) path.push_back(n);
    std::reverse(path.begin(), path.end());
    return path;
}

RoutingGraph::PathTree RoutingGraph::shortest_path_tree(NodeId source) const {
    const auto n = adjacency_.size();
    PathTree tree{std::vector<double>(n, kUnreachable), std::vector<NodeId>(n, -1)};
    std::vector<char> done(n, 0);
    tree.distance[static_cast<std::size_t>(source)] = 0.0;

    using Entry = std::pair<double, NodeId>;
    std::priority_queue<Entry, std::vector<Entry>, std::greater<>> queue;
    queue.emplace(0.0, source);

    // Lexicographic comparison of root->a->extra against root->b.
    auto lex_less = [&](NodeId a, NodeId extra, NodeId b) {
        std::vector<NodeId> pa = tree.path_to(a);
        pa.push_back(extra);
        const std::vector<NodeId> pb = tree.path_to(b);
        return std::lexicographical_compare(pa.begin(), pa.end(), pb.begin(), pb.end());
    };

    while (!queue.empty()) {
        const auto [d, u] = queue.top();
        queue.pop();
        if (done[static_cast<std::size_t>(u)]) continue;
        done[static_cast<std::size_t>(u)] = 1;
        for (const Arc& arc : adjacency_[static_cast<std::size_t>(u)]) {
            const auto v = static_cast<std::size_t>(arc.to);
            if (done[v]) continue;
            const double nd = d + arc.delay;
            if (nd < tree.distance[v]) {
                tree.distance[v] = nd;
                tree.parent[v] = u;
                queue.emplace(nd, arc.to);
            } else if (nd == tree.distance[v] && lex_less(u, arc.to, arc.to)) {
                tree.parent[v] = u;
            }
        }
    }
    return tree;
}

double delay(const Topology& topology, NodeId a, NodeId b) {
    if (a == b) return 0.0;
    return RoutingGraph(topology).distances_from(a)[static_cast<std::size_t>(b)];
}

double diameter(const Topology& topology) {
    const RoutingGraph graph(topology);
    double best = 0.0;
    for (NodeId s = 0; s < topology.num_nodes; ++s) {
        for (double d : graph.distances_from(s)) {
            if (reachable(d)) best = std::max(best, d);
        }
    }
    return best;
}

bool connected(const Topology& topology) {
    if (topology.num_nodes == 0) return true;
    const auto dist = RoutingGraph(topology).distances_from(0);
    return std::all_of(dist.begin(), dist.end(), [](double d) { return reachable(d); });
}

double path_delay(const Topology& topology, std::span<const NodeId> path) {
    double total = 0.0;
    for (std::size_t i = 1; i < path.size(); ++i) {
        const NodeId a = std::min(path[i - 1], path[i]);
        const NodeId b = std::max(path[i - 1], path[i]);
        const auto it = std::find_if(topology.links.begin(), topology.links.end(), [&](const Link& l) {
            return std::min(l.u, l.v) == a && std::max(l.u, l.v) == b;
        });
        if (it == topology.links.end() || !it->up) return kUnreachable;
        total += it->delay;
    }
    return total;
}

Topology load_topology(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open topology file: " + path);
    Topology topo = nlohmann::json::parse(in).get<Topology>();
    topo.validate();
    return topo;
}

void save_topology(const Topology& topology, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write topology file: " + path);
    out << nlohmann::json(topology).dump(2) << '\n';
}

}  // namespace sdnsync
