#pragma once

// Multi-domain network graph, its stochastic evolution, and min-delay routing.

#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace sdnsync {

using NodeId = int;
using DomainId = int;

/// Returned by the routing functions for disconnected node pairs.
inline constexpr double kUnreachable = std::numeric_limits<double>::infinity();

inline bool reachable(double d) { return d < kUnreachable; }

struct Link {
    NodeId u = 0;
    NodeId v = 0;
    double delay = 1.0;
    bool up = true;

    friend bool operator==(const Link&, const Link&) = default;
};

struct Domain {
    DomainId id = 0;
    std::vector<NodeId> switches;
    std::vector<NodeId> candidate_sites;
    NodeId controller_site = 0;
    std::map<NodeId, double> servers;  // node -> capacity

    friend bool operator==(const Domain&, const Domain&) = default;
};

class TopologyError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct Topology {
    int num_nodes = 0;
    std::vector<Link> links;
    std::vector<Domain> domains;
    DomainId focal_domain = 0;

    friend bool operator==(const Topology&, const Topology&) = default;

    const Domain& focal() const { return domains.at(static_cast<std::size_t>(focal_domain)); }
    Domain& focal() { return domains.at(static_cast<std::size_t>(focal_domain)); }

    /// node -> owning domain, dense over 0..num_nodes-1.
    std::vector<DomainId> node_domains() const;

    /// Domains other than the focal one, ascending by id. This is the
    /// neighbor-controller ordering used everywhere in the state and actions.
    std::vector<DomainId> neighbor_domains() const;

    /// Throws TopologyError describing the first violated invariant.
    void validate() const;
};

/// The domain whose snapshot carries a link: the lower-numbered endpoint domain.
DomainId link_owner(const Link& link, std::span<const DomainId> node_domains);

struct GenerationConfig {
    int num_domains = 7;
    int switches_min = 3;
    int switches_max = 15;
    double intra_density = 0.5;   // Bernoulli probability per intra-domain node pair
    double inter_density = 0.05;  // Bernoulli probability per inter-domain node pair
    double delay_min = 0.1;
    double delay_max = 1.0;
    double server_prob = 0.3;     // probability that a switch hosts a server
    double capacity_min = 0.0;    // initial server capacity draw
    double capacity_max = 10.0;
    int max_candidate_sites = 0;  // 0 = every switch of the focal domain
    int max_retries = 1000;
    std::uint64_t rng_seed = 1;
};

struct DynamicsConfig {
    double link_flip_prob = 0.02;
    double capacity_step = 0.5;
    double capacity_min = 0.0;
    double capacity_max = 10.0;
    std::uint64_t rng_seed = 1;
};

/// Throws TopologyError when no connected instance is found within max_retries.
Topology generate_topology(const GenerationConfig& cfg);

/// One step of link toggling and capacity random walk. Deterministic in
/// (dyn.rng_seed, t); the input is never modified.
Topology step_dynamics(const Topology& topology, const DynamicsConfig& dyn, std::int64_t t);

/// capacity + draw clamped into [lo, hi].
double perturb_capacity(double capacity, double draw, double lo, double hi);

/// Adjacency over live links, built once and queried many times.
class RoutingGraph {
public:
    explicit RoutingGraph(const Topology& topology);

    struct Arc {
        NodeId to;
        double delay;
    };

    int size() const { return static_cast<int>(adjacency_.size()); }
    std::span<const Arc> arcs(NodeId n) const { return adjacency_[static_cast<std::size_t>(n)]; }

    /// Single-source min-delay distances; kUnreachable where disconnected.
    std::vector<double> distances_from(NodeId source) const;

    struct PathTree {
        std::vector<double> distance;
        std::vector<NodeId> parent;  // -1 for the source and unreachable nodes

        std::vector<NodeId> path_to(NodeId target) const;
    };

    /// Shortest-path tree where ties between equal-delay paths resolve to the
    /// lexicographically smallest node sequence.
    PathTree shortest_path_tree(NodeId source) const;

private:
    std::vector<std::vector<Arc>> adjacency_;
};

/// Min-delay over live links, or kUnreachable.
double delay(const Topology& topology, NodeId a, NodeId b);

/// Largest finite pairwise delay over live links.
double diameter(const Topology& topology);

bool connected(const Topology& topology);

/// Delay of a node sequence evaluated on `topology`; kUnreachable if any hop
/// lacks a live link.
double path_delay(const Topology& topology, std::span<const NodeId> path);

Topology load_topology(const std::string& path);
void save_topology(const Topology& topology, const std::string& path);

}  // namespace sdnsync
