#pragma once

#include <cstdint>
#include <vector>

#include "sdnsync/netmodel.hpp"
#include "sdnsync/rng.hpp"

namespace fixtures {

using namespace sdnsync;

/// Domains from explicit switch lists; the first switch hosts the controller
/// and every switch is a candidate site.
inline Topology make_topology(int num_nodes, std::vector<std::vector<NodeId>> domain_switches, std::vector<Link> links,
                              DomainId focal = 0) {
    Topology t;
    t.num_nodes = num_nodes;
    t.links = std::move(links);
    t.focal_domain = focal;
    for (std::size_t i = 0; i < domain_switches.size(); ++i) {
        Domain d;
        d.id = static_cast<DomainId>(i);
        d.switches = domain_switches[i];
        d.candidate_sites = d.switches;
        d.controller_site = d.switches.front();
        t.domains.push_back(d);
    }
    return t;
}

/// Random graph on n nodes split round-robin into 2 domains, random delays
/// in [1, 5] (integers, so ties are common) and random liveness.
inline Topology random_small_graph(Rng& rng, int n, double density, double up_prob) {
    std::vector<std::vector<NodeId>> doms(2);
    for (NodeId i = 0; i < n; ++i) doms[static_cast<std::size_t>(i % 2)].push_back(i);
    std::vector<Link> links;
    for (NodeId u = 0; u < n; ++u)
        for (NodeId v = u + 1; v < n; ++v)
            if (uniform01(rng) < density)
                links.push_back({u, v, static_cast<double>(1 + uniform_index(rng, 5)), uniform01(rng) < up_prob});
    return make_topology(n, doms, links);
}

/// Three domains of three switches: 0-2 focal, 3-5 and 6-8 neighbors.
inline Topology three_domains() {
    return make_topology(9, {{0, 1, 2}, {3, 4, 5}, {6, 7, 8}},
                         {{0, 1, 1.0, true},
                          {1, 2, 1.0, true},
                          {0, 2, 3.0, true},
                          {3, 4, 1.0, true},
                          {4, 5, 1.0, true},
                          {6, 7, 1.0, true},
                          {7, 8, 1.0, true},
                          {2, 3, 2.0, true},
                          {0, 6, 2.0, true},
                          {5, 8, 1.0, true}});
}

/// Focal domain {0,1,2} with the controller at 0 and switches at delays 1
/// and 2; neighbor domain {3} whose controller sits at delay 4.
inline Topology placement_fixture() {
    return make_topology(4, {{0, 1, 2}, {3}}, {{0, 1, 1.0, true}, {0, 2, 2.0, true}, {0, 3, 4.0, true}});
}

}  // namespace fixtures
