#pragma once

// The focal controller's eventually-consistent view of its neighbor domains.

#include <cstdint>
#include <map>
#include <vector>

#include "sdnsync/netmodel.hpp"

namespace sdnsync {

/// Atomic copy of one domain's state: the links it owns plus its servers.
struct DomainSnapshot {
    DomainId domain_id = 0;
    std::vector<std::size_t> link_ids;  // indices into Topology::links
    std::vector<Link> links;            // parallel to link_ids
    std::map<NodeId, double> servers;
    std::int64_t captured_at = 0;

    friend bool operator==(const DomainSnapshot&, const DomainSnapshot&) = default;
};

DomainSnapshot capture(const Topology& truth, DomainId domain, std::int64_t now);

inline constexpr int kDefaultStalenessCap = 100;

class KnowledgeBase {
public:
    KnowledgeBase() = default;

    /// Fresh snapshots of every neighbor, all counters zero.
    KnowledgeBase(const Topology& truth, std::int64_t now, int staleness_cap = kDefaultStalenessCap,
                  bool own_domain_always_fresh = true);

    /// Refresh one neighbor (by domain id). Throws std::invalid_argument for
    /// the focal domain or an unknown id.
    void sync(const Topology& truth, DomainId neighbor, std::int64_t now);

    /// One δt elapses: every counter moves up by one.
    void advance();

    /// Focal domain from `truth`, neighbor-owned links and servers from the
    /// snapshots.
    Topology perceived_global_graph(const Topology& truth) const;

    const std::vector<DomainId>& neighbors() const { return neighbors_; }
    std::size_t num_neighbors() const { return neighbors_.size(); }

    /// Neighbor index (position in the staleness vector) of a domain id, or -1.
    int neighbor_index(DomainId domain) const;

    /// Staleness counters saturated at the cap, ordered by neighbor index.
    std::vector<int> staleness() const;
    /// Uncapped counters; equal to now - captured_at for every neighbor.
    const std::vector<std::int64_t>& raw_staleness() const { return raw_; }

    const DomainSnapshot& snapshot(std::size_t neighbor_index) const { return snapshots_.at(neighbor_index); }
    std::int64_t now() const { return now_; }
    int cap() const { return cap_; }

    friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;

private:
    DomainId focal_ = 0;
    std::vector<DomainId> neighbors_;
    std::vector<DomainSnapshot> snapshots_;
    std::vector<std::int64_t> raw_;
    std::int64_t now_ = 0;
    int cap_ = kDefaultStalenessCap;
    bool own_fresh_ = true;
    DomainSnapshot own_snapshot_;  // used only when own_fresh_ is false
};

}  // namespace sdnsync
