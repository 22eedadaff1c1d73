#include "sdnsync/knowledge.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace sdnsync {

DomainSnapshot capture(const Topology& truth, DomainId domain, std::int64_t now) {
    DomainSnapshot snap;
    snap.domain_id = domain;
    snap.captured_at = now;
    const auto owners = truth.node_domains();
    for (std::size_t i = 0; i < truth.links.size(); ++i) {
        if (link_owner(truth.links[i], owners) == domain) {
            snap.link_ids.push_back(i);
            snap.links.push_back(truth.links[i]);
        }
    }
    snap.servers = truth.domains.at(static_cast<std::size_t>(domain)).servers;
    return snap;
}

KnowledgeBase::KnowledgeBase(const Topology& truth, std::int64_t now, int staleness_cap, bool own_domain_always_fresh)
    : focal_(truth.focal_domain),
      neighbors_(truth.neighbor_domains()),
      now_(now),
      cap_(staleness_cap),
      own_fresh_(own_domain_always_fresh) {
    if (cap_ < 1) throw std::invalid_argument("staleness cap must be >= 1");
    for (DomainId d : neighbors_) snapshots_.push_back(capture(truth, d, now));
    raw_.assign(neighbors_.size(), 0);
    if (!own_fresh_) own_snapshot_ = capture(truth, focal_, now);
}

int KnowledgeBase::neighbor_index(DomainId domain) const {
    const auto it = std::find(neighbors_.begin(), neighbors_.end(), domain);
    return it == neighbors_.end() ? -1 : static_cast<int>(it - neighbors_.begin());
}

void KnowledgeBase::sync(const Topology& truth, DomainId neighbor, std::int64_t now) {
    const int idx = neighbor_index(neighbor);
    if (idx < 0) {
        throw std::invalid_argument("sync: domain " + std::to_string(neighbor) + " is not a neighbor of domain " +
                                    std::to_string(focal_));
    }
    snapshots_[static_cast<std::size_t>(idx)] = capture(truth, neighbor, now);
    raw_[static_cast<std::size_t>(idx)] = 0;
}

void KnowledgeBase::advance() {
    ++now_;
    for (auto& r : raw_) ++r;
}

std::vector<int> KnowledgeBase::staleness() const {
    std::vector<int> out(raw_.size());
    std::transform(raw_.begin(), raw_.end(), out.begin(),
                   [this](std::int64_t r) { return static_cast<int>(std::min<std::int64_t>(r, cap_)); });
    return out;
}

Topology KnowledgeBase::perceived_global_graph(const Topology& truth) const {
    Topology view = truth;
    auto overlay = [&view](const DomainSnapshot& snap) {
        for (std::size_t k = 0; k < snap.link_ids.size(); ++k) view.links[snap.link_ids[k]] = snap.links[k];
        view.domains[static_cast<std::size_t>(snap.domain_id)].servers = snap.servers;
    };
    for (const auto& snap : snapshots_) overlay(snap);
    if (!own_fresh_) overlay(own_snapshot_);
    return view;
}

}  // namespace sdnsync
