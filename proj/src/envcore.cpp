#include "sdnsync/envcore.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace sdnsync {

const char* const kActionOrder =
    "ACTION_ORDER v1: flat = subset_rank * num_sites + site; subsets of neighbor indices "
    "(neighbors ordered by ascending domain id, focal excluded) of size B_sync in lexicographic "
    "order; sites index the focal candidate sites in listed order";

void EnvConfig::validate() const {
    auto fail = [](const std::string& msg) { throw std::invalid_argument("env." + msg); };
    if (!(budget_fraction > 0.0 && budget_fraction <= 1.0)) fail("budget_fraction must lie in (0, 1]");
    if (tau < 1) fail("tau must be >= 1");
    if (!(mu >= 0.0)) fail("mu must be >= 0");
    if (!(alpha >= 0.0)) fail("alpha must be >= 0");
    if (horizon < 1) fail("horizon must be >= 1");
    if (staleness_cap < 1) fail("staleness_cap must be >= 1");
    if (max_actions < 1) fail("max_actions must be >= 1");
}

int sync_budget(double budget_fraction, int num_neighbors) {
    if (num_neighbors < 1) throw std::invalid_argument("sync_budget: no neighbors");
    // Nudge down before ceil so exact products such as 0.5 * 4 stay at 2.
    const int b = static_cast<int>(std::ceil(budget_fraction * num_neighbors - 1e-9));
    return std::clamp(b, 1, num_neighbors);
}

std::string describe(const JointAction& a) {
    std::ostringstream os;
    os << "sync={";
    for (std::size_t i = 0; i < a.sync_set.size(); ++i) os << (i ? "," : "") << a.sync_set[i];
    os << "}, site=" << a.place_site;
    return os.str();
}

std::vector<JointAction> enumerate_actions(int num_neighbors, int budget, int num_sites, std::size_t limit) {
    if (budget < 1 || budget > num_neighbors) throw std::invalid_argument("enumerate_actions: need 1 <= B_sync <= neighbors");
    if (num_sites < 1) throw std::invalid_argument("enumerate_actions: need at least one site");

    double count = num_sites;
    for (int i = 0; i < budget; ++i) count = count * (num_neighbors - i) / (i + 1);
    if (count > static_cast<double>(limit)) {
        std::ostringstream os;
        os << "action space of " << static_cast<long long>(std::llround(count)) << " joint actions exceeds the limit of "
           << limit << "; use fewer domains, a smaller budget or fewer candidate sites";
        throw std::invalid_argument(os.str());
    }

    std::vector<JointAction> out;
    out.reserve(static_cast<std::size_t>(count));
    std::vector<int> subset(static_cast<std::size_t>(budget));
    for (int i = 0; i < budget; ++i) subset[static_cast<std::size_t>(i)] = i;
    while (true) {
        for (int s = 0; s < num_sites; ++s) out.push_back({subset, s});
        int i = budget - 1;
        while (i >= 0 && subset[static_cast<std::size_t>(i)] == num_neighbors - budget + i) --i;
        if (i < 0) break;
        ++subset[static_cast<std::size_t>(i)];
        for (int j = i + 1; j < budget; ++j) subset[static_cast<std::size_t>(j)] = subset[static_cast<std::size_t>(j - 1)] + 1;
    }
    return out;
}

ActionSpace::ActionSpace(int num_neighbors, int budget, int num_sites, std::size_t limit)
    : num_neighbors_(num_neighbors),
      budget_(budget),
      num_sites_(num_sites),
      actions_(enumerate_actions(num_neighbors, budget, num_sites, limit)) {}

std::size_t ActionSpace::index_of(const JointAction& a) const {
    const auto it = std::find(actions_.begin(), actions_.end(), a);
    if (it == actions_.end()) throw std::invalid_argument("action not in the action space: " + describe(a));
    return static_cast<std::size_t>(it - actions_.begin());
}

std::vector<double> JointState::encode(int cap) const {
    std::vector<double> x;
    x.reserve(sync_part.size() + place_part.size());
    const double scale = 1.0 / cap;
    for (int v : sync_part) x.push_back(std::min(v, cap) * scale);
    for (int v : place_part) x.push_back(std::min(v, cap) * scale);
    return x;
}

double placement_reward(const Topology& topology, NodeId controller_site, std::span<const DomainId> synced_neighbors,
                        double mu, double unreachable_delay) {
    const Domain& focal = topology.focal();
    if (std::find(focal.candidate_sites.begin(), focal.candidate_sites.end(), controller_site) ==
        focal.candidate_sites.end()) {
        throw std::invalid_argument("placement_reward: controller site is not a candidate site");
    }
    const auto dist = RoutingGraph(topology).distances_from(controller_site);
    auto d = [&](NodeId n) {
        const double v = dist[static_cast<std::size_t>(n)];
        return reachable(v) ? v : unreachable_delay;
    };

    double intra = 0.0;
    for (NodeId e : focal.switches) {
        if (e != controller_site) intra += d(e);
    }
    double inter = 0.0;
    for (DomainId c : synced_neighbors) inter += d(topology.domains.at(static_cast<std::size_t>(c)).controller_site);

    const double first = intra > 0.0 ? 1.0 / intra : 0.0;
    const double second = inter > 0.0 ? 1.0 / inter : 0.0;
    return first + mu * second;
}

SyncPlacementEnv::SyncPlacementEnv(Topology initial, DynamicsConfig dynamics, EnvConfig cfg, ApplicationConfig app)
    : initial_(std::move(initial)), dynamics_(dynamics), cfg_(cfg), app_(app) {
    cfg_.validate();
    initial_.validate();
    const int neighbors = static_cast<int>(initial_.domains.size()) - 1;
    const int sites = static_cast<int>(initial_.focal().candidate_sites.size());
    actions_ = std::make_shared<const ActionSpace>(neighbors, sync_budget(cfg_.budget_fraction, neighbors), sites,
                                                   cfg_.max_actions);
    if (app_.kind == AppKind::Spr) {
        spr_pairs_ = default_spr_pairs(initial_);
        if (spr_pairs_.empty()) throw std::invalid_argument("SPR needs at least one external switch");
    } else {
        if (app_.lb.capacity_reference < dynamics_.capacity_max)
            throw std::invalid_argument("lb capacity_reference must be >= the capacity upper bound");
    }
    unreachable_delay_ = cfg_.unreachable_delay > 0.0 ? cfg_.unreachable_delay : 10.0 * diameter(initial_);
    reset(dynamics_.rng_seed);
}

NodeId SyncPlacementEnv::controller_site() const {
    return truth_.focal().candidate_sites[static_cast<std::size_t>(site_index_)];
}

std::size_t SyncPlacementEnv::state_dim() const {
    return static_cast<std::size_t>(actions_->num_neighbors() + actions_->num_sites());
}

JointState SyncPlacementEnv::state() const {
    JointState s;
    s.sync_part = knowledge_.staleness();
    s.place_part.assign(static_cast<std::size_t>(actions_->num_sites()), 0);
    s.place_part[static_cast<std::size_t>(site_index_)] = std::min(placement_age_, cfg_.staleness_cap);
    return s;
}

JointState SyncPlacementEnv::reset(std::uint64_t episode_seed) {
    dynamics_.rng_seed = episode_seed;
    truth_ = initial_;
    t_ = 0;
    knowledge_ = KnowledgeBase(truth_, t_, cfg_.staleness_cap, cfg_.own_domain_always_fresh);
    const auto& sites = truth_.focal().candidate_sites;
    site_index_ = static_cast<int>(std::find(sites.begin(), sites.end(), truth_.focal().controller_site) - sites.begin());
    placement_age_ = 0;
    return state();
}

StepOutcome SyncPlacementEnv::step(const JointAction& action) {
    const int budget = actions_->budget();
    if (static_cast<int>(action.sync_set.size()) != budget) {
        throw BudgetViolation("action syncs " + std::to_string(action.sync_set.size()) + " neighbors but B_sync is " +
                              std::to_string(budget));
    }
    for (std::size_t i = 0; i < action.sync_set.size(); ++i) {
        const int n = action.sync_set[i];
        if (n < 0 || n >= actions_->num_neighbors() || (i > 0 && n <= action.sync_set[i - 1]))
            throw std::invalid_argument("sync set must hold distinct ascending neighbor indices: " + describe(action));
    }
    if (action.place_site < 0 || action.place_site >= actions_->num_sites())
        throw std::invalid_argument("placement site out of range: " + describe(action));

    StepOutcome out;

    // 1. placement, only at epochs
    out.placement_applied = t_ % cfg_.tau == 0;
    if (out.placement_applied && action.place_site != site_index_) {
        site_index_ = action.place_site;
        placement_age_ = 0;
        out.relocated = true;
        truth_.focal().controller_site = controller_site();
    }

    // 2. synchronization
    for (int n : action.sync_set) {
        const DomainId d = knowledge_.neighbors()[static_cast<std::size_t>(n)];
        knowledge_.sync(truth_, d, t_);
        out.synced_domains.push_back(d);
    }

    // 3-5. rewards on the post-sync view
    const Topology perceived = knowledge_.perceived_global_graph(truth_);
    auto eval = evaluate_application(app_, perceived, truth_, spr_pairs_);
    out.r_sync = eval.r_sync;
    out.app_metrics = std::move(eval.metrics);
    out.r_place = placement_reward(truth_, controller_site(), out.synced_domains, cfg_.mu, unreachable_delay_);
    out.r_total = out.r_sync * (cfg_.alpha + out.r_place);

    // 6. the world moves on
    truth_ = step_dynamics(truth_, dynamics_, t_);
    knowledge_.advance();
    ++placement_age_;
    ++t_;

    out.next_state = state();
    return out;
}

}  // namespace sdnsync
