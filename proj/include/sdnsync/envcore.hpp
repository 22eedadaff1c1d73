#pragma once

// The joint synchronization/placement MDP: states, budget-exact joint
// actions, placement gating every tau steps, and the multiplicative reward.

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "sdnsync/apps.hpp"
#include "sdnsync/knowledge.hpp"
#include "sdnsync/netmodel.hpp"

namespace sdnsync {

struct EnvConfig {
    double budget_fraction = 0.28;
    int tau = 20;
    double mu = 1.0;
    double alpha = 2.0;
    int horizon = 300;
    int staleness_cap = kDefaultStalenessCap;
    bool own_domain_always_fresh = true;
    double unreachable_delay = 0.0;  // <= 0 selects 10x the initial network diameter
    std::size_t max_actions = 4096;

    void validate() const;
};

/// ceil(fraction * neighbors), clamped to [1, neighbors].
int sync_budget(double budget_fraction, int num_neighbors);

class BudgetViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct JointAction {
    std::vector<int> sync_set;  // neighbor indices, strictly ascending
    int place_site = 0;         // index into the focal candidate sites

    friend bool operator==(const JointAction&, const JointAction&) = default;
};

std::string describe(const JointAction& a);

/// Every budget-exact action in canonical order: subsets of neighbor indices
/// lexicographically, and within a subset the site index ascending. The flat
/// index is subset_rank * num_sites + site.
std::vector<JointAction> enumerate_actions(int num_neighbors, int budget, int num_sites,
                                           std::size_t limit = 4096);

class ActionSpace {
public:
    ActionSpace(int num_neighbors, int budget, int num_sites, std::size_t limit = 4096);

    std::size_t size() const { return actions_.size(); }
    const JointAction& at(std::size_t index) const { return actions_.at(index); }
    std::size_t index_of(const JointAction& a) const;

    int num_neighbors() const { return num_neighbors_; }
    int budget() const { return budget_; }
    int num_sites() const { return num_sites_; }

private:
    int num_neighbors_;
    int budget_;
    int num_sites_;
    std::vector<JointAction> actions_;
};

/// Version tag and layout of the flat action index, printed by the CLI.
extern const char* const kActionOrder;

struct JointState {
    std::vector<int> sync_part;   // capped staleness per neighbor
    std::vector<int> place_part;  // age at the current site, zero elsewhere

    /// Concatenation of both parts divided by the cap.
    std::vector<double> encode(int cap) const;

    friend bool operator==(const JointState&, const JointState&) = default;
};

struct StepOutcome {
    JointState next_state;
    double r_sync = 0.0;
    double r_place = 0.0;
    double r_total = 0.0;
    std::map<std::string, double> app_metrics;
    bool placement_applied = false;
    bool relocated = false;
    std::vector<DomainId> synced_domains;
};

/// (sum of delays to focal switches)^-1 + mu * (sum of delays to synced
/// neighbor controllers)^-1; empty sums contribute zero and unreachable
/// delays are replaced by `unreachable_delay`.
double placement_reward(const Topology& topology, NodeId controller_site, std::span<const DomainId> synced_neighbors,
                        double mu, double unreachable_delay);

class SyncPlacementEnv {
public:
    SyncPlacementEnv(Topology initial, DynamicsConfig dynamics, EnvConfig cfg, ApplicationConfig app);

    /// Restores the initial topology, captures fresh snapshots and seeds the
    /// episode's dynamics stream.
    JointState reset(std::uint64_t episode_seed);

    StepOutcome step(const JointAction& action);
    StepOutcome step(std::size_t flat_action) { return step(actions_->at(flat_action)); }

    const ActionSpace& actions() const { return *actions_; }
    int budget() const { return actions_->budget(); }
    std::size_t state_dim() const;
    JointState state() const;
    std::vector<double> encoded_state() const { return state().encode(cfg_.staleness_cap); }

    std::int64_t t() const { return t_; }
    const Topology& truth() const { return truth_; }
    const Topology& initial_topology() const { return initial_; }
    const KnowledgeBase& knowledge() const { return knowledge_; }
    const EnvConfig& config() const { return cfg_; }
    const ApplicationConfig& application() const { return app_; }
    const DynamicsConfig& dynamics() const { return dynamics_; }
    int site_index() const { return site_index_; }
    NodeId controller_site() const;
    int placement_age() const { return placement_age_; }
    double unreachable_delay() const { return unreachable_delay_; }

private:
    Topology initial_;
    DynamicsConfig dynamics_;
    EnvConfig cfg_;
    ApplicationConfig app_;
    std::shared_ptr<const ActionSpace> actions_;
    std::vector<NodePair> spr_pairs_;
    double unreachable_delay_ = 0.0;

    Topology truth_;
    KnowledgeBase knowledge_;
    std::int64_t t_ = 0;
    int site_index_ = 0;
    int placement_age_ = 0;
};

}  // namespace sdnsync
