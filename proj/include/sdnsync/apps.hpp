#pragma once

// Application-level synchronization rewards: shortest path routing (SPR) and
// load balancing (LB), both scored on a perceived graph against the truth.

#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "sdnsync/netmodel.hpp"

namespace sdnsync {

using NodePair = std::pair<NodeId, NodeId>;

struct SprConfig {
    /// Scale of the per-step detection reward. Zero selects 1/|evaluated
    /// pairs|, which makes the reward equal to the detection rate.
    double k = 0.0;
};

struct LbConfig {
    /// Offset that keeps the training reward nonnegative; must be at least
    /// the capacity upper bound.
    double capacity_reference = 10.0;
};

enum class AppKind { Spr, Lb };

struct ApplicationConfig {
    AppKind kind = AppKind::Spr;
    SprConfig spr;
    LbConfig lb;
};

std::string to_string(AppKind kind);
AppKind app_kind_from_string(const std::string& name);

/// Every (focal switch, external switch) pair, focal switches ascending.
std::vector<NodePair> default_spr_pairs(const Topology& topology);

struct SprDetection {
    int detect_count = 0;
    int evaluated = 0;  // pairs whose destination is reachable in the truth
    int excluded = 0;   // pairs dropped because the truth has no path
    double rate = 1.0;  // detect_count / evaluated, 1 when nothing is evaluable
};

/// A pair is detected when the path routed on `perceived` is live on `truth`
/// and its true delay equals the true shortest-path delay.
SprDetection spr_detect(const Topology& perceived, const Topology& truth, std::span<const NodePair> pairs);

double spr_reward(int detect_count, double k);

struct LbOutcome {
    double loss = 0.0;
    NodeId perceived_best = -1;
    NodeId actual_best = -1;
};

/// Capacity lost by picking the perceived-best server over the actual best,
/// across every server in the network. Ties resolve to the lowest node id.
LbOutcome lb_loss(const Topology& perceived, const Topology& truth);

double lb_reward(double loss, const LbConfig& cfg);

struct AppEvaluation {
    double r_sync = 0.0;
    std::map<std::string, double> metrics;  // spr_detect_rate or lb_loss
};

AppEvaluation evaluate_application(const ApplicationConfig& cfg, const Topology& perceived, const Topology& truth,
                                   std::span<const NodePair> spr_pairs);

}  // namespace sdnsync
