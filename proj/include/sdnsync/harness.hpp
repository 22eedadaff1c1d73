#pragma once

// Experiment orchestration: replicas of (seed, policy), CSV emission,
// seed-aggregated summaries and one-axis sweeps.

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "sdnsync/agent.hpp"
#include "sdnsync/config.hpp"

namespace sdnsync {

/// "%.9g"
std::string format_number(double v);

/// Topology of a replica: the configured file, or a fresh draw from the
/// replica's topology substream.
Topology replica_topology(const ExperimentConfig& cfg, std::uint64_t seed);
SyncPlacementEnv make_env(const ExperimentConfig& cfg, const Topology& topology);

struct ReplicaResult {
    std::uint64_t seed = 0;
    PolicyKind policy = PolicyKind::Ddrl;
    std::vector<EpisodeRecord> train;  // learning episodes (direct rollouts for baselines)
    std::vector<EpisodeRecord> eval;   // greedy / baseline rollouts on the shared evaluation seeds
    std::uint64_t gradient_steps = 0;
};

struct ReplicaOptions {
    /// Where DDRL checkpoints go; empty disables them.
    std::string checkpoint_dir;
    int checkpoint_every = 0;
    /// Skips training and evaluates this checkpoint instead.
    std::string load_checkpoint;
};

ReplicaResult run_replica(const ExperimentConfig& cfg, std::uint64_t seed, PolicyKind policy,
                          const ReplicaOptions& opts = {});

/// Evaluation rollouts of one policy on a given environment.
std::vector<EpisodeRecord> evaluate_policy(SyncPlacementEnv& env, const ExperimentConfig& cfg, std::uint64_t seed,
                                           PolicyKind policy, const Agent* agent);

struct PolicySummary {
    PolicyKind policy = PolicyKind::Ddrl;
    int seeds = 0;
    double metric_mean = 0, metric_std = 0;
    double r_sync_mean = 0, r_sync_std = 0;
    double r_place_mean = 0, r_place_std = 0;
    double r_total_mean = 0, r_total_std = 0;
    double relocations_mean = 0;
};

/// Per-policy mean and sample standard deviation over seeds of each seed's
/// evaluation-episode average.
std::vector<PolicySummary> summarize(const std::vector<ReplicaResult>& replicas, const std::vector<PolicyKind>& order);

void write_episode_csv(std::ostream& out, const ReplicaResult& r, AppKind app);
void write_summary_csv(std::ostream& out, const std::vector<PolicySummary>& rows, AppKind app);

struct ExperimentResult {
    std::vector<ReplicaResult> replicas;
    std::vector<PolicySummary> summary;
};

/// Runs every seed x policy replica, writing episodes_<policy>_<seed>.csv and
/// summary.csv into `out_dir` (skipped when empty).
ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir,
                                const ReplicaOptions& opts = {});

/// Axes: tau, budget_fraction, num_domains.
void apply_sweep_value(ExperimentConfig& cfg, const std::string& param, double value);

struct SweepPoint {
    double value = 0;
    std::vector<PolicySummary> summary;
};

/// One experiment per value, each in out_dir/<param>_<value>; writes
/// sweep_<param>.csv with a row per (value, policy).
std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const std::string& param,
                                  const std::vector<double>& values, const std::string& out_dir);

/// Canonical flat action listing for the configured focal domain.
void describe_actions(std::ostream& out, const ActionSpace& space);

}  // namespace sdnsync
