#include "sdnsync/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>
#include <sstream>

#include "sdnsync/baselines.hpp"

namespace sdnsync {

namespace fs = std::filesystem;

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

Topology replica_topology(const ExperimentConfig& cfg, std::uint64_t seed) {
    if (!cfg.run.topology.empty()) return load_topology(cfg.run.topology);
    GenerationConfig g = cfg.generation;
    g.rng_seed = substream_seed(seed, Stream::Topology);
    return generate_topology(g);
}

SyncPlacementEnv make_env(const ExperimentConfig& cfg, const Topology& topology) {
    return SyncPlacementEnv(topology, cfg.dynamics, cfg.env, cfg.application);
}

static Policy baseline_policy(PolicyKind kind, std::uint64_t rng_seed) {
    if (kind == PolicyKind::RoundRobin) {
        auto state = std::make_shared<RoundRobinState>();
        return [state](const SyncPlacementEnv& env) {
            const auto& sp = env.actions();
            return sp.index_of(round_robin_action(*state, sp.num_neighbors(), sp.budget(), sp.num_sites(), env.t(),
                                                  env.config().tau));
        };
    }
    auto policy = std::make_shared<RandomPolicy>(rng_seed);
    return [policy](const SyncPlacementEnv& env) {
        const auto& sp = env.actions();
        return sp.index_of(policy->act(sp.num_neighbors(), sp.budget(), sp.num_sites(), env.t(), env.config().tau));
    };
}

static std::uint64_t baseline_episode_seed(std::uint64_t seed, std::uint64_t salt, int episode) {
    return mix_seed(mix_seed(substream_seed(seed, Stream::Baseline), salt), static_cast<std::uint64_t>(episode));
}

std::vector<EpisodeRecord> evaluate_policy(SyncPlacementEnv& env, const ExperimentConfig& cfg, std::uint64_t seed,
                                           PolicyKind policy, const Agent* agent) {
    std::vector<EpisodeRecord> out;
    for (int i = 0; i < cfg.run.eval_episodes; ++i) {
        Policy p = policy == PolicyKind::Ddrl ? greedy_policy(*agent) : baseline_policy(policy, baseline_episode_seed(seed, 2, i));
        out.push_back(rollout_episode(env, evaluation_episode_seed(cfg.run.eval_seed, i), p, i + 1));
    }
    return out;
}

ReplicaResult run_replica(const ExperimentConfig& cfg, std::uint64_t seed, PolicyKind policy,
                          const ReplicaOptions& opts) {
    ReplicaResult r;
    r.seed = seed;
    r.policy = policy;
    auto env = make_env(cfg, replica_topology(cfg, seed));

    if (policy != PolicyKind::Ddrl) {
        for (int e = 1; e <= cfg.agent.episodes; ++e) {
            const Policy p = baseline_policy(policy, baseline_episode_seed(seed, 1, e));
            r.train.push_back(rollout_episode(env, training_episode_seed(seed, e), p, e));
        }
        r.eval = evaluate_policy(env, cfg, seed, policy, nullptr);
        return r;
    }

    if (!opts.load_checkpoint.empty()) {
        Agent agent(env.state_dim(), env.actions().size(), cfg.agent, substream_seed(seed, Stream::WeightInit));
        restore_checkpoint(load_checkpoint(opts.load_checkpoint), agent);
        r.eval = evaluate_policy(env, cfg, seed, policy, &agent);
        return r;
    }

    TrainingOptions topts;
    topts.replica_seed = seed;
    topts.checkpoint_every = opts.checkpoint_every;
    if (!opts.checkpoint_dir.empty() && opts.checkpoint_every > 0) {
        const std::string dir = opts.checkpoint_dir;
        topts.on_checkpoint = [dir, seed](const Checkpoint& ck) {
            fs::create_directories(dir);
            const std::string stem = dir + "/checkpoint_" + std::to_string(seed);
            save_checkpoint(ck, stem + "_ep" + std::to_string(ck.episode) + ".json");
            save_checkpoint(ck, stem + ".json");
        };
    }
    auto trained = run_training(env, cfg.agent, topts);
    r.train = std::move(trained.episodes);
    r.gradient_steps = trained.gradient_steps;
    r.eval = evaluate_policy(env, cfg, seed, policy, &trained.agent);
    return r;
}

namespace {

struct Stats {
    double mean = 0, std = 0;
};

Stats stats(const std::vector<double>& v) {
    Stats s;
    if (v.empty()) return s;
    for (double x : v) s.mean += x;
    s.mean /= static_cast<double>(v.size());
    if (v.size() > 1) {
        double ss = 0;
        for (double x : v) ss += (x - s.mean) * (x - s.mean);
        s.std = std::sqrt(ss / static_cast<double>(v.size() - 1));
    }
    return s;
}

}  // namespace

std::vector<PolicySummary> summarize(const std::vector<ReplicaResult>& replicas, const std::vector<PolicyKind>& order) {
    std::vector<PolicySummary> rows;
    for (PolicyKind p : order) {
        std::vector<double> metric, sync, place, total, reloc;
        for (const auto& r : replicas) {
            if (r.policy != p || r.eval.empty()) continue;
            double m = 0, s = 0, pl = 0, t = 0, rl = 0;
            for (const auto& e : r.eval) {
                m += e.app_metric;
                s += e.r_sync_mean();
                pl += e.r_place_mean();
                t += e.r_total_mean();
                rl += e.relocations;
            }
            const double n = static_cast<double>(r.eval.size());
            metric.push_back(m / n);
            sync.push_back(s / n);
            place.push_back(pl / n);
            total.push_back(t / n);
            reloc.push_back(rl / n);
        }
        PolicySummary row;
        row.policy = p;
        row.seeds = static_cast<int>(metric.size());
        const auto sm = stats(metric), ss = stats(sync), sp = stats(place), st = stats(total);
        row.metric_mean = sm.mean;
        row.metric_std = sm.std;
        row.r_sync_mean = ss.mean;
        row.r_sync_std = ss.std;
        row.r_place_mean = sp.mean;
        row.r_place_std = sp.std;
        row.r_total_mean = st.mean;
        row.r_total_std = st.std;
        row.relocations_mean = stats(reloc).mean;
        rows.push_back(row);
    }
    return rows;
}

void write_episode_csv(std::ostream& out, const ReplicaResult& r, AppKind app) {
    out << "phase,episode,steps,r_sync_mean,r_place_mean,r_total_mean," << app_metric_name(app)
        << ",relocations,exploration\n";
    auto rows = [&](const char* phase, const std::vector<EpisodeRecord>& recs) {
        for (const auto& e : recs) {
            out << phase << ',' << e.episode << ',' << e.steps << ',' << format_number(e.r_sync_mean()) << ','
                << format_number(e.r_place_mean()) << ',' << format_number(e.r_total_mean()) << ','
                << format_number(e.app_metric) << ',' << e.relocations << ',' << format_number(e.exploration) << '\n';
        }
    };
    rows("train", r.train);
    rows("eval", r.eval);
}

void write_summary_csv(std::ostream& out, const std::vector<PolicySummary>& rows, AppKind app) {
    const std::string m = app_metric_name(app);
    out << "policy,seeds," << m << "_mean," << m
        << "_std,r_sync_mean,r_sync_std,r_place_mean,r_place_std,r_total_mean,r_total_std,relocations_mean\n";
    for (const auto& r : rows) {
        out << to_string(r.policy) << ',' << r.seeds << ',' << format_number(r.metric_mean) << ','
            << format_number(r.metric_std) << ',' << format_number(r.r_sync_mean) << ','
            << format_number(r.r_sync_std) << ',' << format_number(r.r_place_mean) << ','
            << format_number(r.r_place_std) << ',' << format_number(r.r_total_mean) << ','
            << format_number(r.r_total_std) << ',' << format_number(r.relocations_mean) << '\n';
    }
}

static void write_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, const std::string& out_dir, const ReplicaOptions& opts) {
    cfg.validate();
    struct Job {
        std::uint64_t seed;
        PolicyKind policy;
    };
    std::vector<Job> jobs;
    for (auto seed : cfg.run.seeds)
        for (auto p : cfg.run.policies) jobs.push_back({seed, p});

    ExperimentResult result;
    result.replicas.resize(jobs.size());
    std::vector<std::string> errors(jobs.size());
    const auto n = static_cast<long>(jobs.size());
#pragma omp parallel for schedule(dynamic) if (cfg.run.parallel_replicas)
    for (long i = 0; i < n; ++i) {
        try {
            result.replicas[static_cast<std::size_t>(i)] =
                run_replica(cfg, jobs[static_cast<std::size_t>(i)].seed, jobs[static_cast<std::size_t>(i)].policy, opts);
        } catch (const std::exception& e) {
            errors[static_cast<std::size_t>(i)] = "seed " + std::to_string(jobs[static_cast<std::size_t>(i)].seed) +
                                                  ", policy " + to_string(jobs[static_cast<std::size_t>(i)].policy) +
                                                  ": " + e.what();
        }
    }
    for (const auto& e : errors)
        if (!e.empty()) throw std::runtime_error(e);

    result.summary = summarize(result.replicas, cfg.run.policies);
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        for (const auto& r : result.replicas) {
            std::ostringstream os;
            write_episode_csv(os, r, cfg.application.kind);
            write_file(fs::path(out_dir) / ("episodes_" + to_string(r.policy) + "_" + std::to_string(r.seed) + ".csv"),
                       os.str());
        }
        std::ostringstream os;
        write_summary_csv(os, result.summary, cfg.application.kind);
        write_file(fs::path(out_dir) / "summary.csv", os.str());
    }
    return result;
}

void apply_sweep_value(ExperimentConfig& cfg, const std::string& param, double value) {
    if (param == "tau") {
        cfg.env.tau = static_cast<int>(std::lround(value));
    } else if (param == "budget_fraction") {
        cfg.env.budget_fraction = value;
    } else if (param == "num_domains") {
        cfg.generation.num_domains = static_cast<int>(std::lround(value));
    } else {
        throw ConfigError("sweep parameter '" + param + "' is not one of tau, budget_fraction, num_domains");
    }
    cfg.validate();
}

std::vector<SweepPoint> run_sweep(const ExperimentConfig& cfg, const std::string& param,
                                  const std::vector<double>& values, const std::string& out_dir) {
    std::vector<SweepPoint> points;
    for (double v : values) {
        ExperimentConfig c = cfg;
        apply_sweep_value(c, param, v);
        const std::string sub = out_dir.empty() ? "" : (fs::path(out_dir) / (param + "_" + format_number(v))).string();
        points.push_back({v, run_experiment(c, sub).summary});
    }
    if (!out_dir.empty()) {
        const std::string m = app_metric_name(cfg.application.kind);
        std::ostringstream os;
        os << param << ",policy,seeds," << m << "_mean," << m
           << "_std,r_place_mean,r_place_std,r_total_mean,r_total_std\n";
        for (const auto& p : points) {
            for (const auto& r : p.summary) {
                os << format_number(p.value) << ',' << to_string(r.policy) << ',' << r.seeds << ','
                   << format_number(r.metric_mean) << ',' << format_number(r.metric_std) << ','
                   << format_number(r.r_place_mean) << ',' << format_number(r.r_place_std) << ','
                   << format_number(r.r_total_mean) << ',' << format_number(r.r_total_std) << '\n';
            }
        }
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / ("sweep_" + param + ".csv"), os.str());
    }
    return points;
}

void describe_actions(std::ostream& out, const ActionSpace& space) {
    for (std::size_t i = 0; i < space.size(); ++i) out << describe(space.at(i)) << '\n';
}

}  // namespace sdnsync
