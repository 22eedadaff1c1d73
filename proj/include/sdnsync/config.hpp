#pragma once

// Experiment configuration: one JSON document with sections generation,
// dynamics, env, agent, application and run. Missing keys keep their
// defaults; unknown keys and bad values are rejected with the full key path.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "sdnsync/agent.hpp"
#include "sdnsync/apps.hpp"
#include "sdnsync/envcore.hpp"
#include "sdnsync/netmodel.hpp"

namespace sdnsync {

enum class PolicyKind { Ddrl, RoundRobin, Random };

std::string to_string(PolicyKind p);
PolicyKind policy_from_string(const std::string& name);

struct RunConfig {
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5};
    std::vector<PolicyKind> policies = {PolicyKind::Ddrl, PolicyKind::RoundRobin, PolicyKind::Random};
    int eval_episodes = 10;
    std::uint64_t eval_seed = 20240601;
    std::string out_dir = "results";
    int checkpoint_every = 0;
    /// Fixed topology file; empty generates one per seed.
    std::string topology;
    bool parallel_replicas = true;
};

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ExperimentConfig {
    GenerationConfig generation;
    DynamicsConfig dynamics;
    EnvConfig env;
    AgentConfig agent;
    ApplicationConfig application;
    RunConfig run;

    /// Cross-section checks; throws ConfigError naming the offending key.
    void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& cfg);
ExperimentConfig load_config(const std::string& path);

/// Applies "section.key=value" (value parsed as JSON, else as a string).
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

}  // namespace sdnsync
