#include "sdnsync/config.hpp"

#include <fstream>
#include <set>

namespace sdnsync {

using nlohmann::json;

std::string to_string(PolicyKind p) {
    switch (p) {
        case PolicyKind::Ddrl: return "ddrl";
        case PolicyKind::RoundRobin: return "round_robin";
        case PolicyKind::Random: return "random";
    }
    return "?";
}

PolicyKind policy_from_string(const std::string& name) {
    if (name == "ddrl") return PolicyKind::Ddrl;
    if (name == "round_robin") return PolicyKind::RoundRobin;
    if (name == "random") return PolicyKind::Random;
    throw ConfigError("unknown policy '" + name + "' (expected ddrl, round_robin or random)");
}

namespace {

// Reads typed fields out of one JSON object and reports anything left over.
class Section {
public:
    Section(const json& root, std::string name) : name_(std::move(name)) {
        if (!root.contains(name_)) return;
        obj_ = &root.at(name_);
        if (!obj_->is_object()) throw ConfigError(name_ + ": expected an object");
    }

    template <typename T>
    void get(const char* key, T& field) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return;
        try {
            field = obj_->at(key).get<T>();
        } catch (const json::exception&) {
            throw ConfigError(name_ + "." + key + ": wrong type (" + obj_->at(key).dump() + ")");
        }
    }

    const json* raw(const char* key) {
        seen_.insert(key);
        if (!obj_ || !obj_->contains(key)) return nullptr;
        return &obj_->at(key);
    }

    void finish() const {
        if (!obj_) return;
        for (auto it = obj_->begin(); it != obj_->end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError(name_ + "." + it.key() + ": unknown key");
    }

    std::string path(const char* key) const { return name_ + "." + key; }

private:
    std::string name_;
    const json* obj_ = nullptr;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& key, const std::string& what) {
    if (!ok) throw ConfigError(key + ": " + what);
}

}  // namespace

ExperimentConfig config_from_json(const json& j) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    static const std::set<std::string> sections{"generation", "dynamics", "env", "agent", "application", "run"};
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!sections.count(it.key())) throw ConfigError(it.key() + ": unknown section");

    ExperimentConfig cfg;

    Section g(j, "generation");
    auto& gen = cfg.generation;
    g.get("num_domains", gen.num_domains);
    g.get("switches_min", gen.switches_min);
    g.get("switches_max", gen.switches_max);
    g.get("intra_density", gen.intra_density);
    g.get("inter_density", gen.inter_density);
    g.get("delay_min", gen.delay_min);
    g.get("delay_max", gen.delay_max);
    g.get("server_prob", gen.server_prob);
    g.get("capacity_min", gen.capacity_min);
    g.get("capacity_max", gen.capacity_max);
    g.get("max_candidate_sites", gen.max_candidate_sites);
    g.get("max_retries", gen.max_retries);
    g.finish();

    Section d(j, "dynamics");
    auto& dyn = cfg.dynamics;
    d.get("link_flip_prob", dyn.link_flip_prob);
    d.get("capacity_step", dyn.capacity_step);
    d.get("capacity_min", dyn.capacity_min);
    d.get("capacity_max", dyn.capacity_max);
    d.finish();

    Section e(j, "env");
    auto& env = cfg.env;
    e.get("budget_fraction", env.budget_fraction);
    e.get("tau", env.tau);
    e.get("mu", env.mu);
    e.get("alpha", env.alpha);
    e.get("horizon", env.horizon);
    e.get("staleness_cap", env.staleness_cap);
    e.get("own_domain_always_fresh", env.own_domain_always_fresh);
    e.get("unreachable_delay", env.unreachable_delay);
    e.get("max_actions", env.max_actions);
    e.finish();

    Section a(j, "agent");
    auto& ag = cfg.agent;
    a.get("learning_rate", ag.learning_rate);
    a.get("batch_size", ag.batch_size);
    a.get("gamma", ag.gamma);
    a.get("epsilon_decay", ag.epsilon_decay);
    a.get("soft_update", ag.soft_update);
    a.get("beta1", ag.beta1);
    a.get("beta2", ag.beta2);
    a.get("adam_epsilon", ag.adam_epsilon);
    a.get("episodes", ag.episodes);
    a.get("use_double_q", ag.use_double_q);
    a.get("hidden", ag.hidden);
    a.get("replay_capacity", ag.replay_capacity);
    a.finish();

    Section ap(j, "application");
    if (const json* kind = ap.raw("kind")) {
        try {
            cfg.application.kind = app_kind_from_string(kind->get<std::string>());
        } catch (const std::exception&) {
            throw ConfigError("application.kind: expected \"spr\" or \"lb\", got " + kind->dump());
        }
    }
    ap.get("spr_k", cfg.application.spr.k);
    ap.get("lb_capacity_reference", cfg.application.lb.capacity_reference);
    ap.finish();

    Section r(j, "run");
    auto& run = cfg.run;
    r.get("seeds", run.seeds);
    if (const json* pol = r.raw("policies")) {
        require(pol->is_array(), "run.policies", "expected an array of policy names");
        run.policies.clear();
        for (const auto& p : *pol) {
            require(p.is_string(), "run.policies", "expected policy names as strings");
            try {
                run.policies.push_back(policy_from_string(p.get<std::string>()));
            } catch (const ConfigError& err) {
                throw ConfigError(std::string("run.policies: ") + err.what());
            }
        }
    }
    r.get("eval_episodes", run.eval_episodes);
    r.get("eval_seed", run.eval_seed);
    r.get("out_dir", run.out_dir);
    r.get("checkpoint_every", run.checkpoint_every);
    r.get("topology", run.topology);
    r.get("parallel_replicas", run.parallel_replicas);
    r.finish();

    cfg.validate();
    return cfg;
}

void ExperimentConfig::validate() const {
    const auto& g = generation;
    require(g.num_domains >= 2, "generation.num_domains", "must be at least 2");
    require(g.switches_min >= 1, "generation.switches_min", "must be at least 1");
    require(g.switches_max >= g.switches_min, "generation.switches_max", "must be >= switches_min");
    require(g.intra_density >= 0 && g.intra_density <= 1, "generation.intra_density", "must lie in [0, 1]");
    require(g.inter_density >= 0 && g.inter_density <= 1, "generation.inter_density", "must lie in [0, 1]");
    require(g.delay_min > 0 && g.delay_max >= g.delay_min, "generation.delay_min", "need 0 < delay_min <= delay_max");
    require(g.server_prob >= 0 && g.server_prob <= 1, "generation.server_prob", "must lie in [0, 1]");
    require(g.capacity_max >= g.capacity_min, "generation.capacity_max", "must be >= capacity_min");
    require(g.max_candidate_sites >= 0, "generation.max_candidate_sites", "must be >= 0");
    require(g.max_retries >= 1, "generation.max_retries", "must be at least 1");

    const auto& d = dynamics;
    require(d.link_flip_prob >= 0 && d.link_flip_prob <= 1, "dynamics.link_flip_prob", "must lie in [0, 1]");
    require(d.capacity_step >= 0, "dynamics.capacity_step", "must be >= 0");
    require(d.capacity_max >= d.capacity_min, "dynamics.capacity_max", "must be >= capacity_min");

    try {
        env.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    try {
        agent.validate();
    } catch (const std::invalid_argument& err) {
        throw ConfigError(err.what());
    }
    if (application.kind == AppKind::Lb)
        require(application.lb.capacity_reference >= dynamics.capacity_max, "application.lb_capacity_reference",
                "must be >= dynamics.capacity_max");
    require(application.spr.k >= 0, "application.spr_k", "must be >= 0");

    require(!run.seeds.empty(), "run.seeds", "must list at least one seed");
    require(!run.policies.empty(), "run.policies", "must list at least one policy");
    require(run.eval_episodes >= 1, "run.eval_episodes", "must be at least 1");
    require(run.checkpoint_every >= 0, "run.checkpoint_every", "must be >= 0");
}

json config_to_json(const ExperimentConfig& cfg) {
    const auto& g = cfg.generation;
    const auto& d = cfg.dynamics;
    const auto& e = cfg.env;
    const auto& a = cfg.agent;
    const auto& r = cfg.run;
    json policies = json::array();
    for (auto p : r.policies) policies.push_back(to_string(p));
    return {
        {"generation",
         {{"num_domains", g.num_domains},
          {"switches_min", g.switches_min},
          {"switches_max", g.switches_max},
          {"intra_density", g.intra_density},
          {"inter_density", g.inter_density},
          {"delay_min", g.delay_min},
          {"delay_max", g.delay_max},
          {"server_prob", g.server_prob},
          {"capacity_min", g.capacity_min},
          {"capacity_max", g.capacity_max},
          {"max_candidate_sites", g.max_candidate_sites},
          {"max_retries", g.max_retries}}},
        {"dynamics",
         {{"link_flip_prob", d.link_flip_prob},
          {"capacity_step", d.capacity_step},
          {"capacity_min", d.capacity_min},
          {"capacity_max", d.capacity_max}}},
        {"env",
         {{"budget_fraction", e.budget_fraction},
          {"tau", e.tau},
          {"mu", e.mu},
          {"alpha", e.alpha},
          {"horizon", e.horizon},
          {"staleness_cap", e.staleness_cap},
          {"own_domain_always_fresh", e.own_domain_always_fresh},
          {"unreachable_delay", e.unreachable_delay},
          {"max_actions", e.max_actions}}},
        {"agent",
         {{"learning_rate", a.learning_rate},
          {"batch_size", a.batch_size},
          {"gamma", a.gamma},
          {"epsilon_decay", a.epsilon_decay},
          {"soft_update", a.soft_update},
          {"beta1", a.beta1},
          {"beta2", a.beta2},
          {"adam_epsilon", a.adam_epsilon},
          {"episodes", a.episodes},
          {"use_double_q", a.use_double_q},
          {"hidden", a.hidden},
          {"replay_capacity", a.replay_capacity}}},
        {"application",
         {{"kind", to_string(cfg.application.kind)},
          {"spr_k", cfg.application.spr.k},
          {"lb_capacity_reference", cfg.application.lb.capacity_reference}}},
        {"run",
         {{"seeds", r.seeds},
          {"policies", policies},
          {"eval_episodes", r.eval_episodes},
          {"eval_seed", r.eval_seed},
          {"out_dir", r.out_dir},
          {"checkpoint_every", r.checkpoint_every},
          {"topology", r.topology},
          {"parallel_replicas", r.parallel_replicas}}},
    };
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return config_from_json(j);
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    const auto eq = assignment.find('=');
    const auto dot = assignment.find('.');
    if (eq == std::string::npos || dot == std::string::npos || dot > eq)
        throw ConfigError("override '" + assignment + "': expected section.key=value");
    const std::string section = assignment.substr(0, dot);
    const std::string key = assignment.substr(dot + 1, eq - dot - 1);
    const std::string text = assignment.substr(eq + 1);
    json value;
    try {
        value = json::parse(text);
    } catch (const json::parse_error&) {
        value = text;
    }
    json j = config_to_json(cfg);
    if (!j.contains(section)) throw ConfigError(section + ": unknown section");
    if (!j[section].contains(key)) throw ConfigError(section + "." + key + ": unknown key");
    j[section][key] = value;
    cfg = config_from_json(j);
}

}  // namespace sdnsync
