#include "sdnsync/serialization.hpp"

#include <string>

namespace sdnsync {

using nlohmann::json;

void to_json(json& j, const Link& l) {
    j = json{{"u", l.u}, {"v", l.v}, {"delay", l.delay}, {"up", l.up}};
}

void from_json(const json& j, Link& l) {
    j.at("u").get_to(l.u);
    j.at("v").get_to(l.v);
    j.at("delay").get_to(l.delay);
    l.up = j.value("up", true);
}

void to_json(json& j, const Domain& d) {
    json servers = json::object();
    for (const auto& [node, cap] : d.servers) servers[std::to_string(node)] = cap;
    j = json{{"id", d.id},
             {"switches", d.switches},
             {"candidate_sites", d.candidate_sites},
             {"controller_site", d.controller_site},
             {"servers", servers}};
}

void from_json(const json& j, Domain& d) {
    j.at("id").get_to(d.id);
    j.at("switches").get_to(d.switches);
    d.candidate_sites = j.contains("candidate_sites") ? j.at("candidate_sites").get<std::vector<NodeId>>()
                                                      : d.switches;
    j.at("controller_site").get_to(d.controller_site);
    d.servers.clear();
    if (j.contains("servers")) {
        for (const auto& [key, cap] : j.at("servers").items()) d.servers[std::stoi(key)] = cap.get<double>();
    }
}

void to_json(json& j, const Topology& t) {
    std::vector<NodeId> nodes(static_cast<std::size_t>(t.num_nodes));
    for (NodeId i = 0; i < t.num_nodes; ++i) nodes[static_cast<std::size_t>(i)] = i;
    j = json{{"nodes", nodes}, {"links", t.links}, {"domains", t.domains}, {"focal_domain", t.focal_domain}};
}

void from_json(const json& j, Topology& t) {
    const auto nodes = j.at("nodes").get<std::vector<NodeId>>();
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        if (nodes[i] != static_cast<NodeId>(i)) throw TopologyError("node ids must be dense 0..N-1");
    }
    t.num_nodes = static_cast<int>(nodes.size());
    j.at("links").get_to(t.links);
    j.at("domains").get_to(t.domains);
    j.at("focal_domain").get_to(t.focal_domain);
}

}  // namespace sdnsync
