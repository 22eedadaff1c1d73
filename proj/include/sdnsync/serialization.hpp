#pragma once

// JSON mappings for the on-disk formats (topology files, debug dumps).

#include <json.hpp>

#include "sdnsync/netmodel.hpp"

namespace sdnsync {

void to_json(nlohmann::json& j, const Link& l);
void from_json(const nlohmann::json& j, Link& l);

void to_json(nlohmann::json& j, const Domain& d);
void from_json(const nlohmann::json& j, Domain& d);

/// Keys: nodes, links, domains, focal_domain. Server maps are keyed by the
/// decimal node id.
void to_json(nlohmann::json& j, const Topology& t);
void from_json(const nlohmann::json& j, Topology& t);

}  // namespace sdnsync
