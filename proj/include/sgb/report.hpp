#pragma once

#include <map>
#include <string>
#include <vector>

#include <json.hpp>

#include "sgb/queryfront.hpp"
#include "sgb/types.hpp"

namespace sgb::report {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double v);

using Json = nlohmann::ordered_json;

/// {"groups":[{"gid":..,"members":[..],"aggregates":{..}}],"oset":[..],
///  "policy":".."}; aggregates are empty objects when none are supplied.
Json group_set_json(
    const GroupSet& gs,
    const std::vector<std::map<std::string, double>>* aggregates = nullptr);

/// Inverse of group_set_json (aggregates are ignored).
GroupSet group_set_from_json(const Json& j);

Json result_json(const query::ResultTable& rt, Policy policy);

/// "gid,members" rows, members space-separated.
std::string groups_csv(const GroupSet& gs);

/// Header of aggregate labels, one row per group.
std::string result_csv(const query::ResultTable& rt);

}  // namespace sgb::report
