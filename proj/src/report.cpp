#include "sgb/report.hpp"

#include <charconv>

namespace sgb::report {

std::string format_double(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof buf, v,
                                   std::chars_format::fixed);
    return std::string(buf, res.ptr);
}

Json group_set_json(const GroupSet& gs,
                    const std::vector<std::map<std::string, double>>* aggs) {
    Json groups = Json::array();
    for (std::size_t i = 0; i < gs.groups.size(); ++i) {
        Json g;
        g["gid"] = i;
        g["members"] = gs.groups[i];
        Json a = Json::object();
        if (aggs && i < aggs->size())
            for (const auto& [name, value] : (*aggs)[i]) a[name] = value;
        g["aggregates"] = std::move(a);
        groups.push_back(std::move(g));
    }
    Json out;
    out["groups"] = std::move(groups);
    out["oset"] = gs.oset;
    out["policy"] = std::string(to_string(gs.policy));
    return out;
}

GroupSet group_set_from_json(const Json& j) {
    GroupSet gs;
    for (const auto& g : j.at("groups"))
        gs.groups.push_back(g.at("members").get<std::vector<TupleId>>());
    gs.oset = j.at("oset").get<std::vector<TupleId>>();
    gs.policy = parse_policy(j.at("policy").get<std::string>());
    return gs;
}

Json result_json(const query::ResultTable& rt, Policy policy) {
    std::vector<std::map<std::string, double>> aggs(rt.rows.size());
    for (std::size_t i = 0; i < rt.rows.size(); ++i)
        for (std::size_t c = 0; c < rt.headers.size(); ++c)
            aggs[i][rt.headers[c]] = rt.rows[i][c];
    GroupSet gs = rt.groups;
    gs.policy = policy;
    return group_set_json(gs, &aggs);
}

std::string groups_csv(const GroupSet& gs) {
    std::string out = "gid,members\n";
    for (std::size_t i = 0; i < gs.groups.size(); ++i) {
        out += std::to_string(i);
        out += ',';
        for (std::size_t k = 0; k < gs.groups[i].size(); ++k) {
            if (k) out += ' ';
            out += std::to_string(gs.groups[i][k]);
        }
        out += '\n';
    }
    return out;
}

std::string result_csv(const query::ResultTable& rt) {
    std::string out;
    for (std::size_t c = 0; c < rt.headers.size(); ++c) {
        if (c) out += ',';
        out += rt.headers[c];
    }
    out += '\n';
    for (const auto& row : rt.rows) {
        for (std::size_t c = 0; c < row.size(); ++c) {
            if (c) out += ',';
            out += format_double(row[c]);
        }
        out += '\n';
    }
    return out;
}

}  // namespace sgb::report
