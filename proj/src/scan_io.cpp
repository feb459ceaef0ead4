#include "riskscan/scan_io.hpp"

#include <algorithm>

#include <fmt/format.h>

#include "riskscan/error.hpp"

namespace riskscan {

using nlohmann::json;

json cluster_to_json(const Cluster& cluster, const StudyRegion& region) {
    const Location& center = region[cluster.window.center];
    json members = json::array();
    for (std::size_t m : cluster.members) {
        members.push_back(region[m].id);
    }
    return json{
        {"rank", cluster.rank},
        {"direction", to_string(cluster.direction)},
        {"center", center.id},
        {"center_lat", center.position.lat},
        {"center_lon", center.position.lon},
        {"radius_km", cluster.window.radius_km},
        {"extent_km", cluster.window.extent_km},
        {"population", cluster.window.population},
        {"members", std::move(members)},
        {"observed", cluster.observed},
        {"expected", cluster.expected},
        {"llr", cluster.llr},
        {"relative_risk", cluster.relative_risk},
        {"p_value", cluster.p_value},
    };
}

json scan_result_to_json(const ScanResult& result, const StudyRegion& region) {
    json high = json::array();
    json low = json::array();
    for (const Cluster& c : result.high_clusters) {
        high.push_back(cluster_to_json(c, region));
    }
    for (const Cluster& c : result.low_clusters) {
        low.push_back(cluster_to_json(c, region));
    }
    return json{
        {"interval",
         {{"index", result.interval.index}, {"start", result.interval.start.iso()}, {"end", result.interval.end.iso()}}},
        {"total_observed", result.total_observed},
        {"total_expected", result.total_expected},
        {"max_fraction", result.max_fraction},
        {"replications", result.replications},
        {"seed", result.seed},
        {"significance", result.significance},
        {"high_clusters", std::move(high)},
        {"low_clusters", std::move(low)},
    };
}

namespace {

std::size_t resolve(const StudyRegion& region, const std::string& id) {
    const auto idx = region.index_of(id);
    if (!idx) {
        throw InputError(fmt::format("scan result refers to unknown location id '{}'", id));
    }
    return *idx;
}

Cluster cluster_from_json(const json& j, const StudyRegion& region) {
    Cluster c;
    c.rank = j.at("rank").get<int>();
    c.direction = direction_from_string(j.at("direction").get<std::string>());
    c.window.center = resolve(region, j.at("center").get<std::string>());
    c.window.radius_km = j.at("radius_km").get<double>();
    c.window.extent_km = j.at("extent_km").get<double>();
    c.window.population = j.at("population").get<std::int64_t>();
    for (const auto& id : j.at("members")) {
        c.members.push_back(resolve(region, id.get<std::string>()));
    }
    std::sort(c.members.begin(), c.members.end());
    c.window.size = c.members.size();
    c.observed = j.at("observed").get<std::int64_t>();
    c.expected = j.at("expected").get<double>();
    c.llr = j.at("llr").get<double>();
    c.relative_risk = j.at("relative_risk").get<double>();
    c.p_value = j.at("p_value").get<double>();
    return c;
}

}  // namespace

ScanResult scan_result_from_json(const json& doc, const StudyRegion& region) {
    try {
        ScanResult r;
        const json& iv = doc.at("interval");
        r.interval.index = iv.at("index").get<int>();
        r.interval.start = Date::parse(iv.at("start").get<std::string>());
        r.interval.end = Date::parse(iv.at("end").get<std::string>());
        r.total_observed = doc.at("total_observed").get<std::int64_t>();
        r.total_expected = doc.at("total_expected").get<double>();
        r.max_fraction = doc.at("max_fraction").get<double>();
        r.replications = doc.at("replications").get<int>();
        r.seed = doc.at("seed").get<std::uint64_t>();
        r.significance = doc.at("significance").get<double>();
        for (const auto& c : doc.at("high_clusters")) {
            r.high_clusters.push_back(cluster_from_json(c, region));
        }
        for (const auto& c : doc.at("low_clusters")) {
            r.low_clusters.push_back(cluster_from_json(c, region));
        }
        return r;
    } catch (const json::exception& e) {
        throw InputError(fmt::format("malformed scan result: {}", e.what()));
    }
}

std::string scan_result_to_csv(const ScanResult& result, const StudyRegion& region) {
    std::string out =
        "interval,direction,rank,center,center_lat,center_lon,radius_km,n_locations,population,observed,expected,"
        "relative_risk,llr,p_value,members\n";
    for (const auto* list : {&result.high_clusters, &result.low_clusters}) {
        for (const Cluster& c : *list) {
            std::vector<std::string> ids;
            for (std::size_t m : c.members) {
                ids.push_back(region[m].id);
            }
            const Location& center = region[c.window.center];
            out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}\n", result.interval.index,
                               to_string(c.direction), c.rank, center.id, center.position.lat, center.position.lon,
                               c.window.radius_km, c.members.size(), c.window.population, c.observed, c.expected,
                               c.relative_risk, c.llr, c.p_value, fmt::join(ids, ";"));
        }
    }
    return out;
}

}  // namespace riskscan
