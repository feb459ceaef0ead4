#pragma once

#include <string>

#include <json.hpp>

#include "riskscan/region.hpp"
#include "riskscan/scan.hpp"

namespace riskscan {

nlohmann::json cluster_to_json(const Cluster& cluster, const StudyRegion& region);
nlohmann::json scan_result_to_json(const ScanResult& result, const StudyRegion& region);

/// Inverse of scan_result_to_json. Member and center ids are resolved
/// against `region`; unknown ids throw InputError.
ScanResult scan_result_from_json(const nlohmann::json& doc, const StudyRegion& region);

/// One row per cluster, high clusters first, header included.
std::string scan_result_to_csv(const ScanResult& result, const StudyRegion& region);

}  // namespace riskscan
