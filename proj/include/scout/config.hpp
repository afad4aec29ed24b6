#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scout/baseline.hpp"
#include "scout/events.hpp"
#include "scout/filters.hpp"
#include "scout/qc.hpp"
#include "scout/records.hpp"
#include "scout/sim.hpp"
#include "scout/xval.hpp"

namespace scout {

// Merged view of every stage's tunables plus I/O paths. Loaded from a flat
// key = value file (# comments allowed); every default can be overridden.
// Unknown keys are config errors naming the key.
struct RunConfig {
    QCConfig qc;
    FilterConfig filter;
    BaselineConfig baseline;
    EventConfig events;
    XvalConfig xval;
    sim::SimConfig sim;

    std::string scout_csv;
    std::string sniffer_csv;
    std::string behavior_csv;
    std::string out_dir = "out";
    std::optional<Timestamp> session_date;  // anchors clock-of-day behavior times
    std::vector<DriftAnchor> drift_anchors; // deployment-record pairs "logged:true,..."

    void set(const std::string& key, const std::string& value);
    void load_file(const std::string& path);
    void validate() const;

    // Full key/value echo (defaults merged with overrides) for manifests.
    nlohmann::ordered_json echo() const;
};

}  // namespace scout
