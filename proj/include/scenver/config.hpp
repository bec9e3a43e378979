#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "scenver/barrier_core.hpp"
#include "scenver/sampling.hpp"
#include "scenver/systems/analytic.hpp"
#include "scenver/systems/obstacle_course.hpp"
#include "scenver/systems/unicycle.hpp"

namespace scenver {

class ConfigError : public Error {
public:
    using Error::Error;
};

struct SystemConfig {
    std::string type = "unicycle_fleet";  // unicycle_fleet | analytic | obstacle_course
    AnalyticVariant variant = AnalyticVariant::circle;
    UnicycleConfig unicycle;
    ObstacleCourseConfig course;
};

struct DomainOverride {
    std::optional<std::vector<double>> state_lower, state_upper;
    std::optional<std::vector<double>> param_lower, param_upper;
    std::optional<std::vector<std::vector<double>>> discrete;
};

struct BarrierConfig {
    std::string type = "fleet_distance";  // fleet_distance | obstacle_distance | constant | affine | interval
    double safety_radius = 0.15;
    double radius = 0.35;
    double value = 1.0;
    int dim = 0;
    double scale = 1.0;
    double offset = 0.0;
    double lower = -1.0;
    double upper = 1.0;
    double m = 1.0;
    double M = 10.0;
    DomainOverride domain;
};

struct RunConfig {
    SystemConfig system;
    BarrierConfig barrier;
    SamplingPlan plan;
    double zero_tol = 1e-9;
    bool validation_enabled = false;
    std::int64_t validation_trials = 1000;
    double beta = 1e-6;
    std::string output_directory = "scenver_out";
    bool write_transitions = true;
};

/// Parses and range-checks a configuration document. Unknown keys are rejected.
RunConfig parse_config(const nlohmann::json& doc);
RunConfig load_config(const std::string& path);

/// Every field with defaults filled in; embedded in reports for provenance.
nlohmann::ordered_json resolved_config_json(const RunConfig& cfg);

std::unique_ptr<ClosedLoopSystem> make_system(const SystemConfig& cfg);

/// Builds the barrier on the system's natural domain, with any overrides applied.
BarrierFunction make_barrier(const BarrierConfig& cfg, const ClosedLoopSystem& sys);

}  // namespace scenver
