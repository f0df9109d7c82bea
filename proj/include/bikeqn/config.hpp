#pragma once

#include <optional>
#include <string>

#include "bikeqn/fixedpoint.hpp"
#include "bikeqn/measures.hpp"
#include "bikeqn/model.hpp"
#include "bikeqn/routing.hpp"
#include "bikeqn/simulator.hpp"

namespace bikeqn {

// Solver settings carried by the config document; command-line flags
// override these per invocation.
struct SolverOptions {
    double tol = 1e-8;
    double damping = 0.5;
    int max_iter = 500;
    std::optional<Eigen::VectorXd> init;
    RoadFactorConvention convention = RoadFactorConvention::paper;
    std::uint64_t max_states = 10'000'000;
};

struct ParsedConfig {
    RawModel raw;
    SolverOptions solver;
    SimConfig sim;
};

// Parses the JSON config document. Unknown keys anywhere are rejected.
// Throws SchemaError on malformed documents; model invariants are checked
// later by validate_model.
ParsedConfig parse_config(const std::string& json_text);

// Canonical JSON form of a parsed config; re-parsing yields an identical
// model and identical options.
std::string echo_config(const ParsedConfig& config);

FixedPointConfig to_fixed_point_config(const SolverOptions& options);

// Report serialization. All numbers are emitted with shortest round-trip
// precision, so downstream comparisons are tolerance-controlled.
std::string findings_to_json(const std::vector<Finding>& findings);
std::string report_to_json(const PerformanceReport& report);
std::string solve_result_to_json(const FixedPointResult& result, const PerformanceReport& report);
std::string sim_report_to_json(const SimReport& report);

// CSV emission.
std::string routing_csv(const RoutingMatrix& routing);
std::string marginals_csv(const ProductFormContext& ctx);
std::string stations_csv(const PerformanceReport& report);

}  // namespace bikeqn
