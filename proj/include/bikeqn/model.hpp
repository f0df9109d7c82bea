#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "bikeqn/errors.hpp"
#include "bikeqn/map_process.hpp"

namespace bikeqn {

// Directed road between two distinct stations with its two ride rates:
// mu for first rides, xi for retrial rides. Stations are 0-based internally;
// the config format and all reports use 1-based ids.
struct RoadSpec {
    int from = 0;
    int to = 0;
    double mu = 0.0;
    double xi = 0.0;
};

// Arrival description of one station: always carries the per-phase rates;
// carries the MAP matrices and stationary vector only when the station was
// specified as a MAP.
struct StationSpec {
    std::optional<MapDescriptor> map;
    Eigen::VectorXd lambda_vec;
    Eigen::VectorXd theta;  // empty unless map is present
    double lambda_total = 0.0;

    int phases() const { return static_cast<int>(lambda_vec.size()); }
};

// Unvalidated system description as parsed from a config document.
struct RawModel {
    int station_count = 0;    // N
    int bikes_per_station = 0;  // C
    int dock_capacity = 0;    // K
    std::vector<StationSpec> stations;  // lambda_vec not yet derived for MAPs
    std::vector<RoadSpec> roads;
    // Dense routing probabilities, zero where no mass was specified.
    Eigen::MatrixXd first_ride_prob;  // p(i,j)
    Eigen::MatrixXd retrial_prob;     // alpha(i,j)
};

// Validated model. Roads are sorted by (from, to); `outgoing[i]` and
// `incoming[i]` hold road indices sorted the same way.
struct BikeShareModel {
    int station_count = 0;
    int bikes_per_station = 0;
    int dock_capacity = 0;
    std::vector<StationSpec> stations;
    std::vector<RoadSpec> roads;
    Eigen::MatrixXd first_ride_prob;
    Eigen::MatrixXd retrial_prob;
    std::vector<std::vector<int>> outgoing;  // Theta_i as road indices
    std::vector<std::vector<int>> incoming;  // Delta_i as road indices

    int fleet() const { return station_count * bikes_per_station; }
    int road_count() const { return static_cast<int>(roads.size()); }
    // Index into `roads`, or -1 when no such road exists.
    int road_index(int from, int to) const;
};

// Checks every model invariant and returns the full list of violations
// (empty when the model is sound). Degenerate stations (empty Theta_i or
// Delta_i) are reported with code "degenerate_station"; those are
// connectivity defects and map onto the reducible exit path.
std::vector<Finding> collect_violations(const RawModel& raw);

// Returns the validated model or throws ValidationError carrying all
// findings. The error class is `reducible` when every finding is a
// connectivity defect, `model` otherwise.
BikeShareModel validate_model(const RawModel& raw);

bool operator==(const BikeShareModel& a, const BikeShareModel& b);

}  // namespace bikeqn
