#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bikeqn/model.hpp"

namespace bikeqn {

// Canonical ordering of the 2-class virtual nodes: for each station i in
// ascending order, first Station i, then for each outgoing road i->j in
// ascending destination order its class-1 node followed by its class-2 node.
class NodeIndex {
public:
    NodeIndex() = default;
    explicit NodeIndex(const BikeShareModel& model);

    int order() const { return order_; }
    int station_node(int station) const { return station_node_[station]; }
    int road_node(int road, int cls) const { return road_node_[road] + (cls - 1); }

    // Human-readable label, e.g. "S1", "R1->2#1".
    std::string label(int node) const;

    bool is_station_node(int node) const { return node_station_[node] >= 0; }
    int node_station(int node) const { return node_station_[node]; }
    int node_road(int node) const { return node_road_[node]; }
    int node_class(int node) const { return node_class_[node]; }

private:
    int order_ = 0;
    std::vector<int> station_node_;
    std::vector<int> road_node_;   // class-1 node of each road
    std::vector<int> node_station_;  // station id or -1
    std::vector<int> node_road_;     // road id or -1
    std::vector<int> node_class_;    // 1 or 2, 0 for stations
    std::vector<int> from_, to_;     // road endpoints, for labels
};

struct RoutingMatrix {
    Eigen::MatrixXd P;
    NodeIndex index;
};

// Relative arrival rates (visit ratios): the left fixed vector of P with
// e[Station 1] = 1, stored in canonical node order.
struct RelativeArrivalRates {
    Eigen::VectorXd e;

    double station(const NodeIndex& ix, int i) const { return e(ix.station_node(i)); }
    double road(const NodeIndex& ix, int r, int cls) const { return e(ix.road_node(r, cls)); }
};

// Routing rule over virtual nodes, parameterized by the full-station
// probability vector pi:
//   P[Station i, Road(i,j,1)]    = p(i,j)
//   P[Road(i,j,r), Station j]    = 1 - pi[j]
//   P[Road(i,j,r), Road(j,l,2)]  = alpha(j,l) * pi[j]
// Throws DimensionError when pi has the wrong length.
RoutingMatrix build_routing_matrix(const BikeShareModel& model, const Eigen::VectorXd& pi);

// Solves e = e P with the station-1 component pinned to 1 by a dense linear
// solve, dropping the balance row `drop_row` in favor of the normalization
// (exposed so tests can probe solution uniqueness). Throws ReducibleMatrix
// when the system is singular, the residual exceeds 1e-12, or any component
// is not strictly positive.
RelativeArrivalRates solve_relative_rates(const RoutingMatrix& routing, int drop_row = 0);

}  // namespace bikeqn
