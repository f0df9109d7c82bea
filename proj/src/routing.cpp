#include "bikeqn/routing.hpp"

#include <cmath>

namespace bikeqn {

NodeIndex::NodeIndex(const BikeShareModel& model) {
    station_node_.assign(model.station_count, -1);
    road_node_.assign(model.road_count(), -1);
    for (int i = 0; i < model.station_count; ++i) {
        station_node_[i] = order_;
        node_station_.push_back(i);
        node_road_.push_back(-1);
        node_class_.push_back(0);
        ++order_;
        for (int r : model.outgoing[i]) {
            road_node_[r] = order_;
            for (int cls = 1; cls <= 2; ++cls) {
                node_station_.push_back(-1);
                node_road_.push_back(r);
                node_class_.push_back(cls);
                ++order_;
            }
        }
    }
    // Pin the road endpoints for labeling.
    from_.assign(model.road_count(), 0);
    to_.assign(model.road_count(), 0);
    for (int r = 0; r < model.road_count(); ++r) {
        from_[r] = model.roads[r].from;
        to_[r] = model.roads[r].to;
    }
}

std::string NodeIndex::label(int node) const {
    if (node_station_[node] >= 0) return "S" + std::to_string(node_station_[node] + 1);
    int r = node_road_[node];
    return "R" + std::to_string(from_[r] + 1) + "->" + std::to_string(to_[r] + 1) + "#" +
           std::to_string(node_class_[node]);
}

RoutingMatrix build_routing_matrix(const BikeShareModel& model, const Eigen::VectorXd& pi) {
    if (pi.size() != model.station_count)
        throw DimensionError("pi has length " + std::to_string(pi.size()) + ", expected " +
                             std::to_string(model.station_count));

    NodeIndex index(model);
    Eigen::MatrixXd P = Eigen::MatrixXd::Zero(index.order(), index.order());

    for (int i = 0; i < model.station_count; ++i)
        for (int r : model.outgoing[i])
            P(index.station_node(i), index.road_node(r, 1)) = model.first_ride_prob(i, model.roads[r].to);

    for (int r = 0; r < model.road_count(); ++r) {
        int j = model.roads[r].to;
        for (int cls = 1; cls <= 2; ++cls) {
            int row = index.road_node(r, cls);
            P(row, index.station_node(j)) = 1.0 - pi(j);
            for (int s : model.outgoing[j])
                P(row, index.road_node(s, 2)) = model.retrial_prob(j, model.roads[s].to) * pi(j);
        }
    }
    return RoutingMatrix{std::move(P), std::move(index)};
}

RelativeArrivalRates solve_relative_rates(const RoutingMatrix& routing, int drop_row) {
    const auto& P = routing.P;
    const int n = static_cast<int>(P.rows());
    if (drop_row < 0 || drop_row >= n)
        throw DimensionError("drop_row out of range");

    // e P = e  <=>  (P^T - I) e^T = 0, with the dropped balance equation
    // replaced by e[Station 1] = 1.
    Eigen::MatrixXd A = P.transpose() - Eigen::MatrixXd::Identity(n, n);
    const int pin = routing.index.station_node(0);
    A.row(drop_row).setZero();
    A(drop_row, pin) = 1.0;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    b(drop_row) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
        throw ReducibleMatrix("traffic equations are singular; routing matrix is reducible");
    Eigen::VectorXd e = lu.solve(b);

    double residual = ((e.transpose() * P) - e.transpose()).cwiseAbs().maxCoeff();
    if (!(residual <= 1e-12))
        throw ReducibleMatrix("traffic equation residual " + std::to_string(residual) +
                              " exceeds 1e-12");
    if (!(e.minCoeff() > 0.0))
        throw ReducibleMatrix("relative arrival rates are not strictly positive; keep pi inside (0,1)");
    return RelativeArrivalRates{std::move(e)};
}

}  // namespace bikeqn
