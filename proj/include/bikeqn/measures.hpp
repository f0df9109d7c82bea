#pragma once

#include <vector>

#include <Eigen/Dense>

#include "bikeqn/productform.hpp"

namespace bikeqn {

struct RoadQueueStat {
    int from = 0;   // 0-based
    int to = 0;
    double class1 = 0.0;
    double class2 = 0.0;
    double total = 0.0;
};

struct PerformanceReport {
    // Expected number of problematic (empty or full) stations, in [0, N],
    // and the same divided by N.
    double problematic = 0.0;
    double problematic_fraction = 0.0;
    Eigen::VectorXd empty_prob;
    Eigen::VectorXd full_prob;
    Eigen::VectorXd mean_station;
    std::vector<RoadQueueStat> mean_road;
    Eigen::VectorXd pi;
    double log_G = 0.0;
};

// sum_i (P{station i empty} + P{station i full})
double problematic_measure(const ProductFormContext& ctx);

// Expected number of bikes parked at station i.
double mean_station_queue(const ProductFormContext& ctx, int i);

// Expected number of bikes riding on road from->to, both classes. Throws
// UnknownRoad when the road does not exist. Stations are 0-based.
double mean_road_queue(const ProductFormContext& ctx, int from, int to);

PerformanceReport build_report(const ProductFormContext& ctx);

}  // namespace bikeqn
