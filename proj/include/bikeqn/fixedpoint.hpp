#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "bikeqn/productform.hpp"

namespace bikeqn {

struct FixedPointConfig {
    double tol = 1e-8;
    double damping = 0.5;       // Picard step factor in (0, 1]
    int max_iter = 500;
    Eigen::VectorXd init;       // empty means all components 0.1
    RoadFactorConvention convention = RoadFactorConvention::paper;
    std::uint64_t max_states = 10'000'000;
};

struct FixedPointResult {
    Eigen::VectorXd pi;
    double residual = 0.0;          // max-norm of pi - F(pi) at the result
    int iterations = 0;
    std::vector<double> trace;      // residual per iteration
    bool converged = false;
};

// F(pi): full-station probabilities read off the product form built at pi.
Eigen::VectorXd evaluate_map(const BikeShareModel& model, const Eigen::VectorXd& pi,
                             RoadFactorConvention convention,
                             std::uint64_t max_states = 10'000'000);

// Damped Picard iteration pi <- (1-d) pi + d F(pi), iterates clamped to
// [1e-9, 1-1e-9] so the routing matrix stays irreducible. Convergence is
// declared on the residual ||pi - F(pi)||_inf; the damping factor is halved
// whenever the residual increases. On max_iter the best iterate seen is
// returned with converged = false.
FixedPointResult solve_fixed_point(const BikeShareModel& model, const FixedPointConfig& cfg);

}  // namespace bikeqn
