#pragma once

#include <Eigen/Dense>

#include "bikeqn/errors.hpp"

namespace bikeqn {

// Markovian arrival process descriptor (C, D): C holds the transition rates
// without an arrival (nonnegative off the diagonal), D the transition rates
// that produce an arrival (nonnegative everywhere). C + D is a conservative
// generator and must be irreducible.
struct MapDescriptor {
    Eigen::MatrixXd C;
    Eigen::MatrixXd D;

    int phases() const { return static_cast<int>(C.rows()); }
};

// Stationary phase distribution and the per-phase arrival rates it induces.
struct PhaseRates {
    Eigen::VectorXd theta;       // stationary distribution of C + D
    Eigen::VectorXd lambda_vec;  // theta * D, componentwise arrival rates
    double lambda_total = 0.0;   // sum(lambda_vec)
};

// True iff the directed graph with an edge u->v whenever M(u,v) > 0 (u != v)
// is strongly connected.
bool generator_irreducible(const Eigen::MatrixXd& M);

// Solves theta (C + D) = 0, theta . 1 = 1 by a dense linear solve. Throws
// SingularGenerator when the generator is reducible or the solve leaves a
// residual above 1e-12 in max norm.
Eigen::VectorXd map_stationary_vector(const MapDescriptor& map);

// theta * D and its total. Throws ZeroPhaseRate when any component of the
// per-phase rate vector vanishes (the product form divides by each one).
PhaseRates phase_arrival_rates(const MapDescriptor& map);

// A MAP whose arrivals form a Poisson stream of rate sum(lambda) carrying
// phase marks distributed as lambda / sum(lambda): D has every row equal to
// lambda, C = -sum(lambda) * I. Used when a station is specified by rates
// alone; it reproduces exactly the given per-phase arrival rates.
MapDescriptor map_from_rates(const Eigen::VectorXd& lambda);

}  // namespace bikeqn
