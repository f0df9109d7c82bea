#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "bikeqn/model.hpp"
#include "bikeqn/routing.hpp"
#include "bikeqn/statespace.hpp"

namespace bikeqn {

// Which per-road term the unnormalized weight uses.
//   paper: (e1/(m1*mu))^m1 (e2/(m2*xi))^m2 times the class multinomial
//          (a zero count contributes factor 1),
//   bcmp:  the classical infinite-server term (e1/mu)^m1/m1! (e2/xi)^m2/m2!.
// The two coincide for road populations of 0 or 1 bikes.
enum class RoadFactorConvention { paper, bcmp };

// Station term: multinomial over the phase split times
// prod_v (e_i / lambda_v)^{n_v}, evaluated in log space.
double log_station_factor(std::span<const int> counts, double e_i,
                          const Eigen::VectorXd& lambda);
double station_factor(std::span<const int> counts, double e_i, const Eigen::VectorXd& lambda);

// Road term for one road under the given convention, log space.
double log_road_factor(int m1, int m2, double e1, double e2, double mu, double xi,
                       RoadFactorConvention convention);
double road_factor(int m1, int m2, double e1, double e2, double mu, double xi,
                   RoadFactorConvention convention);

// Log of the unnormalized product-form weight of one state.
double log_state_weight(const BikeShareModel& model, const NodeIndex& index,
                        const RelativeArrivalRates& rates, const StateLayout& layout,
                        std::span<const int> coords, RoadFactorConvention convention);

// log of the normalization constant: log sum over the state space of the
// unnormalized weights, accumulated with a running-max log-sum-exp.
double log_normalization_constant(const BikeShareModel& model, const NodeIndex& index,
                                  const RelativeArrivalRates& rates,
                                  RoadFactorConvention convention,
                                  std::uint64_t max_states = 10'000'000);

// Everything the downstream consumers need at one pi iterate, accumulated in
// a single enumeration pass: the normalization constant, the per-station
// occupancy marginals and the per-road-class mean populations. Holds its own
// copy of the model so the context can outlive the caller's instance.
struct ProductFormContext {
    BikeShareModel model;
    Eigen::VectorXd pi;
    RoadFactorConvention convention = RoadFactorConvention::paper;
    NodeIndex index;
    RelativeArrivalRates rates;
    double log_G = 0.0;
    // marginals[i][k] = P{station i parks k bikes}, k = 0..K
    std::vector<Eigen::VectorXd> marginals;
    // mean_riding(r, cls-1) = E[# class-cls bikes on road r]
    Eigen::MatrixXd mean_riding;

    Eigen::VectorXd station_marginal(int i) const { return marginals[i]; }
};

// Builds the context at the given full-station probability vector. pi is
// used verbatim; callers keep it inside (0,1) so the routing matrix stays
// irreducible. Throws ReducibleMatrix / StateSpaceTooLarge.
ProductFormContext build_context(const BikeShareModel& model, const Eigen::VectorXd& pi,
                                 RoadFactorConvention convention,
                                 std::uint64_t max_states = 10'000'000);

// Steady-state probability of one structured state; exactly 0 for states
// outside the state space (wrong fleet total or an over-capacity station).
double joint_probability(const ProductFormContext& ctx, const NetworkState& state);

}  // namespace bikeqn
