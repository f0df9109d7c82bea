#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "bikeqn/model.hpp"

namespace bikeqn {

// Deterministic seed derivation: one independent stream per
// (replication, station, purpose). Purposes: 0 = MAP transitions,
// 1 = routing choices, 2 = ride durations.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t station, std::uint64_t purpose);

// Continuous-time MAP sampler: sojourns are exponential with the diagonal
// rate of C, transitions are drawn proportionally to the off-diagonal C row
// (no arrival) and the full D row (arrival). The initial phase is drawn from
// the stationary distribution of C + D.
class MapArrivalProcess {
public:
    MapArrivalProcess(const MapDescriptor& map, std::uint64_t seed);

    struct Event {
        double time = 0.0;
        int phase = 0;   // phase after the transition
        bool arrival = false;
    };

    // Next MAP transition, hidden or arrival.
    Event step();

    struct Arrival {
        double time = 0.0;
        int phase = 0;
    };

    // Next arrival, skipping hidden transitions.
    Arrival next_arrival();

    int phase() const { return phase_; }
    double time() const { return time_; }

private:
    Eigen::MatrixXd C_;
    Eigen::MatrixXd D_;
    std::mt19937_64 rng_;
    std::vector<double> weights_;  // scratch for transition draws
    int phase_ = 0;
    double time_ = 0.0;
};

struct SimConfig {
    std::uint64_t events = 1'000'000;  // scheduler events per replication
    double warmup = 0.2;               // fraction of events discarded
    std::uint64_t seed = 42;
    int replications = 10;
};

// Time-averaged statistics of one replication (or the pooled mean /
// confidence half-width across replications).
struct SimStats {
    Eigen::VectorXd full_prob;
    Eigen::VectorXd empty_prob;
    Eigen::VectorXd mean_bikes;
    Eigen::VectorXd lost_rate;      // lost arrivals per unit time
    Eigen::VectorXd arrival_rate;   // observed MAP arrivals per unit time
    Eigen::MatrixXd riding_mean;    // roads x 2, time-averaged populations
    Eigen::MatrixXd ride_starts;    // roads x 2, post-warmup counts
    double first_rides = 0.0;
    double retrial_rides = 0.0;
    double blocked_returns = 0.0;
    double span = 0.0;              // measured time span
};

struct SimReport {
    SimStats mean;       // replication means
    SimStats halfwidth;  // 95% confidence half-widths (zero when replications == 1)
    int replications = 1;
    std::uint64_t events_per_replication = 0;
    double warmup = 0.0;
    std::uint64_t seed = 0;
};

// Event-driven simulation of the physical system: MAP user arrivals rent
// bikes (arrivals at an empty station are lost), first rides are
// exponential(mu) with routing p, a bike returned to a full station
// immediately re-rides with routing alpha and exponential(xi) durations
// until a free dock is found. Statistics are time-weighted and collected
// after the warmup fraction of events, per replication; the fleet total is
// checked at every event.
SimReport simulate(const BikeShareModel& model, const SimConfig& cfg);

}  // namespace bikeqn
