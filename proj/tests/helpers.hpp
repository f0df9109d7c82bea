// Shared model builders and independent oracles for the test suites. The
// oracles re-derive expected values through routes that do not touch the
// implementation under test (closed-form traffic solutions, factorial
// arithmetic, brute-force sums).
#pragma once

#include <cmath>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "bikeqn/model.hpp"

namespace testutil {

inline std::string fixture_path(const std::string& name) {
    return std::string(BIKEQN_FIXTURE_DIR) + "/" + name;
}

inline std::string read_fixture(const std::string& name) {
    std::ifstream in(fixture_path(name), std::ios::binary);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

inline bikeqn::StationSpec lambda_station(std::initializer_list<double> rates) {
    bikeqn::StationSpec st;
    st.lambda_vec = Eigen::VectorXd(rates.size());
    int k = 0;
    for (double r : rates) st.lambda_vec(k++) = r;
    return st;
}

// Two stations joined by roads 1->2 and 2->1, p = alpha = 1.
inline bikeqn::RawModel two_station_raw(std::initializer_list<double> lambda1,
                                        std::initializer_list<double> lambda2, double mu12,
                                        double mu21, double xi12, double xi21, int bikes = 2,
                                        int capacity = 3) {
    bikeqn::RawModel raw;
    raw.station_count = 2;
    raw.bikes_per_station = bikes;
    raw.dock_capacity = capacity;
    raw.stations = {lambda_station(lambda1), lambda_station(lambda2)};
    raw.roads = {{0, 1, mu12, xi12}, {1, 0, mu21, xi21}};
    raw.first_ride_prob = Eigen::MatrixXd::Zero(2, 2);
    raw.first_ride_prob(0, 1) = 1.0;
    raw.first_ride_prob(1, 0) = 1.0;
    raw.retrial_prob = raw.first_ride_prob;
    return raw;
}

// The golden two-station instance family: lambda1 = (l11, 7), lambda2 = (5, 5),
// mu = (2, 3), xi = (4, 5), 2 bikes per station, 3 docks.
inline bikeqn::BikeShareModel golden_two_station(double l11) {
    return bikeqn::validate_model(two_station_raw({l11, 7.0}, {5.0, 5.0}, 2.0, 3.0, 4.0, 5.0));
}

// Directed ring 1 -> 2 -> ... -> N -> 1 with identical parameters.
inline bikeqn::RawModel ring_raw(int n, double lambda, double mu, double xi, int bikes = 1,
                                 int capacity = 2) {
    bikeqn::RawModel raw;
    raw.station_count = n;
    raw.bikes_per_station = bikes;
    raw.dock_capacity = capacity;
    raw.first_ride_prob = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        raw.stations.push_back(lambda_station({lambda}));
        int j = (i + 1) % n;
        raw.roads.push_back({i, j, mu, xi});
        raw.first_ride_prob(i, j) = 1.0;
    }
    raw.retrial_prob = raw.first_ride_prob;
    return raw;
}

// Line 1 <-> 2 <-> 3 with split routing out of station 2.
inline bikeqn::RawModel line_raw(double p21, double p23, double a21, double a23) {
    bikeqn::RawModel raw;
    raw.station_count = 3;
    raw.bikes_per_station = 1;
    raw.dock_capacity = 2;
    raw.stations = {lambda_station({2.0}), lambda_station({3.0}), lambda_station({2.5})};
    raw.roads = {{0, 1, 2.0, 4.0}, {1, 0, 3.0, 5.0}, {1, 2, 2.5, 4.5}, {2, 1, 3.5, 5.5}};
    raw.first_ride_prob = Eigen::MatrixXd::Zero(3, 3);
    raw.retrial_prob = Eigen::MatrixXd::Zero(3, 3);
    raw.first_ride_prob(0, 1) = 1.0;
    raw.retrial_prob(0, 1) = 1.0;
    raw.first_ride_prob(1, 0) = p21;
    raw.first_ride_prob(1, 2) = p23;
    raw.retrial_prob(1, 0) = a21;
    raw.retrial_prob(1, 2) = a23;
    raw.first_ride_prob(2, 1) = 1.0;
    raw.retrial_prob(2, 1) = 1.0;
    return raw;
}

// Random strongly connected model: a ring plus random extra roads, random
// routing rows, direct-rate stations.
inline bikeqn::BikeShareModel random_model(std::mt19937_64& rng, int max_stations = 4) {
    std::uniform_int_distribution<int> station_count(2, max_stations);
    std::uniform_real_distribution<double> unit(0.1, 1.0);
    const int n = station_count(rng);
    const int bikes = 1 + static_cast<int>(rng() % 2);
    const int max_cap = std::min(bikes + 2, n * bikes);
    std::uniform_int_distribution<int> cap_pick(bikes + 1, std::max(bikes + 1, max_cap));

    bikeqn::RawModel raw;
    raw.station_count = n;
    raw.bikes_per_station = bikes;
    raw.dock_capacity = cap_pick(rng);

    Eigen::MatrixXd adjacency = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) adjacency(i, (i + 1) % n) = 1.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j && adjacency(i, j) == 0.0 && rng() % 3 == 0) adjacency(i, j) = 1.0;

    for (int i = 0; i < n; ++i) {
        int phases = 1 + static_cast<int>(rng() % 2);
        bikeqn::StationSpec st;
        st.lambda_vec = Eigen::VectorXd(phases);
        for (int v = 0; v < phases; ++v) st.lambda_vec(v) = 0.5 + 4.0 * unit(rng);
        raw.stations.push_back(st);
        for (int j = 0; j < n; ++j)
            if (adjacency(i, j) > 0.0)
                raw.roads.push_back({i, j, 0.5 + 3.0 * unit(rng), 0.5 + 3.0 * unit(rng)});
    }

    raw.first_ride_prob = Eigen::MatrixXd::Zero(n, n);
    raw.retrial_prob = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i) {
        double p_total = 0.0, a_total = 0.0;
        for (int j = 0; j < n; ++j)
            if (adjacency(i, j) > 0.0) {
                raw.first_ride_prob(i, j) = unit(rng);
                raw.retrial_prob(i, j) = unit(rng);
                p_total += raw.first_ride_prob(i, j);
                a_total += raw.retrial_prob(i, j);
            }
        for (int j = 0; j < n; ++j) {
            raw.first_ride_prob(i, j) /= p_total;
            raw.retrial_prob(i, j) /= a_total;
        }
    }
    return bikeqn::validate_model(raw);
}

// Closed-form traffic solutions for the three reference topologies, in
// canonical node order.

// Two stations, roads 1->2 and 2->1:
// [S1, R12c1, R12c2, S2, R21c1, R21c2]
inline Eigen::VectorXd two_station_rates_oracle(double pi1, double pi2) {
    Eigen::VectorXd e(6);
    e << 1.0, 1.0, pi1 / (1.0 - pi1), (1.0 - pi2) / (1.0 - pi1), (1.0 - pi2) / (1.0 - pi1),
        pi2 / (1.0 - pi1);
    return e;
}

// Directed 3-ring, roads 1->2, 2->3, 3->1:
// [S1, R12c1, R12c2, S2, R23c1, R23c2, S3, R31c1, R31c2]
inline Eigen::VectorXd ring_rates_oracle(double pi1, double pi2, double pi3) {
    Eigen::VectorXd e(9);
    double q1 = 1.0 - pi1;
    e << 1.0, 1.0, pi1 / q1, (1.0 - pi2) / q1, (1.0 - pi2) / q1, pi2 / q1, (1.0 - pi3) / q1,
        (1.0 - pi3) / q1, pi3 / q1;
    return e;
}

// Line 1 <-> 2 <-> 3, roads 1->2, 2->1, 2->3, 3->2:
// [S1, R12c1, R12c2, S2, R21c1, R21c2, R23c1, R23c2, S3, R32c1, R32c2]
inline Eigen::VectorXd line_rates_oracle(double pi1, double pi2, double pi3, double p21,
                                         double p23, double a21, double a23) {
    double denom = (1.0 - pi1) * ((a21 - p21) * pi2 + p21);
    double branch23 = (a23 - p23) * pi2 + p23;
    Eigen::VectorXd e(11);
    e << 1.0, 1.0, pi1 / (1.0 - pi1), (1.0 - pi2) / denom, p21 * (1.0 - pi2) / denom,
        a21 * pi2 / denom, p23 * (1.0 - pi2) / denom, a23 * pi2 / denom,
        (1.0 - pi3) * branch23 / denom, (1.0 - pi3) * branch23 / denom,
        pi3 * branch23 / denom;
    return e;
}

inline double factorial_oracle(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

}  // namespace testutil
