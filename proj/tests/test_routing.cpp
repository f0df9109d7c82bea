#include <doctest.h>

#include <random>

#include "bikeqn/routing.hpp"
#include "helpers.hpp"

using namespace bikeqn;
using namespace testutil;

TEST_CASE("two-station routing matrix in canonical order") {
    BikeShareModel model = validate_model(two_station_raw({5.0}, {5.0}, 2.0, 3.0, 4.0, 5.0));
    double pi1 = 0.3, pi2 = 0.45;
    Eigen::VectorXd pi(2);
    pi << pi1, pi2;
    RoutingMatrix routing = build_routing_matrix(model, pi);
    REQUIRE(routing.index.order() == 6);

    // canonical order: S1, R12c1, R12c2, S2, R21c1, R21c2
    Eigen::MatrixXd expected(6, 6);
    expected << 0, 1, 0, 0, 0, 0,
                0, 0, 0, 1 - pi2, 0, pi2,
                0, 0, 0, 1 - pi2, 0, pi2,
                0, 0, 0, 0, 1, 0,
                1 - pi1, 0, pi1, 0, 0, 0,
                1 - pi1, 0, pi1, 0, 0, 0;
    CHECK((routing.P - expected).cwiseAbs().maxCoeff() <= 1e-15);

    CHECK(routing.index.label(0) == "S1");
    CHECK(routing.index.label(1) == "R1->2#1");
    CHECK(routing.index.label(2) == "R1->2#2");
    CHECK(routing.index.label(5) == "R2->1#2");
}

TEST_CASE("zero pi sends every road row to its destination station") {
    BikeShareModel model = validate_model(line_raw(0.4, 0.6, 0.3, 0.7));
    RoutingMatrix routing = build_routing_matrix(model, Eigen::VectorXd::Zero(3));
    for (int r = 0; r < model.road_count(); ++r)
        for (int cls = 1; cls <= 2; ++cls) {
            int row = routing.index.road_node(r, cls);
            int dest = routing.index.station_node(model.roads[r].to);
            CHECK(routing.P(row, dest) == doctest::Approx(1.0));
            CHECK(routing.P.row(row).sum() == doctest::Approx(1.0));
        }
}

TEST_CASE("line topology road row carries the retrial split") {
    double p21 = 0.4, p23 = 0.6, a21 = 0.3, a23 = 0.7;
    BikeShareModel model = validate_model(line_raw(p21, p23, a21, a23));
    double pi2 = 0.35;
    Eigen::VectorXd pi(3);
    pi << 0.2, pi2, 0.5;
    RoutingMatrix routing = build_routing_matrix(model, pi);
    REQUIRE(routing.index.order() == 11);

    int row = routing.index.road_node(model.road_index(0, 1), 1);  // R1->2 class 1
    Eigen::VectorXd expected = Eigen::VectorXd::Zero(11);
    expected(routing.index.station_node(1)) = 1 - pi2;
    expected(routing.index.road_node(model.road_index(1, 0), 2)) = a21 * pi2;
    expected(routing.index.road_node(model.road_index(1, 2), 2)) = a23 * pi2;
    CHECK((routing.P.row(row).transpose() - expected).cwiseAbs().maxCoeff() <= 1e-15);
}

TEST_CASE("rows are stochastic for random models and pi") {
    std::mt19937_64 rng(101);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int trial = 0; trial < 300; ++trial) {
        BikeShareModel model = random_model(rng, 5);
        Eigen::VectorXd pi(model.station_count);
        for (int i = 0; i < model.station_count; ++i) pi(i) = unit(rng);
        RoutingMatrix routing = build_routing_matrix(model, pi);
        for (int r = 0; r < routing.index.order(); ++r) {
            CHECK(std::abs(routing.P.row(r).sum() - 1.0) <= 1e-12);
            CHECK(routing.P.row(r).minCoeff() >= 0.0);
            CHECK(routing.P.row(r).maxCoeff() <= 1.0);
        }
    }
}

TEST_CASE("nonzero pattern follows the routing rule") {
    std::mt19937_64 rng(202);
    std::uniform_real_distribution<double> interior(0.01, 0.99);
    for (int trial = 0; trial < 50; ++trial) {
        BikeShareModel model = random_model(rng, 4);
        Eigen::VectorXd pi(model.station_count);
        for (int i = 0; i < model.station_count; ++i) pi(i) = interior(rng);
        RoutingMatrix routing = build_routing_matrix(model, pi);
        const NodeIndex& ix = routing.index;

        Eigen::MatrixXd pattern = Eigen::MatrixXd::Zero(ix.order(), ix.order());
        for (int i = 0; i < model.station_count; ++i)
            for (int r : model.outgoing[i])
                if (model.first_ride_prob(i, model.roads[r].to) > 0.0)
                    pattern(ix.station_node(i), ix.road_node(r, 1)) = 1.0;
        for (int r = 0; r < model.road_count(); ++r) {
            int j = model.roads[r].to;
            for (int cls = 1; cls <= 2; ++cls) {
                pattern(ix.road_node(r, cls), ix.station_node(j)) = 1.0;
                for (int s : model.outgoing[j])
                    if (model.retrial_prob(j, model.roads[s].to) > 0.0)
                        pattern(ix.road_node(r, cls), ix.road_node(s, 2)) = 1.0;
            }
        }
        for (int r = 0; r < ix.order(); ++r)
            for (int c = 0; c < ix.order(); ++c)
                CHECK((routing.P(r, c) != 0.0) == (pattern(r, c) != 0.0));
    }
}

TEST_CASE("two-station traffic solve matches the closed form at (0.2, 0.4)") {
    BikeShareModel model = validate_model(two_station_raw({5.0}, {5.0}, 2.0, 3.0, 4.0, 5.0));
    Eigen::VectorXd pi(2);
    pi << 0.2, 0.4;
    RelativeArrivalRates rates = solve_relative_rates(build_routing_matrix(model, pi));
    // closed form: e = (1, 1, 0.25, 0.75, 0.75, 0.5)
    Eigen::VectorXd expected = two_station_rates_oracle(0.2, 0.4);
    CHECK((rates.e - expected).cwiseAbs().maxCoeff() <= 1e-12);
}

TEST_CASE("ring traffic solve matches the closed form at (0.1, 0.2, 0.3)") {
    BikeShareModel model = validate_model(ring_raw(3, 2.0, 1.5, 2.5));
    Eigen::VectorXd pi(3);
    pi << 0.1, 0.2, 0.3;
    RelativeArrivalRates rates = solve_relative_rates(build_routing_matrix(model, pi));
    Eigen::VectorXd expected = ring_rates_oracle(0.1, 0.2, 0.3);
    CHECK((rates.e - expected).cwiseAbs().maxCoeff() <= 1e-12);
    CHECK(rates.e(3) == doctest::Approx(0.8 / 0.9).epsilon(1e-13));   // e_2
    CHECK(rates.e(6) == doctest::Approx(0.7 / 0.9).epsilon(1e-13));   // e_3
    CHECK(rates.e(2) == doctest::Approx(0.1 / 0.9).epsilon(1e-13));   // R1->2 class 2
}

TEST_CASE("symmetric two-station pi gives equal visit ratios") {
    BikeShareModel model = validate_model(two_station_raw({3.0}, {3.0}, 2.0, 2.0, 4.0, 4.0));
    for (double p : {0.1, 0.35, 0.6}) {
        RelativeArrivalRates rates =
            solve_relative_rates(build_routing_matrix(model, Eigen::Vector2d(p, p)));
        CHECK(rates.e(3) == doctest::Approx(1.0).epsilon(1e-12));  // e_2 = e_1
        CHECK(rates.e(2) == doctest::Approx(p / (1 - p)).epsilon(1e-12));
        CHECK(rates.e(5) == doctest::Approx(p / (1 - p)).epsilon(1e-12));
    }
}

TEST_CASE("closed forms hold for random interior pi on all three topologies") {
    std::mt19937_64 rng(303);
    std::uniform_real_distribution<double> interior(0.01, 0.99);
    BikeShareModel pair = validate_model(two_station_raw({5.0}, {5.0}, 2.0, 3.0, 4.0, 5.0));
    BikeShareModel ring = validate_model(ring_raw(3, 2.0, 1.5, 2.5));
    double p21 = 0.4, p23 = 0.6, a21 = 0.3, a23 = 0.7;
    BikeShareModel line = validate_model(line_raw(p21, p23, a21, a23));

    for (int trial = 0; trial < 100; ++trial) {
        double x = interior(rng), y = interior(rng), z = interior(rng);
        RelativeArrivalRates rp =
            solve_relative_rates(build_routing_matrix(pair, Eigen::Vector2d(x, y)));
        CHECK((rp.e - two_station_rates_oracle(x, y)).cwiseAbs().maxCoeff() <= 1e-10);

        RelativeArrivalRates rr =
            solve_relative_rates(build_routing_matrix(ring, Eigen::Vector3d(x, y, z)));
        CHECK((rr.e - ring_rates_oracle(x, y, z)).cwiseAbs().maxCoeff() <= 1e-10);

        RelativeArrivalRates rl =
            solve_relative_rates(build_routing_matrix(line, Eigen::Vector3d(x, y, z)));
        CHECK((rl.e - line_rates_oracle(x, y, z, p21, p23, a21, a23)).cwiseAbs().maxCoeff() <=
              1e-10);
    }
}

TEST_CASE("solution does not depend on which balance row is dropped") {
    std::mt19937_64 rng(404);
    std::uniform_real_distribution<double> interior(0.05, 0.95);
    for (int trial = 0; trial < 25; ++trial) {
        BikeShareModel model = random_model(rng, 4);
        Eigen::VectorXd pi(model.station_count);
        for (int i = 0; i < model.station_count; ++i) pi(i) = interior(rng);
        RoutingMatrix routing = build_routing_matrix(model, pi);
        RelativeArrivalRates base = solve_relative_rates(routing, 0);
        for (int drop : {1, routing.index.order() / 2, routing.index.order() - 1}) {
            RelativeArrivalRates other = solve_relative_rates(routing, drop);
            CHECK((base.e - other.e).cwiseAbs().maxCoeff() <= 1e-10);
        }
        CHECK(base.e.minCoeff() > 0.0);
    }
}

TEST_CASE("degenerate pi is reported as reducible") {
    BikeShareModel model = validate_model(two_station_raw({5.0}, {5.0}, 2.0, 3.0, 4.0, 5.0));
    // pi = 0 starves both class-2 nodes of inflow
    RoutingMatrix routing = build_routing_matrix(model, Eigen::Vector2d(0.0, 0.0));
    CHECK_THROWS_AS(solve_relative_rates(routing), ReducibleMatrix);
}

TEST_CASE("pi of the wrong length is rejected") {
    BikeShareModel model = validate_model(two_station_raw({5.0}, {5.0}, 2.0, 3.0, 4.0, 5.0));
    CHECK_THROWS_AS(build_routing_matrix(model, Eigen::VectorXd::Constant(3, 0.2)),
                    DimensionError);
}
