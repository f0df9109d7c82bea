#include <doctest.h>

#include "bikeqn/config.hpp"
#include "bikeqn/pathgraph.hpp"
#include "helpers.hpp"

using namespace bikeqn;
using namespace testutil;

TEST_CASE("golden fixture parses into the expected model") {
    ParsedConfig config = parse_config(read_fixture("example_four_l5.json"));
    BikeShareModel model = validate_model(config.raw);
    CHECK(model.station_count == 2);
    CHECK(model.bikes_per_station == 2);
    CHECK(model.dock_capacity == 3);
    CHECK(model.stations[0].lambda_vec(0) == 5.0);
    CHECK(model.stations[0].lambda_vec(1) == 7.0);
    CHECK(model.roads[0].mu == 2.0);
    CHECK(model.roads[0].xi == 4.0);
    CHECK(model.first_ride_prob(0, 1) == 1.0);
    CHECK(is_irreducible(build_path_graph(model)));
    // defaults
    CHECK(config.solver.tol == 1e-8);
    CHECK(config.solver.damping == 0.5);
    CHECK(config.solver.max_iter == 500);
    CHECK(config.solver.convention == RoadFactorConvention::paper);
    CHECK(config.sim.warmup == 0.2);
}

TEST_CASE("map-bearing fixture parses the matrices") {
    ParsedConfig config = parse_config(read_fixture("example_one.json"));
    REQUIRE(config.raw.stations[0].map.has_value());
    CHECK(config.raw.stations[0].map->C(0, 0) == -3.0);
    CHECK(config.raw.stations[0].map->D(1, 0) == 1.0);
    BikeShareModel model = validate_model(config.raw);
    CHECK(model.stations[0].lambda_vec(0) == doctest::Approx(5.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("unknown keys are rejected at every level") {
    std::string base = read_fixture("example_four_l5.json");
    CHECK_THROWS_AS(parse_config("{\"bogus\": 1, " + base.substr(1)), SchemaError);

    std::string with_station_key = base;
    auto pos = with_station_key.find("\"count\"");
    with_station_key.insert(pos, "\"extra\": 1, ");
    CHECK_THROWS_AS(parse_config(with_station_key), SchemaError);

    std::string with_solver = base;
    with_solver.insert(with_solver.rfind('}'), ", \"solver\": {\"unknown_option\": 2}");
    CHECK_THROWS_AS(parse_config(with_solver), SchemaError);
}

TEST_CASE("malformed documents raise schema errors") {
    CHECK_THROWS_AS(parse_config("not json"), SchemaError);
    CHECK_THROWS_AS(parse_config("[1,2,3]"), SchemaError);
    CHECK_THROWS_AS(parse_config("{}"), SchemaError);
    CHECK_THROWS_AS(parse_config(R"({"stations": 5, "roads": [], "p": {}, "alpha": {}})"),
                    SchemaError);
}

TEST_CASE("routing keys must name existing stations and parse as i->j") {
    std::string base = read_fixture("example_four_l5.json");
    std::string bad_key = base;
    bad_key.replace(bad_key.find("\"1->2\""), 6, "\"1=>2\"");
    CHECK_THROWS_AS(parse_config(bad_key), SchemaError);

    std::string out_of_range = base;
    out_of_range.replace(out_of_range.find("\"1->2\""), 6, "\"1->9\"");
    CHECK_THROWS_AS(parse_config(out_of_range), SchemaError);
}

TEST_CASE("stations must carry exactly one of map or lambda") {
    CHECK_THROWS_AS(parse_config(R"({
      "stations": {"count": 2, "capacity": 3, "initial_bikes": 2,
                   "arrivals": [{}, {"lambda": [5.0]}]},
      "roads": [{"from": 1, "to": 2, "mu": 1.0, "xi": 1.0},
                {"from": 2, "to": 1, "mu": 1.0, "xi": 1.0}],
      "p": {"1->2": 1.0, "2->1": 1.0},
      "alpha": {"1->2": 1.0, "2->1": 1.0}
    })"),
                    SchemaError);
}

TEST_CASE("solver and sim sections round-trip through the canonical form") {
    std::string text = R"({
      "stations": {"count": 2, "capacity": 3, "initial_bikes": 2,
                   "arrivals": [{"lambda": [5.0, 7.0]}, {"lambda": [5.0, 5.0]}]},
      "roads": [{"from": 1, "to": 2, "mu": 2.0, "xi": 4.0},
                {"from": 2, "to": 1, "mu": 3.0, "xi": 5.0}],
      "p": {"1->2": 1.0, "2->1": 1.0},
      "alpha": {"1->2": 1.0, "2->1": 1.0},
      "solver": {"tol": 1e-9, "damping": 0.4, "max_iter": 321,
                 "road_factor_convention": "bcmp", "init": 0.2},
      "sim": {"events": 5000, "warmup": 0.1, "seed": 17, "replications": 4}
    })";
    ParsedConfig config = parse_config(text);
    CHECK(config.solver.tol == 1e-9);
    CHECK(config.solver.damping == 0.4);
    CHECK(config.solver.max_iter == 321);
    CHECK(config.solver.convention == RoadFactorConvention::bcmp);
    REQUIRE(config.solver.init.has_value());
    CHECK((*config.solver.init)(1) == 0.2);
    CHECK(config.sim.events == 5000);
    CHECK(config.sim.seed == 17);

    ParsedConfig again = parse_config(echo_config(config));
    CHECK(validate_model(config.raw) == validate_model(again.raw));
    CHECK(again.solver.tol == config.solver.tol);
    CHECK(again.solver.damping == config.solver.damping);
    CHECK(again.solver.max_iter == config.solver.max_iter);
    CHECK(again.solver.convention == config.solver.convention);
    CHECK(again.sim.events == config.sim.events);
    CHECK(again.sim.seed == config.sim.seed);
    CHECK(again.sim.replications == config.sim.replications);

    // the canonical form is a fixed point of echo(parse(.))
    CHECK(echo_config(again) == echo_config(config));
}

TEST_CASE("echo round-trips the map form too") {
    ParsedConfig config = parse_config(read_fixture("example_one.json"));
    ParsedConfig again = parse_config(echo_config(config));
    CHECK(validate_model(config.raw) == validate_model(again.raw));
}

TEST_CASE("fixed point config carries the solver options") {
    ParsedConfig config = parse_config(read_fixture("example_four_l5.json"));
    config.solver.tol = 1e-9;
    config.solver.max_states = 12345;
    FixedPointConfig cfg = to_fixed_point_config(config.solver);
    CHECK(cfg.tol == 1e-9);
    CHECK(cfg.max_states == 12345);
    CHECK(cfg.init.size() == 0);
}

TEST_CASE("csv emitters produce labeled tables") {
    BikeShareModel model = golden_two_station(5.0);
    RoutingMatrix routing = build_routing_matrix(model, Eigen::Vector2d(0.1, 0.2));
    std::string csv = routing_csv(routing);
    CHECK(csv.find("node,S1,R1->2#1,R1->2#2,S2,R2->1#1,R2->1#2") == 0);
    CHECK(csv.find("\nS1,0,1,0,0,0,0\n") != std::string::npos);

    ProductFormContext ctx =
        build_context(model, Eigen::Vector2d(0.1, 0.2), RoadFactorConvention::paper);
    std::string marginals = marginals_csv(ctx);
    CHECK(marginals.find("station,bikes,probability\n1,0,") == 0);

    PerformanceReport report = build_report(ctx);
    std::string stations = stations_csv(report);
    CHECK(stations.find("station,empty_prob,full_prob,mean_bikes\n") == 0);
}

TEST_CASE("negative counters in solver and sim sections are schema errors") {
    std::string base = read_fixture("example_four_l5.json");
    std::string with_neg = base;
    with_neg.insert(with_neg.rfind('}'), ", \"sim\": {\"events\": -5}");
    CHECK_THROWS_AS(parse_config(with_neg), SchemaError);
    std::string with_neg_cap = base;
    with_neg_cap.insert(with_neg_cap.rfind('}'), ", \"solver\": {\"max_states\": -1}");
    CHECK_THROWS_AS(parse_config(with_neg_cap), SchemaError);
}
