#include "bikeqn/config.hpp"

#include <json.hpp>

#include <sstream>

namespace bikeqn {

using nlohmann::json;

namespace {

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> allowed,
                         const std::string& where) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* key : allowed)
            if (it.key() == key) known = true;
        if (!known)
            throw SchemaError("unknown key \"" + it.key() + "\" in " + where);
    }
}

const json& require(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) throw SchemaError("missing key \"" + std::string(key) + "\" in " + where);
    return *it;
}

int as_int(const json& v, const std::string& where) {
    if (!v.is_number_integer())
        throw SchemaError(where + " must be an integer");
    return v.get<int>();
}

double as_number(const json& v, const std::string& where) {
    if (!v.is_number()) throw SchemaError(where + " must be a number");
    return v.get<double>();
}

std::uint64_t as_count(const json& v, const std::string& where) {
    double value = as_number(v, where);
    if (value < 0.0) throw SchemaError(where + " must be nonnegative");
    return static_cast<std::uint64_t>(value);
}

Eigen::MatrixXd as_matrix(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw SchemaError(where + " must be a non-empty matrix");
    const size_t rows = v.size();
    size_t cols = 0;
    for (size_t r = 0; r < rows; ++r) {
        if (!v[r].is_array()) throw SchemaError(where + " must be a matrix of rows");
        if (r == 0)
            cols = v[r].size();
        else if (v[r].size() != cols)
            throw SchemaError(where + " has ragged rows");
    }
    if (cols == 0) throw SchemaError(where + " has empty rows");
    Eigen::MatrixXd out(rows, cols);
    for (size_t r = 0; r < rows; ++r)
        for (size_t c = 0; c < cols; ++c)
            out(static_cast<int>(r), static_cast<int>(c)) =
                as_number(v[r][c], where + " entry");
    return out;
}

Eigen::VectorXd as_vector(const json& v, const std::string& where) {
    if (!v.is_array() || v.empty()) throw SchemaError(where + " must be a non-empty array");
    Eigen::VectorXd out(v.size());
    for (size_t k = 0; k < v.size(); ++k) out(static_cast<int>(k)) = as_number(v[k], where);
    return out;
}

// "i->j" keys of the sparse probability maps; 1-based in the document.
std::pair<int, int> parse_edge_key(const std::string& key) {
    auto arrow = key.find("->");
    if (arrow == std::string::npos)
        throw SchemaError("routing key \"" + key + "\" is not of the form \"i->j\"");
    try {
        size_t used = 0;
        int from = std::stoi(key.substr(0, arrow), &used);
        if (used != arrow) throw std::invalid_argument(key);
        std::string rest = key.substr(arrow + 2);
        int to = std::stoi(rest, &used);
        if (used != rest.size()) throw std::invalid_argument(key);
        return {from - 1, to - 1};
    } catch (const std::exception&) {
        throw SchemaError("routing key \"" + key + "\" is not of the form \"i->j\"");
    }
}

Eigen::MatrixXd parse_prob_map(const json& obj, int n, const std::string& where) {
    if (!obj.is_object()) throw SchemaError(where + " must be an object of \"i->j\" keys");
    Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        auto [from, to] = parse_edge_key(it.key());
        if (from < 0 || from >= n || to < 0 || to >= n)
            throw SchemaError(where + " key \"" + it.key() + "\" references an unknown station");
        out(from, to) = as_number(it.value(), where + " \"" + it.key() + "\"");
    }
    return out;
}

RoadFactorConvention parse_convention(const json& v) {
    std::string s = v.is_string() ? v.get<std::string>() : "";
    if (s == "paper") return RoadFactorConvention::paper;
    if (s == "bcmp") return RoadFactorConvention::bcmp;
    throw SchemaError("road_factor_convention must be \"paper\" or \"bcmp\"");
}

json vector_to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (int i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

json matrix_to_json(const Eigen::MatrixXd& m) {
    json out = json::array();
    for (int r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (int c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        out.push_back(row);
    }
    return out;
}

json prob_map_to_json(const Eigen::MatrixXd& probs) {
    json out = json::object();
    for (int i = 0; i < probs.rows(); ++i)
        for (int j = 0; j < probs.cols(); ++j)
            if (probs(i, j) != 0.0)
                out[std::to_string(i + 1) + "->" + std::to_string(j + 1)] = probs(i, j);
    return out;
}

}  // namespace

ParsedConfig parse_config(const std::string& json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw SchemaError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw SchemaError("config root must be an object");
    reject_unknown_keys(doc, {"stations", "roads", "p", "alpha", "solver", "sim"}, "config root");

    ParsedConfig config;
    RawModel& raw = config.raw;

    const json& stations = require(doc, "stations", "config root");
    if (!stations.is_object()) throw SchemaError("\"stations\" must be an object");
    reject_unknown_keys(stations, {"count", "capacity", "initial_bikes", "arrivals"}, "stations");
    raw.station_count = as_int(require(stations, "count", "stations"), "stations.count");
    raw.dock_capacity = as_int(require(stations, "capacity", "stations"), "stations.capacity");
    raw.bikes_per_station =
        as_int(require(stations, "initial_bikes", "stations"), "stations.initial_bikes");
    if (raw.station_count < 1) throw SchemaError("stations.count must be positive");

    const json& arrivals = require(stations, "arrivals", "stations");
    if (!arrivals.is_array())
        throw SchemaError("stations.arrivals must be an array with one entry per station");
    for (size_t i = 0; i < arrivals.size(); ++i) {
        const json& entry = arrivals[i];
        std::string where = "stations.arrivals[" + std::to_string(i + 1) + "]";
        if (!entry.is_object()) throw SchemaError(where + " must be an object");
        reject_unknown_keys(entry, {"map", "lambda"}, where);
        StationSpec spec;
        if (entry.contains("map") == entry.contains("lambda"))
            throw SchemaError(where + " must carry exactly one of \"map\" or \"lambda\"");
        if (entry.contains("map")) {
            const json& map = entry["map"];
            if (!map.is_object()) throw SchemaError(where + ".map must be an object");
            reject_unknown_keys(map, {"C", "D"}, where + ".map");
            MapDescriptor descriptor;
            descriptor.C = as_matrix(require(map, "C", where + ".map"), where + ".map.C");
            descriptor.D = as_matrix(require(map, "D", where + ".map"), where + ".map.D");
            spec.map = std::move(descriptor);
            spec.lambda_vec = Eigen::VectorXd();
        } else {
            spec.lambda_vec = as_vector(entry["lambda"], where + ".lambda");
        }
        raw.stations.push_back(std::move(spec));
    }

    const json& roads = require(doc, "roads", "config root");
    if (!roads.is_array()) throw SchemaError("\"roads\" must be an array");
    for (size_t r = 0; r < roads.size(); ++r) {
        const json& entry = roads[r];
        std::string where = "roads[" + std::to_string(r + 1) + "]";
        if (!entry.is_object()) throw SchemaError(where + " must be an object");
        reject_unknown_keys(entry, {"from", "to", "mu", "xi"}, where);
        RoadSpec road;
        road.from = as_int(require(entry, "from", where), where + ".from") - 1;
        road.to = as_int(require(entry, "to", where), where + ".to") - 1;
        road.mu = as_number(require(entry, "mu", where), where + ".mu");
        road.xi = as_number(require(entry, "xi", where), where + ".xi");
        raw.roads.push_back(road);
    }

    raw.first_ride_prob = parse_prob_map(require(doc, "p", "config root"), raw.station_count, "p");
    raw.retrial_prob =
        parse_prob_map(require(doc, "alpha", "config root"), raw.station_count, "alpha");

    if (doc.contains("solver")) {
        const json& solver = doc["solver"];
        if (!solver.is_object()) throw SchemaError("\"solver\" must be an object");
        reject_unknown_keys(
            solver, {"tol", "damping", "max_iter", "init", "road_factor_convention", "max_states"},
            "solver");
        if (solver.contains("tol")) config.solver.tol = as_number(solver["tol"], "solver.tol");
        if (solver.contains("damping"))
            config.solver.damping = as_number(solver["damping"], "solver.damping");
        if (solver.contains("max_iter"))
            config.solver.max_iter = as_int(solver["max_iter"], "solver.max_iter");
        if (solver.contains("max_states"))
            config.solver.max_states = as_count(solver["max_states"], "solver.max_states");
        if (solver.contains("init")) {
            if (solver["init"].is_number())
                config.solver.init =
                    Eigen::VectorXd::Constant(raw.station_count, solver["init"].get<double>());
            else
                config.solver.init = as_vector(solver["init"], "solver.init");
        }
        if (solver.contains("road_factor_convention"))
            config.solver.convention = parse_convention(solver["road_factor_convention"]);
    }

    if (doc.contains("sim")) {
        const json& sim = doc["sim"];
        if (!sim.is_object()) throw SchemaError("\"sim\" must be an object");
        reject_unknown_keys(sim, {"events", "warmup", "seed", "replications"}, "sim");
        if (sim.contains("events")) config.sim.events = as_count(sim["events"], "sim.events");
        if (sim.contains("warmup")) config.sim.warmup = as_number(sim["warmup"], "sim.warmup");
        if (sim.contains("seed")) config.sim.seed = as_count(sim["seed"], "sim.seed");
        if (sim.contains("replications"))
            config.sim.replications = as_int(sim["replications"], "sim.replications");
    }
    return config;
}

std::string echo_config(const ParsedConfig& config) {
    const RawModel& raw = config.raw;
    json doc;
    doc["stations"]["count"] = raw.station_count;
    doc["stations"]["capacity"] = raw.dock_capacity;
    doc["stations"]["initial_bikes"] = raw.bikes_per_station;
    json arrivals = json::array();
    for (const StationSpec& st : raw.stations) {
        json entry;
        if (st.map) {
            entry["map"]["C"] = matrix_to_json(st.map->C);
            entry["map"]["D"] = matrix_to_json(st.map->D);
        } else {
            entry["lambda"] = vector_to_json(st.lambda_vec);
        }
        arrivals.push_back(entry);
    }
    doc["stations"]["arrivals"] = arrivals;

    json roads = json::array();
    for (const RoadSpec& road : raw.roads) {
        json entry;
        entry["from"] = road.from + 1;
        entry["to"] = road.to + 1;
        entry["mu"] = road.mu;
        entry["xi"] = road.xi;
        roads.push_back(entry);
    }
    doc["roads"] = roads;
    doc["p"] = prob_map_to_json(raw.first_ride_prob);
    doc["alpha"] = prob_map_to_json(raw.retrial_prob);

    doc["solver"]["tol"] = config.solver.tol;
    doc["solver"]["damping"] = config.solver.damping;
    doc["solver"]["max_iter"] = config.solver.max_iter;
    doc["solver"]["max_states"] = config.solver.max_states;
    if (config.solver.init) doc["solver"]["init"] = vector_to_json(*config.solver.init);
    doc["solver"]["road_factor_convention"] =
        config.solver.convention == RoadFactorConvention::paper ? "paper" : "bcmp";

    doc["sim"]["events"] = config.sim.events;
    doc["sim"]["warmup"] = config.sim.warmup;
    doc["sim"]["seed"] = config.sim.seed;
    doc["sim"]["replications"] = config.sim.replications;
    return doc.dump(2) + "\n";
}

FixedPointConfig to_fixed_point_config(const SolverOptions& options) {
    FixedPointConfig cfg;
    cfg.tol = options.tol;
    cfg.damping = options.damping;
    cfg.max_iter = options.max_iter;
    if (options.init) cfg.init = *options.init;
    cfg.convention = options.convention;
    cfg.max_states = options.max_states;
    return cfg;
}

std::string findings_to_json(const std::vector<Finding>& findings) {
    json out = json::array();
    for (const Finding& f : findings)
        out.push_back({{"code", f.code}, {"where", f.where}, {"message", f.message}});
    return out.dump(2) + "\n";
}

namespace {

json report_to_json_object(const PerformanceReport& report) {
    json out;
    out["problematic"] = report.problematic;
    out["problematic_fraction"] = report.problematic_fraction;
    out["empty_prob"] = vector_to_json(report.empty_prob);
    out["full_prob"] = vector_to_json(report.full_prob);
    out["mean_station"] = vector_to_json(report.mean_station);
    json roads = json::array();
    for (const RoadQueueStat& stat : report.mean_road) {
        roads.push_back({{"from", stat.from + 1},
                         {"to", stat.to + 1},
                         {"class1", stat.class1},
                         {"class2", stat.class2},
                         {"total", stat.total}});
    }
    out["mean_road"] = roads;
    out["pi"] = vector_to_json(report.pi);
    out["log_G"] = report.log_G;
    return out;
}

json sim_stats_to_json(const SimStats& stats) {
    json out;
    out["full_prob"] = vector_to_json(stats.full_prob);
    out["empty_prob"] = vector_to_json(stats.empty_prob);
    out["mean_bikes"] = vector_to_json(stats.mean_bikes);
    out["lost_rate"] = vector_to_json(stats.lost_rate);
    out["arrival_rate"] = vector_to_json(stats.arrival_rate);
    json roads = json::array();
    for (int r = 0; r < stats.riding_mean.rows(); ++r)
        roads.push_back({{"class1", stats.riding_mean(r, 0)},
                         {"class2", stats.riding_mean(r, 1)},
                         {"total", stats.riding_mean(r, 0) + stats.riding_mean(r, 1)}});
    out["riding_mean"] = roads;
    json starts = json::array();
    for (int r = 0; r < stats.ride_starts.rows(); ++r)
        starts.push_back({{"class1", stats.ride_starts(r, 0)}, {"class2", stats.ride_starts(r, 1)}});
    out["ride_starts"] = starts;
    out["first_rides"] = stats.first_rides;
    out["retrial_rides"] = stats.retrial_rides;
    out["blocked_returns"] = stats.blocked_returns;
    out["span"] = stats.span;
    return out;
}

}  // namespace

std::string report_to_json(const PerformanceReport& report) {
    return report_to_json_object(report).dump(2) + "\n";
}

std::string solve_result_to_json(const FixedPointResult& result, const PerformanceReport& report) {
    json out;
    out["pi"] = vector_to_json(result.pi);
    out["residual"] = result.residual;
    out["iterations"] = result.iterations;
    out["converged"] = result.converged;
    out["trace"] = result.trace;
    out["logG"] = report.log_G;
    out["report"] = report_to_json_object(report);
    return out.dump(2) + "\n";
}

std::string sim_report_to_json(const SimReport& report) {
    json out;
    out["mean"] = sim_stats_to_json(report.mean);
    out["ci95_halfwidth"] = sim_stats_to_json(report.halfwidth);
    out["replications"] = report.replications;
    out["events_per_replication"] = report.events_per_replication;
    out["warmup"] = report.warmup;
    out["seed"] = report.seed;
    return out.dump(2) + "\n";
}

std::string routing_csv(const RoutingMatrix& routing) {
    std::ostringstream out;
    out.precision(17);
    out << "node";
    for (int c = 0; c < routing.index.order(); ++c) out << "," << routing.index.label(c);
    out << "\n";
    for (int r = 0; r < routing.index.order(); ++r) {
        out << routing.index.label(r);
        for (int c = 0; c < routing.index.order(); ++c) out << "," << routing.P(r, c);
        out << "\n";
    }
    return out.str();
}

std::string marginals_csv(const ProductFormContext& ctx) {
    std::ostringstream out;
    out.precision(17);
    out << "station,bikes,probability\n";
    for (int i = 0; i < ctx.model.station_count; ++i)
        for (int k = 0; k <= ctx.model.dock_capacity; ++k)
            out << (i + 1) << "," << k << "," << ctx.marginals[i](k) << "\n";
    return out.str();
}

std::string stations_csv(const PerformanceReport& report) {
    std::ostringstream out;
    out.precision(17);
    out << "station,empty_prob,full_prob,mean_bikes\n";
    for (int i = 0; i < report.pi.size(); ++i)
        out << (i + 1) << "," << report.empty_prob(i) << "," << report.full_prob(i) << ","
            << report.mean_station(i) << "\n";
    return out.str();
}

}  // namespace bikeqn
