#include "bikeqn/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace bikeqn {

namespace {

std::string station_name(int i) { return "station " + std::to_string(i + 1); }

std::string road_name(int from, int to) {
    return "road " + std::to_string(from + 1) + "->" + std::to_string(to + 1);
}

constexpr double kRowSumTol = 1e-12;
constexpr double kGeneratorTol = 1e-9;

void check_map(const MapDescriptor& map, int station, std::vector<Finding>& out) {
    const auto& C = map.C;
    const auto& D = map.D;
    const int m = static_cast<int>(C.rows());
    if (C.cols() != m || D.rows() != m || D.cols() != m || m < 1) {
        out.push_back({"map", station_name(station), "C and D must be square matrices of equal size"});
        return;
    }
    for (int u = 0; u < m; ++u) {
        for (int v = 0; v < m; ++v) {
            if (u != v && C(u, v) < 0.0)
                out.push_back({"map", station_name(station),
                               "C has a negative off-diagonal entry at (" + std::to_string(u + 1) +
                                   "," + std::to_string(v + 1) + ")"});
            if (D(u, v) < 0.0)
                out.push_back({"map", station_name(station),
                               "D has a negative entry at (" + std::to_string(u + 1) + "," +
                                   std::to_string(v + 1) + ")"});
        }
        double row = C.row(u).sum() + D.row(u).sum();
        if (std::abs(row) > kGeneratorTol)
            out.push_back({"map", station_name(station),
                           "row " + std::to_string(u + 1) + " of C + D sums to " +
                               std::to_string(row) + ", not 0"});
    }
    if (!generator_irreducible(C + D))
        out.push_back({"map", station_name(station), "C + D is reducible"});
}

}  // namespace

int BikeShareModel::road_index(int from, int to) const {
    for (int r : outgoing[from])
        if (roads[r].to == to) return r;
    return -1;
}

std::vector<Finding> collect_violations(const RawModel& raw) {
    std::vector<Finding> out;
    const int n = raw.station_count;

    if (n < 2)
        out.push_back({"capacity", "system", "at least two stations are required"});
    if (raw.bikes_per_station < 1 || raw.bikes_per_station >= raw.dock_capacity)
        out.push_back({"capacity", "system",
                       "need 1 <= initial_bikes < capacity, got initial_bikes=" +
                           std::to_string(raw.bikes_per_station) +
                           " capacity=" + std::to_string(raw.dock_capacity)});
    if (n >= 1 && static_cast<long long>(n) * raw.bikes_per_station < raw.dock_capacity)
        out.push_back({"capacity", "system",
                       "fleet N*initial_bikes = " + std::to_string(n * raw.bikes_per_station) +
                           " cannot fill one station of capacity " +
                           std::to_string(raw.dock_capacity)});

    if (static_cast<int>(raw.stations.size()) != n) {
        out.push_back({"schema", "stations",
                       "expected " + std::to_string(n) + " station arrival entries, got " +
                           std::to_string(raw.stations.size())});
        return out;
    }

    for (int i = 0; i < n; ++i) {
        const StationSpec& st = raw.stations[i];
        if (st.map) {
            check_map(*st.map, i, out);
        } else {
            if (st.lambda_vec.size() < 1)
                out.push_back({"map", station_name(i), "lambda vector is empty"});
            for (int v = 0; v < st.lambda_vec.size(); ++v)
                if (!(st.lambda_vec(v) > 0.0))
                    out.push_back({"rate", station_name(i),
                                   "lambda[" + std::to_string(v + 1) + "] must be > 0"});
        }
    }

    bool roads_ok = true;
    for (const RoadSpec& rd : raw.roads) {
        std::string name = road_name(rd.from, rd.to);
        if (rd.from < 0 || rd.from >= n || rd.to < 0 || rd.to >= n) {
            out.push_back({"schema", name, "road endpoint out of range"});
            roads_ok = false;
            continue;
        }
        if (rd.from == rd.to) {
            out.push_back({"schema", name, "road endpoints must differ"});
            roads_ok = false;
        }
        if (!(rd.mu > 0.0))
            out.push_back({"rate", name, "mu must be > 0"});
        if (!(rd.xi > 0.0))
            out.push_back({"rate", name, "xi must be > 0"});
    }
    for (size_t a = 0; a + 1 < raw.roads.size() && roads_ok; ++a)
        for (size_t b = a + 1; b < raw.roads.size(); ++b)
            if (raw.roads[a].from == raw.roads[b].from && raw.roads[a].to == raw.roads[b].to)
                out.push_back({"schema", road_name(raw.roads[a].from, raw.roads[a].to),
                               "duplicate road"});
    if (!roads_ok) return out;

    std::vector<std::vector<int>> outgoing(n), incoming(n);
    for (size_t r = 0; r < raw.roads.size(); ++r) {
        outgoing[raw.roads[r].from].push_back(static_cast<int>(r));
        incoming[raw.roads[r].to].push_back(static_cast<int>(r));
    }

    for (int i = 0; i < n; ++i) {
        if (outgoing[i].empty())
            out.push_back({"degenerate_station", station_name(i), "no outgoing road"});
        if (incoming[i].empty())
            out.push_back({"degenerate_station", station_name(i), "no incoming road"});
    }

    auto check_rows = [&](const Eigen::MatrixXd& probs, const char* label) {
        if (probs.rows() != n || probs.cols() != n) {
            out.push_back({"schema", label, "probability matrix has wrong shape"});
            return;
        }
        for (int i = 0; i < n; ++i) {
            double sum = 0.0;
            for (int j = 0; j < n; ++j) {
                double w = probs(i, j);
                if (w < 0.0)
                    out.push_back({"routing", std::string(label) + " " + road_name(i, j),
                                   "negative probability"});
                if (w > 0.0) {
                    bool exists = false;
                    for (int r : outgoing[i])
                        if (raw.roads[r].to == j) exists = true;
                    if (!exists)
                        out.push_back({"routing", std::string(label) + " " + road_name(i, j),
                                       "probability mass on a nonexistent road"});
                }
                sum += w;
            }
            if (!outgoing[i].empty() && std::abs(sum - 1.0) > kRowSumTol)
                out.push_back({"routing", std::string(label) + " row " + std::to_string(i + 1),
                               "row sums to " + std::to_string(sum) + ", not 1"});
        }
    };
    check_rows(raw.first_ride_prob, "p");
    check_rows(raw.retrial_prob, "alpha");

    return out;
}

BikeShareModel validate_model(const RawModel& raw) {
    std::vector<Finding> findings = collect_violations(raw);
    if (!findings.empty()) {
        bool connectivity_only = std::all_of(
            findings.begin(), findings.end(),
            [](const Finding& f) { return f.code == "degenerate_station"; });
        throw ValidationError(connectivity_only ? ErrorClass::reducible : ErrorClass::model,
                              findings,
                              "model validation failed with " +
                                  std::to_string(findings.size()) + " finding(s)");
    }

    BikeShareModel model;
    model.station_count = raw.station_count;
    model.bikes_per_station = raw.bikes_per_station;
    model.dock_capacity = raw.dock_capacity;
    model.first_ride_prob = raw.first_ride_prob;
    model.retrial_prob = raw.retrial_prob;

    model.stations.reserve(raw.stations.size());
    for (const StationSpec& st : raw.stations) {
        StationSpec derived = st;
        if (st.map) {
            // phase_arrival_rates throws ZeroPhaseRate on a vanishing
            // component, which validation treats as a model violation.
            try {
                PhaseRates pr = phase_arrival_rates(*st.map);
                derived.theta = pr.theta;
                derived.lambda_vec = pr.lambda_vec;
                derived.lambda_total = pr.lambda_total;
            } catch (const Error& e) {
                throw ValidationError(ErrorClass::model,
                                      {{"rate", "station", e.what()}}, e.what());
            }
        } else {
            derived.lambda_total = st.lambda_vec.sum();
        }
        model.stations.push_back(std::move(derived));
    }

    model.roads = raw.roads;
    std::sort(model.roads.begin(), model.roads.end(), [](const RoadSpec& a, const RoadSpec& b) {
        return a.from != b.from ? a.from < b.from : a.to < b.to;
    });
    model.outgoing.assign(model.station_count, {});
    model.incoming.assign(model.station_count, {});
    for (size_t r = 0; r < model.roads.size(); ++r) {
        model.outgoing[model.roads[r].from].push_back(static_cast<int>(r));
        model.incoming[model.roads[r].to].push_back(static_cast<int>(r));
    }
    return model;
}

bool operator==(const BikeShareModel& a, const BikeShareModel& b) {
    auto station_eq = [](const StationSpec& x, const StationSpec& y) {
        if (x.map.has_value() != y.map.has_value()) return false;
        if (x.map && (x.map->C != y.map->C || x.map->D != y.map->D)) return false;
        return x.lambda_vec == y.lambda_vec;
    };
    if (a.station_count != b.station_count || a.bikes_per_station != b.bikes_per_station ||
        a.dock_capacity != b.dock_capacity || a.roads.size() != b.roads.size())
        return false;
    for (size_t i = 0; i < a.stations.size(); ++i)
        if (!station_eq(a.stations[i], b.stations[i])) return false;
    for (size_t r = 0; r < a.roads.size(); ++r) {
        const RoadSpec &x = a.roads[r], &y = b.roads[r];
        if (x.from != y.from || x.to != y.to || x.mu != y.mu || x.xi != y.xi) return false;
    }
    return a.first_ride_prob == b.first_ride_prob && a.retrial_prob == b.retrial_prob;
}

}  // namespace bikeqn
