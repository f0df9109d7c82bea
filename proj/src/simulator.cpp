#include "bikeqn/simulator.hpp"

#include <cmath>
#include <queue>
#include <tuple>

#include "bikeqn/map_process.hpp"

namespace bikeqn {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    x += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

double uniform01(std::mt19937_64& rng) {
    // in (0, 1]: safe for -log()
    return 1.0 - (rng() >> 11) * 0x1.0p-53;
}

double exponential(std::mt19937_64& rng, double rate) {
    return -std::log(uniform01(rng)) / rate;
}

// Draws an index proportionally to the weights.
int pick_weighted(std::mt19937_64& rng, const std::vector<double>& weights, double total) {
    double u = uniform01(rng) * total;
    for (size_t k = 0; k + 1 < weights.size(); ++k) {
        u -= weights[k];
        if (u <= 0.0) return static_cast<int>(k);
    }
    return static_cast<int>(weights.size()) - 1;
}

// Two-sided 97.5% Student-t quantiles for small samples; 1.96 beyond.
double t_quantile_975(int df) {
    static const double table[] = {12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365,
                                   2.306,  2.262, 2.228, 2.201, 2.179, 2.160, 2.145,
                                   2.131,  2.120, 2.110, 2.101, 2.093, 2.086, 2.080,
                                   2.074,  2.069, 2.064, 2.060, 2.056, 2.052, 2.048,
                                   2.045,  2.042};
    if (df < 1) return 0.0;
    if (df <= 30) return table[df - 1];
    return 1.96;
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replication,
                          std::uint64_t station, std::uint64_t purpose) {
    std::uint64_t x = master;
    std::uint64_t h = splitmix64(x);
    x ^= (replication + 1) * 0xD1B54A32D192ED03ULL;
    h ^= splitmix64(x);
    x ^= (station + 1) * 0x8CB92BA72F3D8DD7ULL;
    h ^= splitmix64(x);
    x ^= (purpose + 1) * 0xA24BAED4963EE407ULL;
    h ^= splitmix64(x);
    return h;
}

MapArrivalProcess::MapArrivalProcess(const MapDescriptor& map, std::uint64_t seed)
    : C_(map.C), D_(map.D), rng_(seed) {
    Eigen::VectorXd theta = map_stationary_vector(map);
    std::vector<double> w(theta.data(), theta.data() + theta.size());
    phase_ = pick_weighted(rng_, w, theta.sum());
}

MapArrivalProcess::Event MapArrivalProcess::step() {
    const int m = static_cast<int>(C_.rows());
    double rate = -C_(phase_, phase_);
    time_ += exponential(rng_, rate);

    // Transition targets: off-diagonal C entries first, then the D row.
    weights_.clear();
    for (int v = 0; v < m; ++v) weights_.push_back(v == phase_ ? 0.0 : C_(phase_, v));
    for (int v = 0; v < m; ++v) weights_.push_back(D_(phase_, v));
    int k = pick_weighted(rng_, weights_, rate);

    Event ev;
    ev.arrival = k >= m;
    phase_ = ev.arrival ? k - m : k;
    ev.phase = phase_;
    ev.time = time_;
    return ev;
}

MapArrivalProcess::Arrival MapArrivalProcess::next_arrival() {
    for (;;) {
        Event ev = step();
        if (ev.arrival) return Arrival{ev.time, ev.phase};
    }
}

namespace {

struct RideCompletion {
    double time;
    std::uint64_t seq;  // insertion order, for a deterministic total order
    int road;
    int cls;  // 1 or 2

    bool operator>(const RideCompletion& o) const {
        return std::tie(time, seq) > std::tie(o.time, o.seq);
    }
};

SimStats zero_stats(const BikeShareModel& model) {
    SimStats s;
    s.full_prob = Eigen::VectorXd::Zero(model.station_count);
    s.empty_prob = Eigen::VectorXd::Zero(model.station_count);
    s.mean_bikes = Eigen::VectorXd::Zero(model.station_count);
    s.lost_rate = Eigen::VectorXd::Zero(model.station_count);
    s.arrival_rate = Eigen::VectorXd::Zero(model.station_count);
    s.riding_mean = Eigen::MatrixXd::Zero(model.road_count(), 2);
    s.ride_starts = Eigen::MatrixXd::Zero(model.road_count(), 2);
    return s;
}

SimStats run_replication(const BikeShareModel& model, const SimConfig& cfg, int replication) {
    const int n = model.station_count;
    const int roads = model.road_count();
    const int fleet = model.fleet();
    const int cap = model.dock_capacity;

    std::vector<MapArrivalProcess> arrivals;
    std::vector<std::mt19937_64> route_rng, ride_rng;
    arrivals.reserve(n);
    for (int i = 0; i < n; ++i) {
        const StationSpec& st = model.stations[i];
        MapDescriptor map = st.map ? *st.map : map_from_rates(st.lambda_vec);
        arrivals.emplace_back(map, derive_seed(cfg.seed, replication, i, 0));
        route_rng.emplace_back(derive_seed(cfg.seed, replication, i, 1));
        ride_rng.emplace_back(derive_seed(cfg.seed, replication, i, 2));
    }

    std::vector<int> parked(n, model.bikes_per_station);
    Eigen::MatrixXi riding = Eigen::MatrixXi::Zero(roads, 2);
    int parked_total = n * model.bikes_per_station;
    int riding_total = 0;

    std::priority_queue<RideCompletion, std::vector<RideCompletion>, std::greater<>> completions;
    std::uint64_t seq = 0;

    std::vector<MapArrivalProcess::Event> pending(n);
    for (int i = 0; i < n; ++i) pending[i] = arrivals[i].step();

    // Chooses the destination among the outgoing roads of `i`.
    std::vector<double> road_weights;
    auto pick_road = [&](int i, const Eigen::MatrixXd& probs) {
        const auto& out = model.outgoing[i];
        road_weights.resize(out.size());
        double total = 0.0;
        for (size_t k = 0; k < out.size(); ++k) {
            road_weights[k] = probs(i, model.roads[out[k]].to);
            total += road_weights[k];
        }
        return out[pick_weighted(route_rng[i], road_weights, total)];
    };

    auto start_ride = [&](int road, int cls, double now) {
        const RoadSpec& spec = model.roads[road];
        double rate = cls == 1 ? spec.mu : spec.xi;
        completions.push({now + exponential(ride_rng[spec.from], rate), seq++, road, cls});
        riding(road, cls - 1) += 1;
        riding_total += 1;
    };

    SimStats stats = zero_stats(model);
    double now = 0.0;
    double measure_start = 0.0;
    bool measuring = cfg.warmup <= 0.0;
    const std::uint64_t warmup_events =
        static_cast<std::uint64_t>(cfg.warmup * static_cast<double>(cfg.events));

    Eigen::VectorXd lost_count = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd arrival_count = Eigen::VectorXd::Zero(n);

    auto integrate_to = [&](double t) {
        if (!measuring) return;
        double dt = t - now;
        for (int i = 0; i < n; ++i) {
            stats.full_prob(i) += dt * (parked[i] == cap);
            stats.empty_prob(i) += dt * (parked[i] == 0);
            stats.mean_bikes(i) += dt * parked[i];
        }
        for (int r = 0; r < roads; ++r) {
            stats.riding_mean(r, 0) += dt * riding(r, 0);
            stats.riding_mean(r, 1) += dt * riding(r, 1);
        }
    };

    for (std::uint64_t event = 0; event < cfg.events; ++event) {
        // next event: the earliest station MAP transition or ride completion
        int station = 0;
        for (int i = 1; i < n; ++i)
            if (pending[i].time < pending[station].time) station = i;
        bool ride_next = !completions.empty() && completions.top().time < pending[station].time;
        double event_time = ride_next ? completions.top().time : pending[station].time;

        integrate_to(event_time);
        now = event_time;

        if (ride_next) {
            RideCompletion done = completions.top();
            completions.pop();
            riding(done.road, done.cls - 1) -= 1;
            riding_total -= 1;
            int dest = model.roads[done.road].to;
            if (parked[dest] < cap) {
                parked[dest] += 1;
                parked_total += 1;
            } else {
                // full station: immediate retrial ride
                if (measuring) {
                    stats.blocked_returns += 1;
                    stats.retrial_rides += 1;
                }
                int next_road = pick_road(dest, model.retrial_prob);
                if (measuring) stats.ride_starts(next_road, 1) += 1;
                start_ride(next_road, 2, now);
            }
        } else {
            MapArrivalProcess::Event ev = pending[station];
            if (ev.arrival) {
                if (measuring) arrival_count(station) += 1;
                if (parked[station] == 0) {
                    if (measuring) lost_count(station) += 1;
                } else {
                    parked[station] -= 1;
                    parked_total -= 1;
                    int road = pick_road(station, model.first_ride_prob);
                    if (measuring) {
                        stats.first_rides += 1;
                        stats.ride_starts(road, 0) += 1;
                    }
                    start_ride(road, 1, now);
                }
            }
            pending[station] = arrivals[station].step();
        }

        if (parked_total + riding_total != fleet)
            throw Error(ErrorClass::internal,
                        "fleet conservation violated during simulation: parked " +
                            std::to_string(parked_total) + " riding " +
                            std::to_string(riding_total) + " of " + std::to_string(fleet));

        if (!measuring && event + 1 >= warmup_events) {
            measuring = true;
            measure_start = now;
        }
    }

    double span = now - measure_start;
    if (span <= 0.0)
        throw Error(ErrorClass::bad_argument, "simulation horizon too short to measure");
    stats.full_prob /= span;
    stats.empty_prob /= span;
    stats.mean_bikes /= span;
    stats.riding_mean /= span;
    stats.lost_rate = lost_count / span;
    stats.arrival_rate = arrival_count / span;
    stats.span = span;
    return stats;
}

template <typename Get>
void pool_scalar(SimReport& report, std::vector<SimStats>& reps, Get get) {
    double mean = 0.0;
    for (SimStats& s : reps) mean += get(s);
    mean /= reps.size();
    double var = 0.0;
    for (SimStats& s : reps) {
        double d = get(s) - mean;
        var += d * d;
    }
    int r = static_cast<int>(reps.size());
    double hw = 0.0;
    if (r > 1) hw = t_quantile_975(r - 1) * std::sqrt(var / (r - 1)) / std::sqrt(double(r));
    get(report.mean) = mean;
    get(report.halfwidth) = hw;
}

}  // namespace

SimReport simulate(const BikeShareModel& model, const SimConfig& cfg) {
    if (cfg.warmup < 0.0 || cfg.warmup > 0.9)
        throw DimensionError("warmup fraction must lie in [0, 0.9]");
    if (cfg.replications < 1) throw DimensionError("replications must be >= 1");
    if (cfg.events < 100) throw DimensionError("event budget must be >= 100");

    std::vector<SimStats> reps;
    reps.reserve(cfg.replications);
    for (int r = 0; r < cfg.replications; ++r) reps.push_back(run_replication(model, cfg, r));

    SimReport report;
    report.mean = zero_stats(model);
    report.halfwidth = zero_stats(model);
    report.replications = cfg.replications;
    report.events_per_replication = cfg.events;
    report.warmup = cfg.warmup;
    report.seed = cfg.seed;

    for (int i = 0; i < model.station_count; ++i) {
        pool_scalar(report, reps, [i](SimStats& s) -> double& { return s.full_prob(i); });
        pool_scalar(report, reps, [i](SimStats& s) -> double& { return s.empty_prob(i); });
        pool_scalar(report, reps, [i](SimStats& s) -> double& { return s.mean_bikes(i); });
        pool_scalar(report, reps, [i](SimStats& s) -> double& { return s.lost_rate(i); });
        pool_scalar(report, reps, [i](SimStats& s) -> double& { return s.arrival_rate(i); });
    }
    for (int r = 0; r < model.road_count(); ++r)
        for (int c = 0; c < 2; ++c) {
            pool_scalar(report, reps, [r, c](SimStats& s) -> double& { return s.riding_mean(r, c); });
            pool_scalar(report, reps, [r, c](SimStats& s) -> double& { return s.ride_starts(r, c); });
        }
    pool_scalar(report, reps, [](SimStats& s) -> double& { return s.first_rides; });
    pool_scalar(report, reps, [](SimStats& s) -> double& { return s.retrial_rides; });
    pool_scalar(report, reps, [](SimStats& s) -> double& { return s.blocked_returns; });
    pool_scalar(report, reps, [](SimStats& s) -> double& { return s.span; });
    return report;
}

}  // namespace bikeqn
