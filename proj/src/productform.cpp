#include "bikeqn/productform.hpp"

#include <cmath>
#include <limits>

namespace bikeqn {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double log_factorial(int n) { return std::lgamma(static_cast<double>(n) + 1.0); }

// Per-class road contribution without the cross-class coefficient.
double log_road_class_term(int m, double e, double rate, RoadFactorConvention convention) {
    if (m == 0) return 0.0;
    double le = std::log(e) - std::log(rate);
    if (convention == RoadFactorConvention::paper)
        return m * (le - std::log(static_cast<double>(m)));
    return m * le - log_factorial(m);
}

// Running-max log-sum-exp accumulator for sums of w * exp(l) with w >= 0.
struct LogSumAccumulator {
    double max_log = kNegInf;
    double scaled_sum = 0.0;

    void add(double l, double w = 1.0) {
        if (w == 0.0 || l == kNegInf) return;
        if (l <= max_log) {
            scaled_sum += w * std::exp(l - max_log);
        } else {
            scaled_sum = scaled_sum * std::exp(max_log - l) + w;
            max_log = l;
        }
    }

    double log_total() const {
        if (scaled_sum <= 0.0) return kNegInf;
        return max_log + std::log(scaled_sum);
    }

    // total / exp(log_ref), for turning accumulated mass into probabilities.
    double normalized(double log_ref) const {
        if (scaled_sum <= 0.0) return 0.0;
        return std::exp(max_log - log_ref) * scaled_sum;
    }
};

}  // namespace

double log_station_factor(std::span<const int> counts, double e_i,
                          const Eigen::VectorXd& lambda) {
    int total = 0;
    double log_prod = 0.0;
    for (size_t v = 0; v < counts.size(); ++v) {
        int n = counts[v];
        total += n;
        if (n > 0) log_prod += n * (std::log(e_i) - std::log(lambda(static_cast<int>(v)))) -
                               log_factorial(n);
    }
    return log_factorial(total) + log_prod;
}

double station_factor(std::span<const int> counts, double e_i, const Eigen::VectorXd& lambda) {
    return std::exp(log_station_factor(counts, e_i, lambda));
}

double log_road_factor(int m1, int m2, double e1, double e2, double mu, double xi,
                       RoadFactorConvention convention) {
    double log_coeff = 0.0;
    if (convention == RoadFactorConvention::paper)
        log_coeff = log_factorial(m1 + m2) - log_factorial(m1) - log_factorial(m2);
    return log_coeff + log_road_class_term(m1, e1, mu, convention) +
           log_road_class_term(m2, e2, xi, convention);
}

double road_factor(int m1, int m2, double e1, double e2, double mu, double xi,
                   RoadFactorConvention convention) {
    return std::exp(log_road_factor(m1, m2, e1, e2, mu, xi, convention));
}

double log_state_weight(const BikeShareModel& model, const NodeIndex& index,
                        const RelativeArrivalRates& rates, const StateLayout& layout,
                        std::span<const int> coords, RoadFactorConvention convention) {
    double log_w = 0.0;
    for (int i = 0; i < model.station_count; ++i) {
        auto counts = coords.subspan(layout.station_offset(i), layout.station_phases(i));
        log_w += log_station_factor(counts, rates.station(index, i),
                                    model.stations[i].lambda_vec);
    }
    for (int r = 0; r < model.road_count(); ++r) {
        log_w += log_road_factor(coords[layout.road_offset(r, 1)],
                                 coords[layout.road_offset(r, 2)],
                                 rates.road(index, r, 1), rates.road(index, r, 2),
                                 model.roads[r].mu, model.roads[r].xi, convention);
    }
    return log_w;
}

double log_normalization_constant(const BikeShareModel& model, const NodeIndex& index,
                                  const RelativeArrivalRates& rates,
                                  RoadFactorConvention convention, std::uint64_t max_states) {
    ensure_state_space_within(model, max_states);
    StateLayout layout(model);
    LogSumAccumulator g;
    for_each_state(model, layout, [&](std::span<const int> coords) {
        g.add(log_state_weight(model, index, rates, layout, coords, convention));
    });
    return g.log_total();
}

ProductFormContext build_context(const BikeShareModel& model, const Eigen::VectorXd& pi,
                                 RoadFactorConvention convention, std::uint64_t max_states) {
    ensure_state_space_within(model, max_states);

    RoutingMatrix routing = build_routing_matrix(model, pi);

    ProductFormContext ctx;
    ctx.model = model;
    ctx.pi = pi;
    ctx.convention = convention;
    ctx.rates = solve_relative_rates(routing);
    ctx.index = std::move(routing.index);

    const int n = model.station_count;
    const int cap = model.dock_capacity;
    StateLayout layout(model);

    LogSumAccumulator g;
    std::vector<std::vector<LogSumAccumulator>> occupancy(
        n, std::vector<LogSumAccumulator>(cap + 1));
    std::vector<std::array<LogSumAccumulator, 2>> riding(model.road_count());

    for_each_state(model, layout, [&](std::span<const int> coords) {
        double log_w = log_state_weight(model, ctx.index, ctx.rates, layout, coords, convention);
        g.add(log_w);
        for (int i = 0; i < n; ++i) occupancy[i][layout.station_total(coords, i)].add(log_w);
        for (int r = 0; r < model.road_count(); ++r) {
            riding[r][0].add(log_w, coords[layout.road_offset(r, 1)]);
            riding[r][1].add(log_w, coords[layout.road_offset(r, 2)]);
        }
    });

    ctx.log_G = g.log_total();
    ctx.marginals.assign(n, Eigen::VectorXd::Zero(cap + 1));
    for (int i = 0; i < n; ++i)
        for (int k = 0; k <= cap; ++k)
            ctx.marginals[i](k) = occupancy[i][k].normalized(ctx.log_G);
    ctx.mean_riding.resize(model.road_count(), 2);
    for (int r = 0; r < model.road_count(); ++r)
        for (int cls = 0; cls < 2; ++cls)
            ctx.mean_riding(r, cls) = riding[r][cls].normalized(ctx.log_G);
    return ctx;
}

double joint_probability(const ProductFormContext& ctx, const NetworkState& state) {
    const BikeShareModel& model = ctx.model;
    StateLayout layout(model);
    if (static_cast<int>(state.parked.size()) != model.station_count ||
        static_cast<int>(state.riding.size()) != model.road_count())
        throw DimensionError("state shape does not match the model");

    long long total = 0;
    std::vector<int> flat;
    flat.reserve(layout.coord_count());
    for (int i = 0; i < model.station_count; ++i) {
        if (static_cast<int>(state.parked[i].size()) != layout.station_phases(i))
            throw DimensionError("state phase count does not match station " +
                                 std::to_string(i + 1));
        int station_total = 0;
        for (int c : state.parked[i]) {
            if (c < 0) return 0.0;
            station_total += c;
            flat.push_back(c);
        }
        if (station_total > model.dock_capacity) return 0.0;
        total += station_total;
    }
    for (const auto& r : state.riding) {
        if (r[0] < 0 || r[1] < 0) return 0.0;
        total += r[0] + r[1];
        flat.push_back(r[0]);
        flat.push_back(r[1]);
    }
    if (total != model.fleet()) return 0.0;

    double log_w = log_state_weight(model, ctx.index, ctx.rates, layout,
                                    std::span<const int>(flat), ctx.convention);
    return std::exp(log_w - ctx.log_G);
}

}  // namespace bikeqn
