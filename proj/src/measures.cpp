#include "bikeqn/measures.hpp"

namespace bikeqn {

double problematic_measure(const ProductFormContext& ctx) {
    const int cap = ctx.model.dock_capacity;
    double total = 0.0;
    for (int i = 0; i < ctx.model.station_count; ++i)
        total += ctx.marginals[i](0) + ctx.marginals[i](cap);
    return total;
}

double mean_station_queue(const ProductFormContext& ctx, int i) {
    const Eigen::VectorXd& marginal = ctx.marginals[i];
    double mean = 0.0;
    for (int k = 1; k < marginal.size(); ++k) mean += k * marginal(k);
    return mean;
}

double mean_road_queue(const ProductFormContext& ctx, int from, int to) {
    int r = ctx.model.road_index(from, to);
    if (r < 0)
        throw UnknownRoad("no road " + std::to_string(from + 1) + "->" + std::to_string(to + 1));
    return ctx.mean_riding(r, 0) + ctx.mean_riding(r, 1);
}

PerformanceReport build_report(const ProductFormContext& ctx) {
    const BikeShareModel& model = ctx.model;
    PerformanceReport report;
    report.pi = ctx.pi;
    report.log_G = ctx.log_G;
    report.empty_prob.resize(model.station_count);
    report.full_prob.resize(model.station_count);
    report.mean_station.resize(model.station_count);
    for (int i = 0; i < model.station_count; ++i) {
        report.empty_prob(i) = ctx.marginals[i](0);
        report.full_prob(i) = ctx.marginals[i](model.dock_capacity);
        report.mean_station(i) = mean_station_queue(ctx, i);
    }
    report.problematic = problematic_measure(ctx);
    report.problematic_fraction = report.problematic / model.station_count;
    report.mean_road.reserve(model.road_count());
    for (int r = 0; r < model.road_count(); ++r) {
        RoadQueueStat stat;
        stat.from = model.roads[r].from;
        stat.to = model.roads[r].to;
        stat.class1 = ctx.mean_riding(r, 0);
        stat.class2 = ctx.mean_riding(r, 1);
        stat.total = stat.class1 + stat.class2;
        report.mean_road.push_back(stat);
    }
    return report;
}

}  // namespace bikeqn
