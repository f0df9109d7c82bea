#include "bikeqn/fixedpoint.hpp"

#include <cmath>

namespace bikeqn {

namespace {

constexpr double kClamp = 1e-9;

Eigen::VectorXd clamp_unit(const Eigen::VectorXd& v) {
    return v.cwiseMax(kClamp).cwiseMin(1.0 - kClamp);
}

}  // namespace

Eigen::VectorXd evaluate_map(const BikeShareModel& model, const Eigen::VectorXd& pi,
                             RoadFactorConvention convention, std::uint64_t max_states) {
    ProductFormContext ctx = build_context(model, pi, convention, max_states);
    Eigen::VectorXd f(model.station_count);
    for (int i = 0; i < model.station_count; ++i)
        f(i) = ctx.marginals[i](model.dock_capacity);
    return f;
}

FixedPointResult solve_fixed_point(const BikeShareModel& model, const FixedPointConfig& cfg) {
    if (!(cfg.tol > 0.0)) throw DimensionError("tol must be > 0");
    if (!(cfg.damping > 0.0 && cfg.damping <= 1.0))
        throw DimensionError("damping must lie in (0, 1]");
    if (cfg.max_iter < 1) throw DimensionError("max_iter must be >= 1");

    Eigen::VectorXd pi;
    if (cfg.init.size() == 0) {
        pi = Eigen::VectorXd::Constant(model.station_count, 0.1);
    } else {
        if (cfg.init.size() != model.station_count)
            throw DimensionError("init vector has wrong length");
        if (cfg.init.minCoeff() <= 0.0 || cfg.init.maxCoeff() >= 1.0)
            throw DimensionError("init components must lie in (0, 1)");
        pi = cfg.init;
    }
    pi = clamp_unit(pi);

    FixedPointResult result;
    result.trace.reserve(cfg.max_iter);

    double damping = cfg.damping;
    double best_residual = std::numeric_limits<double>::infinity();
    Eigen::VectorXd best_pi = pi;
    double previous_residual = std::numeric_limits<double>::infinity();

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        Eigen::VectorXd f = evaluate_map(model, pi, cfg.convention, cfg.max_states);
        double residual = (pi - f).cwiseAbs().maxCoeff();
        result.trace.push_back(residual);
        result.iterations = iter;

        if (residual < best_residual) {
            best_residual = residual;
            best_pi = pi;
        }
        if (residual <= cfg.tol) {
            result.pi = pi;
            result.residual = residual;
            result.converged = true;
            return result;
        }
        if (residual > previous_residual) damping = std::max(damping * 0.5, 0.01);
        previous_residual = residual;

        pi = clamp_unit((1.0 - damping) * pi + damping * f);
    }

    result.pi = best_pi;
    result.residual = best_residual;
    result.converged = false;
    return result;
}

}  // namespace bikeqn
