#include "bikeqn/map_process.hpp"

#include <cmath>
#include <vector>

namespace bikeqn {

bool generator_irreducible(const Eigen::MatrixXd& M) {
    const int n = static_cast<int>(M.rows());
    if (n <= 1) return n == 1;

    // Strong connectivity by forward and backward reachability from node 0.
    auto reach = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<int> stack{0};
        seen[0] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v = 0; v < n; ++v) {
                if (v == u || seen[v]) continue;
                double w = forward ? M(u, v) : M(v, u);
                if (w > 0.0) {
                    seen[v] = 1;
                    stack.push_back(v);
                }
            }
        }
        for (char s : seen)
            if (!s) return false;
        return true;
    };
    return reach(true) && reach(false);
}

Eigen::VectorXd map_stationary_vector(const MapDescriptor& map) {
    const int m = map.phases();
    Eigen::MatrixXd Q = map.C + map.D;
    if (!generator_irreducible(Q))
        throw SingularGenerator("generator C + D is reducible");

    // theta Q = 0  <=>  Q^T theta^T = 0; replace one balance equation by the
    // normalization row.
    Eigen::MatrixXd A = Q.transpose();
    A.row(0).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
    b(0) = 1.0;

    Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
    if (!lu.isInvertible())
        throw SingularGenerator("generator C + D is numerically rank-deficient");
    Eigen::VectorXd theta = lu.solve(b);

    double residual = (theta.transpose() * Q).cwiseAbs().maxCoeff();
    double mass = std::abs(theta.sum() - 1.0);
    if (!(residual <= 1e-12) || !(mass <= 1e-12) || theta.minCoeff() < -1e-12)
        throw SingularGenerator("stationary vector solve failed (residual " +
                                std::to_string(residual) + ")");
    return theta.cwiseMax(0.0);
}

PhaseRates phase_arrival_rates(const MapDescriptor& map) {
    PhaseRates out;
    out.theta = map_stationary_vector(map);
    out.lambda_vec = (out.theta.transpose() * map.D).transpose();
    out.lambda_total = out.lambda_vec.sum();
    for (int v = 0; v < out.lambda_vec.size(); ++v) {
        if (!(out.lambda_vec(v) > 0.0))
            throw ZeroPhaseRate("phase " + std::to_string(v + 1) +
                                " has zero stationary arrival rate");
    }
    return out;
}

MapDescriptor map_from_rates(const Eigen::VectorXd& lambda) {
    const int m = static_cast<int>(lambda.size());
    MapDescriptor map;
    map.D = lambda.transpose().replicate(m, 1);
    map.C = -lambda.sum() * Eigen::MatrixXd::Identity(m, m);
    return map;
}

}  // namespace bikeqn
