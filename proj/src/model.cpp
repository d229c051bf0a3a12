#include "drda/model.hpp"

namespace drda {

double predict(const RegressionModel& model, const Eigen::VectorXd& x) {
    model.check();
    if (x.size() != model.support_points.cols())
        throw InvalidInput("predict: feature dimension mismatch");
    const double inv2s2 = 0.5 / (model.bandwidth * model.bandwidth);
    double acc = 0.0;
    for (Index i = 0; i < model.support_points.rows(); ++i) {
        const double d2 = (model.support_points.row(i).transpose() - x).squaredNorm();
        acc += model.alpha[i] * std::exp(-d2 * inv2s2);
    }
    return acc;
}

Eigen::VectorXd predict(const RegressionModel& model, const Eigen::MatrixXd& xs) {
    model.check();
    if (xs.cols() != model.support_points.cols())
        throw InvalidInput("predict: feature dimension mismatch");
    const double inv2s2 = 0.5 / (model.bandwidth * model.bandwidth);
    Eigen::VectorXd out(xs.rows());
    for (Index j = 0; j < xs.rows(); ++j) {
        double acc = 0.0;
        for (Index i = 0; i < model.support_points.rows(); ++i) {
            const double d2 = (model.support_points.row(i) - xs.row(j)).squaredNorm();
            acc += model.alpha[i] * std::exp(-d2 * inv2s2);
        }
        out[j] = acc;
    }
    return out;
}

double rkhs_norm(const RegressionModel& model) {
    model.check();
    const Dataset pts = Dataset::unlabeled(model.support_points);
    const GramMatrix k = gram(pts, pts, KernelConfig(model.bandwidth));
    const double sq = model.alpha.dot(k.entries * model.alpha);
    return std::sqrt(std::max(0.0, sq));
}

} // namespace drda
