#include "drda/baselines.hpp"

#include <cmath>

#include "solver_internal.hpp"

namespace drda {

namespace {

constexpr double kJitter = 1e-10;

RegressionModel solve_normal_equations(const Dataset& source, const KernelConfig& cfg,
                                       const Eigen::MatrixXd& k, const Eigen::VectorXd& w,
                                       double lambda) {
    const Index n = source.size();
    const Eigen::MatrixXd kw = k * w.asDiagonal();
    Eigen::MatrixXd lhs = kw * k + lambda * k;
    lhs.diagonal().array() += kJitter;
    const Eigen::VectorXd rhs = kw * source.y();

    const Eigen::LDLT<Eigen::MatrixXd> ldlt(lhs);
    if (ldlt.info() != Eigen::Success)
        throw SolverError("rls: factorization failed after jitter");
    const Eigen::VectorXd alpha = ldlt.solve(rhs);

    const double denom = std::max(rhs.norm(), 1e-30);
    if ((lhs * alpha - rhs).norm() / denom > 1e-8)
        throw SolverError("rls: singular system after jitter");

    RegressionModel model;
    model.support_points = source.features;
    model.alpha = alpha;
    model.bandwidth = cfg.bandwidth;
    return model;
}

} // namespace

RegressionModel fit_rls(const Dataset& source, const KernelConfig& cfg, double lambda) {
    if (!source.has_labels()) throw InvalidInput("fit_rls: source must be labeled");
    if (lambda < 0.0) throw InvalidInput("fit_rls: lambda must be >= 0");
    const Eigen::MatrixXd k = gram(source, source, cfg).entries;
    return solve_normal_equations(source, cfg, k,
                                  Eigen::VectorXd::Ones(source.size()), lambda);
}

WeightedFit fit_wrls(const Dataset& source, const Dataset& target, const KernelConfig& cfg,
                     double lambda, double B, double c) {
    if (!source.has_labels()) throw InvalidInput("fit_wrls: source must be labeled");
    if (lambda < 0.0) throw InvalidInput("fit_wrls: lambda must be >= 0");
    KmmOptions kmm;
    kmm.B = B;
    kmm.c = c;
    WeightedFit fit;
    fit.weights = kmm_fit(source, target, cfg, kmm);
    const Eigen::MatrixXd k = gram(source, source, cfg).entries;
    fit.model = solve_normal_equations(source, cfg, k, fit.weights.values, lambda);
    return fit;
}

WeightedFit fit_wdro(const Dataset& source, const Dataset& target, const KernelConfig& cfg,
                     const SolverConfig& solver) {
    if (!source.has_labels()) throw InvalidInput("fit_wdro: source must be labeled");
    KmmOptions kmm;
    kmm.B = solver.B;
    kmm.c = solver.c;
    kmm.tol = solver.qp_tol;
    kmm.max_iter = solver.qp_max_iter;

    WeightedFit fit;
    fit.weights = kmm_fit(source, target, cfg, kmm);

    const detail::Problem p = detail::build_problem(source, &target, cfg, solver);
    const Eigen::VectorXd alpha = detail::run_alpha_step(
        p, fit.weights.values, Eigen::VectorXd::Zero(source.size()), solver.alpha_step);

    fit.model.support_points = source.features;
    fit.model.alpha = alpha;
    fit.model.bandwidth = cfg.bandwidth;
    return fit;
}

RegressionModel fit_dro_source_only(const Dataset& source, const KernelConfig& cfg,
                                    const SolverConfig& solver) {
    if (!source.has_labels()) throw InvalidInput("fit_dro: source must be labeled");
    const detail::Problem p = detail::build_problem(source, nullptr, cfg, solver);
    const Eigen::VectorXd alpha = detail::run_alpha_step(
        p, Eigen::VectorXd::Ones(source.size()), Eigen::VectorXd::Zero(source.size()),
        solver.alpha_step);

    RegressionModel model;
    model.support_points = source.features;
    model.alpha = alpha;
    model.bandwidth = cfg.bandwidth;
    return model;
}

} // namespace drda
