#include "drda/solver.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "drda/kmm.hpp"
#include "solver_internal.hpp"

namespace drda {

namespace detail {

namespace {

Penalties resolve_penalties(const SolverConfig& solver, Index n_s, Index n_t) {
    if (solver.epsilon_mode == EpsilonMode::Theorem1) {
        AmbiguityParams p;
        p.B = solver.B;
        p.M = 1.0;
        p.n_s = static_cast<int>(n_s);
        p.n_t = static_cast<int>(std::max<Index>(n_t, 1));
        p.delta = solver.delta;
        const double eps = radius_target_in_transferred_set(p);
        return {eps, eps};
    }
    const double lq = solver.lambda_quartic >= 0.0 ? solver.lambda_quartic : solver.lambda;
    const double lr = solver.lambda_ridge >= 0.0 ? solver.lambda_ridge : solver.lambda;
    return {lq, lr};
}

} // namespace

Problem build_problem(const Dataset& source, const Dataset* target,
                      const KernelConfig& cfg, const SolverConfig& solver) {
    solver.check();
    cfg.check();
    if (!source.has_labels()) throw InvalidInput("drda: source must be labeled");
    if (source.size() == 0) throw InvalidInput("drda: empty source");

    Problem p;
    p.K = gram(source, source, cfg).entries;
    p.Kq = gram(source, source, cfg.product_space()).entries;
    p.y = source.y();
    p.n_s = static_cast<double>(source.size());
    p.beta = solver.beta;

    Index n_t = 1;
    if (target != nullptr) {
        if (target->size() == 0) throw InvalidInput("drda: empty target");
        if (target->dim() != source.dim())
            throw InvalidInput("drda: feature dimension mismatch");
        n_t = target->size();
        p.n_t = static_cast<double>(n_t);
        p.kst_sums = gram(source, *target, cfg).entries * Eigen::VectorXd::Ones(n_t);
    }
    p.lam = resolve_penalties(solver, source.size(), n_t);
    return p;
}

// alpha-dependent part only: weighted risk + quartic trace + ridge. Keeping
// the beta term out makes the alpha step bit-invariant to beta.
double alpha_part(const Problem& p, const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
    const Eigen::VectorXd r = p.K * alpha - p.y;
    const double risk = (w.array() * r.array().square()).sum() / p.n_s;
    double quartic = 0.0;
    if (p.lam.quartic != 0.0) {
        const Eigen::MatrixXd a = alpha.asDiagonal() * p.Kq;
        const Eigen::MatrixXd a2 = a * a;
        quartic = a2.cwiseProduct(a2.transpose()).sum();  // tr((D_a Kq)^4)
    }
    const double ridge = alpha.dot(p.K * alpha);
    return risk + p.lam.quartic * quartic + p.lam.ridge * ridge;
}

// w-dependent domain-adaptation term (constant during the alpha step).
double beta_part(const Problem& p, const Eigen::VectorXd& w) {
    if (p.beta == 0.0) return 0.0;
    const double quad = w.dot(p.K * w) / (p.n_s * p.n_s);
    const double cross = p.kst_sums.size() > 0 ? w.dot(p.kst_sums) : 0.0;
    return p.beta * (quad - 2.0 * cross / (p.n_s * p.n_t));
}

double full_objective(const Problem& p, const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
    return alpha_part(p, alpha, w) + beta_part(p, w);
}

Eigen::VectorXd alpha_grad(const Problem& p, const Eigen::VectorXd& alpha, const Eigen::VectorXd& w) {
    const Eigen::VectorXd r = p.K * alpha - p.y;
    Eigen::VectorXd g = (2.0 / p.n_s) * (p.K * (w.array() * r.array()).matrix());
    if (p.lam.quartic != 0.0) {
        const Eigen::MatrixXd a = alpha.asDiagonal() * p.Kq;
        const Eigen::MatrixXd a3 = (a * a) * a;
        // diag(Kq a^3) without forming the full product
        g += 4.0 * p.lam.quartic * p.Kq.cwiseProduct(a3.transpose()).rowwise().sum();
    }
    g += 2.0 * p.lam.ridge * (p.K * alpha);
    return g;
}

Eigen::VectorXd run_alpha_step(const Problem& p, const Eigen::VectorXd& w,
                               Eigen::VectorXd alpha, const AlphaStepConfig& cfg) {
    double f = alpha_part(p, alpha, w);
    if (!std::isfinite(f)) throw SolverError("alpha step: non-finite objective at warm start");
    Eigen::VectorXd g = alpha_grad(p, alpha, w);

    // Conservative curvature estimate for the quadratic part seeds the step.
    const double k_norm = p.K.cwiseAbs().rowwise().sum().maxCoeff();
    const double w_max = w.size() > 0 ? w.maxCoeff() : 1.0;
    const double lip0 = (2.0 / p.n_s) * w_max * k_norm * k_norm + 2.0 * p.lam.ridge * k_norm;
    const double t0 = 1.0 / std::max(lip0, 1e-12);
    double step = t0;

    for (int it = 0; it < cfg.max_iter; ++it) {
        if (g.lpNorm<Eigen::Infinity>() <= cfg.grad_tol) break;

        double t = step;
        bool accepted = false;
        bool any_finite = false;
        Eigen::VectorXd cand;
        double f_cand = f;
        const double g_sq = g.squaredNorm();
        for (int ls = 0; ls < 80; ++ls) {
            cand = alpha - t * g;
            f_cand = alpha_part(p, cand, w);
            if (std::isfinite(f_cand)) {
                any_finite = true;
                if (f_cand <= f - cfg.armijo * t * g_sq) {
                    accepted = true;
                    break;
                }
            }
            t *= cfg.backtrack;
            if (t < 1e-18) break;
        }
        if (!accepted) {
            if (!any_finite) throw SolverError("alpha step: no finite step exists");
            break;  // numerically stationary
        }

        const Eigen::VectorXd g_new = alpha_grad(p, cand, w);
        const Eigen::VectorXd s = cand - alpha;
        const Eigen::VectorXd dg = g_new - g;
        const double sdg = s.dot(dg);
        step = sdg > 1e-30 ? std::clamp(s.squaredNorm() / sdg, 1e-16, 1e8) : t0;

        alpha = std::move(cand);
        f = f_cand;
        g = g_new;
    }
    return alpha;
}

} // namespace detail

namespace {

using detail::Problem;

WeightVector run_weight_step(const Problem& p, const Eigen::VectorXd& alpha,
                             const SolverConfig& solver) {
    const Eigen::VectorXd r = p.K * alpha - p.y;

    QpSpec spec;
    spec.Q = (2.0 * p.beta / (p.n_s * p.n_s)) * p.K;
    spec.q = r.array().square().matrix() / p.n_s;
    if (p.kst_sums.size() > 0)
        spec.q -= (2.0 * p.beta / (p.n_s * p.n_t)) * p.kst_sums;
    spec.box_upper = solver.B;
    spec.sum_center = p.n_s;
    spec.sum_slack = p.n_s * solver.c;

    QpOptions qp;
    qp.tol = solver.qp_tol;
    qp.max_iter = solver.qp_max_iter;
    return solve_box_qp(spec, qp);
}

struct AlternationResult {
    Eigen::VectorXd alpha;
    WeightVector weights;
    std::vector<double> trace;
    bool converged = false;
    int outers = 0;
};

AlternationResult alternate(const Problem& p, Eigen::VectorXd alpha, WeightVector w,
                            const SolverConfig& solver) {
    AlternationResult res;
    double f = detail::full_objective(p, alpha, w.values);
    res.trace.push_back(f);

    for (int outer = 0; outer < solver.outer_max; ++outer) {
        alpha = detail::run_alpha_step(p, w.values, std::move(alpha), solver.alpha_step);

        if (p.beta > 0.0) {
            WeightVector w_cand = run_weight_step(p, alpha, solver);
            // The QP restarts from w = 1 each round; accept only improvements
            // so the outer trace stays non-increasing.
            if (detail::full_objective(p, alpha, w_cand.values) <=
                detail::full_objective(p, alpha, w.values))
                w = std::move(w_cand);
        }

        const double f_new = detail::full_objective(p, alpha, w.values);
        res.trace.push_back(f_new);
        res.outers = outer + 1;
        if (f - f_new <= solver.outer_tol * std::max(1.0, std::abs(f))) {
            res.converged = true;
            break;
        }
        f = f_new;
    }

    res.alpha = std::move(alpha);
    res.weights = std::move(w);
    return res;
}

WeightVector uniform_weights(Index n, const SolverConfig& solver) {
    WeightVector w;
    w.box_bound = solver.B;
    w.sum_slack = solver.c;
    w.values = project_box_slab(Eigen::VectorXd::Ones(n), solver.B,
                                static_cast<double>(n), static_cast<double>(n) * solver.c);
    return w;
}

} // namespace

double drda_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w,
                      const Dataset& source, const Dataset& target,
                      const KernelConfig& cfg, const SolverConfig& solver) {
    const Problem p = detail::build_problem(source, &target, cfg, solver);
    if (alpha.size() != source.size() || w.size() != source.size())
        throw InvalidInput("drda_objective: alpha/w length mismatch");
    return detail::full_objective(p, alpha, w);
}

Eigen::VectorXd alpha_gradient(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w,
                               const Dataset& source, const Dataset& target,
                               const KernelConfig& cfg, const SolverConfig& solver) {
    const Problem p = detail::build_problem(source, &target, cfg, solver);
    if (alpha.size() != source.size() || w.size() != source.size())
        throw InvalidInput("alpha_gradient: alpha/w length mismatch");
    return detail::alpha_grad(p, alpha, w);
}

Eigen::VectorXd solve_alpha_step(const Eigen::VectorXd& warm_alpha, const Eigen::VectorXd& w,
                                 const Dataset& source, const Dataset& target,
                                 const KernelConfig& cfg, const SolverConfig& solver) {
    const Problem p = detail::build_problem(source, &target, cfg, solver);
    return detail::run_alpha_step(p, w, warm_alpha, solver.alpha_step);
}

WeightVector solve_weight_step(const Eigen::VectorXd& alpha,
                               const Dataset& source, const Dataset& target,
                               const KernelConfig& cfg, const SolverConfig& solver) {
    const Problem p = detail::build_problem(source, &target, cfg, solver);
    return run_weight_step(p, alpha, solver);
}

DrdaFit fit_drda(const Dataset& source, const Dataset& target,
                 const KernelConfig& cfg, const SolverConfig& solver) {
    const Problem p = detail::build_problem(source, &target, cfg, solver);
    const Index n = source.size();

    AlternationResult best =
        alternate(p, Eigen::VectorXd::Zero(n), uniform_weights(n, solver), solver);
    bool used_sequential = false;

    if (solver.sequential_warm_start && solver.beta > 0.0) {
        KmmOptions kmm;
        kmm.B = solver.B;
        kmm.c = solver.c;
        kmm.tol = solver.qp_tol;
        kmm.max_iter = solver.qp_max_iter;
        WeightVector w_seq = kmm_fit(source, target, cfg, kmm);
        AlternationResult seq = alternate(p, Eigen::VectorXd::Zero(n), std::move(w_seq), solver);
        if (seq.trace.back() < best.trace.back()) {
            best = std::move(seq);
            used_sequential = true;
        }
    }

    DrdaFit fit;
    fit.model.support_points = source.features;
    fit.model.alpha = best.alpha;
    fit.model.bandwidth = cfg.bandwidth;
    fit.weights = best.weights;

    fit.report.objective_trace = best.trace;
    fit.report.converged = best.converged;
    fit.report.outer_iterations = best.outers;
    fit.report.final_objective = best.trace.back();
    fit.report.used_sequential_start = used_sequential;
    const Eigen::VectorXd r = p.K * best.alpha - p.y;
    fit.report.final_weighted_risk =
        (best.weights.values.array() * r.array().square()).sum() / p.n_s;
    fit.report.final_mmd_sq = mmd_sq_weighted(source, best.weights.values, target, cfg);
    return fit;
}

} // namespace drda
