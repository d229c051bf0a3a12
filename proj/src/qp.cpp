#include "drda/qp.hpp"

#include <algorithm>
#include <cmath>

namespace drda {

namespace {

// Clamp to the box, then repair any residual sum violation by spreading the
// correction over coordinates with room, so both constraints end up holding
// to machine precision (the Dykstra loop already got within ~1e-12).
Eigen::VectorXd polish_feasible(Eigen::VectorXd w, double upper, double center, double slack) {
    const Index n = w.size();
    w = w.cwiseMax(0.0).cwiseMin(upper);
    for (int round = 0; round < 64; ++round) {
        const double s = w.sum();
        double shift = 0.0;
        if (s > center + slack) shift = (center + slack) - s;       // negative
        else if (s < center - slack) shift = (center - slack) - s;  // positive
        else break;

        Index free = 0;
        for (Index i = 0; i < n; ++i) {
            const bool room = shift > 0.0 ? w[i] < upper : w[i] > 0.0;
            if (room) ++free;
        }
        if (free == 0) break;
        const double per = shift / static_cast<double>(free);
        for (Index i = 0; i < n; ++i) {
            const bool room = shift > 0.0 ? w[i] < upper : w[i] > 0.0;
            if (room) w[i] = std::clamp(w[i] + per, 0.0, upper);
        }
    }
    return w;
}

} // namespace

bool WeightVector::feasible(double tol) const {
    const Index n = values.size();
    for (Index i = 0; i < n; ++i)
        if (values[i] < -tol || values[i] > box_bound + tol) return false;
    const double n_d = static_cast<double>(n);
    return std::abs(values.sum() - n_d) <= n_d * sum_slack + tol * std::max(1.0, n_d);
}

void WeightVector::require_feasible() const {
    if (!feasible()) throw InvalidInput("weight vector violates box/sum constraints");
}

void QpSpec::check() const {
    const Index n = q.size();
    if (n == 0) throw InvalidInput("qp: empty problem");
    if (Q.rows() != n || Q.cols() != n) throw InvalidInput("qp: Q/q dimension mismatch");
    if (!Q.isApprox(Q.transpose(), 1e-10)) throw InvalidInput("qp: Q must be symmetric");
    if (!(box_upper > 0.0)) throw InvalidInput("qp: box upper bound must be > 0");
    if (sum_slack < 0.0) throw InvalidInput("qp: sum slack must be >= 0");
    if (sum_center - sum_slack > box_upper * static_cast<double>(n) ||
        sum_center + sum_slack < 0.0)
        throw InvalidInput("qp: box and sum constraints are jointly infeasible");
}

Eigen::VectorXd project_box_slab(const Eigen::VectorXd& v, double upper,
                                 double center, double slack) {
    const Index n = v.size();
    const double n_d = static_cast<double>(n);
    const double lo = center - slack;
    const double hi = center + slack;

    Eigen::VectorXd x = v;
    Eigen::VectorXd p = Eigen::VectorXd::Zero(n);  // box increment
    Eigen::VectorXd r = Eigen::VectorXd::Zero(n);  // slab increment

    for (int it = 0; it < 1000; ++it) {
        const Eigen::VectorXd y = (x + p).cwiseMax(0.0).cwiseMin(upper);
        p = x + p - y;
        const Eigen::VectorXd z = y + r;
        const double s = z.sum();
        Eigen::VectorXd x_next = z;
        if (s > hi) x_next.array() -= (s - hi) / n_d;
        else if (s < lo) x_next.array() += (lo - s) / n_d;
        r = z - x_next;

        const double delta = (x_next - x).lpNorm<Eigen::Infinity>();
        x = x_next;
        const double sum_gap = std::max(0.0, std::max(x.sum() - hi, lo - x.sum()));
        const double box_gap = std::max((-x.array()).maxCoeff(), (x.array() - upper).maxCoeff());
        if (delta < 1e-14 || (sum_gap < 1e-12 && box_gap < 1e-12)) break;
    }
    return polish_feasible(std::move(x), upper, center, slack);
}

WeightVector solve_box_qp(const QpSpec& spec, const QpOptions& opts) {
    spec.check();
    if (!(opts.tol > 0.0)) throw InvalidInput("qp: tol must be > 0");
    const Index n = spec.q.size();

    const auto project = [&](const Eigen::VectorXd& v) {
        return project_box_slab(v, spec.box_upper, spec.sum_center, spec.sum_slack);
    };
    const auto objective = [&](const Eigen::VectorXd& w) {
        return 0.5 * w.dot(spec.Q * w) + spec.q.dot(w);
    };

    Eigen::VectorXd w = project(Eigen::VectorXd::Ones(n));
    Eigen::VectorXd grad = spec.Q * w + spec.q;
    double f = objective(w);

    std::vector<double> trace;
    if (opts.record_trace) trace.push_back(f);

    const double step_max = 1e12;
    const double step_min = 1e-14;
    double step = 1.0 / std::max(spec.Q.diagonal().maxCoeff(), 1e-12);
    step = std::clamp(step, step_min, step_max);

    WeightVector out;
    out.box_bound = spec.box_upper;
    out.sum_slack = spec.sum_center > 0.0 ? spec.sum_slack / spec.sum_center : spec.sum_slack;
    out.converged = false;

    int it = 0;
    for (; it < opts.max_iter; ++it) {
        // Fixed-point residual at unit-capped step measures stationarity.
        const double resid =
            (w - project(w - std::min(1.0, step) * grad)).lpNorm<Eigen::Infinity>();
        if (resid <= opts.tol * (1.0 + grad.lpNorm<Eigen::Infinity>())) {
            out.converged = true;
            break;
        }

        double t = step;
        Eigen::VectorXd w_next;
        double f_next = f;
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            w_next = project(w - t * grad);
            const Eigen::VectorXd d = w_next - w;
            const double gd = grad.dot(d);
            f_next = objective(w_next);
            if (std::isfinite(f_next) && f_next <= f + 1e-4 * gd) {
                accepted = true;
                break;
            }
            t *= 0.5;
            if (t < step_min) break;
        }
        if (!accepted || !(f_next < f)) {
            // No strict descent step left: at numerical stationarity.
            out.converged = true;
            break;
        }

        const Eigen::VectorXd s = w_next - w;
        const Eigen::VectorXd qs = spec.Q * s;
        const double ss = s.squaredNorm();
        const double sqs = s.dot(qs);
        step = sqs > 1e-30 * ss ? std::clamp(ss / sqs, step_min, step_max) : step_max;

        w = std::move(w_next);
        grad += qs;  // gradient of the quadratic moves linearly
        f = f_next;
        if (opts.record_trace) trace.push_back(f);
    }

    out.values = std::move(w);
    out.iterations = it;
    out.objective = f;
    out.objective_trace = std::move(trace);
    return out;
}

} // namespace drda
