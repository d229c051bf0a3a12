#pragma once

// Shared test helpers: independent oracle implementations (explicit loops, no
// matrix identities) and small statistics utilities. These must stay
// independent of the library code paths they are used to check.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "drda/dataset.hpp"

namespace testsupport {

inline double kernel_ref(const Eigen::VectorXd& x, const Eigen::VectorXd& y, double sigma) {
    double d2 = 0.0;
    for (Eigen::Index k = 0; k < x.size(); ++k) d2 += (x[k] - y[k]) * (x[k] - y[k]);
    return std::exp(-d2 / (2.0 * sigma * sigma));
}

// Naive O(n^2) double-loop expansion of the full squared MMD.
inline double mmd_sq_bruteforce(const drda::Dataset& source, const Eigen::VectorXd& w,
                                const drda::Dataset& target, double sigma) {
    const Eigen::Index ns = source.size();
    const Eigen::Index nt = target.size();
    double ss = 0.0, st = 0.0, tt = 0.0;
    for (Eigen::Index i = 0; i < ns; ++i)
        for (Eigen::Index j = 0; j < ns; ++j)
            ss += w[i] * w[j] *
                  kernel_ref(source.features.row(i), source.features.row(j), sigma);
    for (Eigen::Index i = 0; i < ns; ++i)
        for (Eigen::Index j = 0; j < nt; ++j)
            st += w[i] * kernel_ref(source.features.row(i), target.features.row(j), sigma);
    for (Eigen::Index i = 0; i < nt; ++i)
        for (Eigen::Index j = 0; j < nt; ++j)
            tt += kernel_ref(target.features.row(i), target.features.row(j), sigma);
    const double dns = static_cast<double>(ns);
    const double dnt = static_cast<double>(nt);
    return ss / (dns * dns) - 2.0 * st / (dns * dnt) + tt / (dnt * dnt);
}

inline drda::Dataset random_dataset(std::mt19937& rng, int n, int dim, bool labeled,
                                    double spread = 2.0) {
    std::normal_distribution<double> gauss(0.0, spread);
    Eigen::MatrixXd x(n, dim);
    for (int i = 0; i < n; ++i)
        for (int d = 0; d < dim; ++d) x(i, d) = gauss(rng);
    if (!labeled) return drda::Dataset::unlabeled(std::move(x));
    Eigen::VectorXd y(n);
    for (int i = 0; i < n; ++i) y[i] = gauss(rng) * 0.5;
    return drda::Dataset::labeled(std::move(x), std::move(y));
}

inline Eigen::VectorXd random_feasible_weights(std::mt19937& rng, int n, double B, double c) {
    std::uniform_real_distribution<double> unif(0.0, std::min(B, 2.0));
    Eigen::VectorXd w(n);
    for (int i = 0; i < n; ++i) w[i] = unif(rng);
    // rescale toward sum = n to land inside the slab
    const double target = static_cast<double>(n);
    const double s = w.sum();
    if (s > 0.0) {
        w *= target / s;
        for (int i = 0; i < n; ++i) w[i] = std::clamp(w[i], 0.0, B);
    }
    const double drift = std::abs(w.sum() - target) / target;
    if (drift > c) {
        // fall back to uniform, always feasible for B >= 1
        w.setOnes();
    }
    return w;
}

// Average-rank Spearman correlation.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    const auto ranks = [](const std::vector<double>& v) {
        const std::size_t n = v.size();
        std::vector<std::size_t> idx(n);
        std::iota(idx.begin(), idx.end(), 0u);
        std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) { return v[i] < v[j]; });
        std::vector<double> r(n);
        std::size_t i = 0;
        while (i < n) {
            std::size_t j = i;
            while (j + 1 < n && v[idx[j + 1]] == v[idx[i]]) ++j;
            const double avg = 0.5 * (static_cast<double>(i) + static_cast<double>(j)) + 1.0;
            for (std::size_t k = i; k <= j; ++k) r[idx[k]] = avg;
            i = j + 1;
        }
        return r;
    };
    const std::vector<double> ra = ranks(a);
    const std::vector<double> rb = ranks(b);
    const std::size_t n = ra.size();
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < n; ++i) { ma += ra[i]; mb += rb[i]; }
    ma /= n; mb /= n;
    double num = 0.0, da = 0.0, db = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        num += (ra[i] - ma) * (rb[i] - mb);
        da += (ra[i] - ma) * (ra[i] - ma);
        db += (rb[i] - mb) * (rb[i] - mb);
    }
    return num / std::sqrt(da * db);
}

// Exhaustive KKT/active-set oracle for
//   min 0.5 w'Qw + q'w  s.t.  0 <= w <= B, lo <= sum(w) <= hi.
// Every combination of {coordinate at 0, at B, free} x {sum free, at lo, at
// hi} yields one equality-constrained candidate; the best feasible candidate
// is the global minimum.
inline double box_slab_qp_oracle(const Eigen::MatrixXd& Q, const Eigen::VectorXd& q,
                                 double B, double lo, double hi) {
    const int n = static_cast<int>(q.size());
    const auto objective = [&](const Eigen::VectorXd& w) {
        return 0.5 * w.dot(Q * w) + q.dot(w);
    };
    const auto feasible = [&](const Eigen::VectorXd& w) {
        for (int i = 0; i < n; ++i)
            if (w[i] < -1e-9 || w[i] > B + 1e-9) return false;
        const double s = w.sum();
        return s >= lo - 1e-9 && s <= hi + 1e-9;
    };

    double best = std::numeric_limits<double>::infinity();
    std::vector<int> state(n);  // 0 = at zero, 1 = at B, 2 = free
    const long combos = static_cast<long>(std::pow(3.0, n));
    for (long mask = 0; mask < combos; ++mask) {
        long m = mask;
        for (int i = 0; i < n; ++i) { state[i] = static_cast<int>(m % 3); m /= 3; }
        std::vector<int> free_idx;
        double fixed_sum = 0.0;
        Eigen::VectorXd w = Eigen::VectorXd::Zero(n);
        for (int i = 0; i < n; ++i) {
            if (state[i] == 1) { w[i] = B; fixed_sum += B; }
            else if (state[i] == 2) free_idx.push_back(i);
        }
        const int f = static_cast<int>(free_idx.size());

        for (int sum_state = 0; sum_state < 3; ++sum_state) {  // 0 free, 1 at lo, 2 at hi
            Eigen::VectorXd cand = w;
            if (f > 0) {
                Eigen::MatrixXd qff(f, f);
                Eigen::VectorXd rhs(f);
                for (int a = 0; a < f; ++a) {
                    rhs[a] = -q[free_idx[a]];
                    for (int i = 0; i < n; ++i)
                        if (state[i] != 2) rhs[a] -= Q(free_idx[a], i) * w[i];
                    for (int b = 0; b < f; ++b) qff(a, b) = Q(free_idx[a], free_idx[b]);
                }
                Eigen::VectorXd wf;
                if (sum_state == 0) {
                    wf = qff.fullPivLu().solve(rhs);
                } else {
                    const double target = (sum_state == 1 ? lo : hi) - fixed_sum;
                    Eigen::MatrixXd kkt(f + 1, f + 1);
                    kkt.setZero();
                    kkt.topLeftCorner(f, f) = qff;
                    kkt.topRightCorner(f, 1).setOnes();
                    kkt.bottomLeftCorner(1, f).setOnes();
                    Eigen::VectorXd kkt_rhs(f + 1);
                    kkt_rhs.head(f) = rhs;
                    kkt_rhs[f] = target;
                    const Eigen::VectorXd sol = kkt.fullPivLu().solve(kkt_rhs);
                    wf = sol.head(f);
                }
                for (int a = 0; a < f; ++a) cand[free_idx[a]] = wf[a];
            } else if (sum_state != 0) {
                continue;  // no free coordinate can meet an active sum constraint
            }
            if (feasible(cand)) best = std::min(best, objective(cand));
        }
    }
    return best;
}

// Central finite differences of a scalar function, step 1e-6 * (1 + |x_i|).
template <typename F>
Eigen::VectorXd finite_difference_gradient(const F& f, const Eigen::VectorXd& x) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        const double h = 1e-6 * (1.0 + std::abs(x[i]));
        Eigen::VectorXd xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        g[i] = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

} // namespace testsupport
