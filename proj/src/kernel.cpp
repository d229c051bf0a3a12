#include "drda/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <thread>
#include <vector>

namespace drda {

namespace {

void require_nonempty(const Dataset& d, const char* who) {
    if (d.size() == 0) throw InvalidInput(std::string(who) + ": empty dataset");
}

void require_same_dim(const Dataset& a, const Dataset& b, const char* who) {
    if (a.dim() != b.dim()) throw InvalidInput(std::string(who) + ": feature dimension mismatch");
}

inline double kernel_from_dist_sq(double dist_sq, double inv_two_sigma_sq) {
    return std::exp(-dist_sq * inv_two_sigma_sq);
}

// Row accumulators summed in index order keep the reduction deterministic.
void for_rows_deterministic(Index n, int threads, const std::function<void(Index)>& body) {
    if (threads <= 1 || n < 64) {
        for (Index i = 0; i < n; ++i) body(i);
        return;
    }
    const int nt = std::min<int>(threads, static_cast<int>(n));
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t) {
        pool.emplace_back([&, t] {
            for (Index i = t; i < n; i += nt) body(i);
        });
    }
    for (auto& th : pool) th.join();
}

} // namespace

double eval_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelConfig& cfg) {
    cfg.check();
    if (x.size() != y.size()) throw InvalidInput("eval_kernel: dimension mismatch");
    const double d2 = (x - y).squaredNorm();
    return kernel_from_dist_sq(d2, 0.5 / (cfg.bandwidth * cfg.bandwidth));
}

GramMatrix gram(const Dataset& a, const Dataset& b, const KernelConfig& cfg) {
    cfg.check();
    require_nonempty(a, "gram");
    require_nonempty(b, "gram");
    require_same_dim(a, b, "gram");

    const Index n = a.size();
    const Index m = b.size();
    const double inv2s2 = 0.5 / (cfg.bandwidth * cfg.bandwidth);

    GramMatrix g;
    g.row_count = n;
    g.col_count = m;
    g.bandwidth = cfg.bandwidth;
    g.entries.resize(n, m);

    if (&a == &b) {
        for (Index i = 0; i < n; ++i) {
            g.entries(i, i) = 1.0;
            for (Index j = i + 1; j < n; ++j) {
                const double d2 = (a.features.row(i) - a.features.row(j)).squaredNorm();
                const double v = kernel_from_dist_sq(d2, inv2s2);
                g.entries(i, j) = v;
                g.entries(j, i) = v;
            }
        }
        return g;
    }

    for (Index i = 0; i < n; ++i) {
        for (Index j = 0; j < m; ++j) {
            const double d2 = (a.features.row(i) - b.features.row(j)).squaredNorm();
            g.entries(i, j) = kernel_from_dist_sq(d2, inv2s2);
        }
    }
    return g;
}

double mmd_sq_weighted_const_free(const Dataset& source, const Eigen::VectorXd& w,
                                  const Dataset& target, const KernelConfig& cfg) {
    require_nonempty(source, "mmd_sq_weighted");
    require_nonempty(target, "mmd_sq_weighted");
    require_same_dim(source, target, "mmd_sq_weighted");
    if (w.size() != source.size())
        throw InvalidInput("mmd_sq_weighted: weight length must equal source size");

    const double ns = static_cast<double>(source.size());
    const double nt = static_cast<double>(target.size());
    const GramMatrix ks = gram(source, source, cfg);
    const GramMatrix kst = gram(source, target, cfg);
    const double quad = w.dot(ks.entries * w) / (ns * ns);
    const double cross = w.dot(kst.entries * Eigen::VectorXd::Ones(target.size()));
    return quad - 2.0 * cross / (ns * nt);
}

double mmd_sq_weighted(const Dataset& source, const Eigen::VectorXd& w,
                       const Dataset& target, const KernelConfig& cfg) {
    const double base = mmd_sq_weighted_const_free(source, w, target, cfg);
    const GramMatrix kt = gram(target, target, cfg);
    const double nt = static_cast<double>(target.size());
    return base + kt.entries.sum() / (nt * nt);
}

double mmd_sq_between(const Dataset& a, const Eigen::VectorXd& wa,
                      const Dataset& b, const Eigen::VectorXd& wb,
                      const KernelConfig& cfg, int threads) {
    cfg.check();
    require_nonempty(a, "mmd_sq_between");
    require_nonempty(b, "mmd_sq_between");
    require_same_dim(a, b, "mmd_sq_between");
    if (wa.size() != a.size() || wb.size() != b.size())
        throw InvalidInput("mmd_sq_between: weight length mismatch");

    const Index n = a.size();
    const Index m = b.size();
    const double ns = static_cast<double>(n);
    const double ms = static_cast<double>(m);
    const double inv2s2 = 0.5 / (cfg.bandwidth * cfg.bandwidth);
    const bool scalar = a.dim() == 1;

    // Sum_i wx_i * sum_j wy_j k(x_i, y_j); strict upper triangle when
    // upper_only (same set), doubled by the caller.
    const auto weighted_pair_sum = [&](const Eigen::MatrixXd& x, const Eigen::VectorXd& wx,
                                       const Eigen::MatrixXd& y, const Eigen::VectorXd& wy,
                                       bool upper_only) {
        const Index rows = x.rows();
        const Index cols = y.rows();
        std::vector<double> row_acc(rows, 0.0);
        for_rows_deterministic(rows, threads, [&](Index i) {
            double acc = 0.0;
            const Index j0 = upper_only ? i + 1 : 0;
            if (scalar) {
                const double xi = x(i, 0);
                const double* yp = y.col(0).data();
                for (Index j = j0; j < cols; ++j) {
                    const double d = xi - yp[j];
                    acc += wy[j] * kernel_from_dist_sq(d * d, inv2s2);
                }
            } else {
                for (Index j = j0; j < cols; ++j) {
                    const double d2 = (x.row(i) - y.row(j)).squaredNorm();
                    acc += wy[j] * kernel_from_dist_sq(d2, inv2s2);
                }
            }
            row_acc[i] = wx[i] * acc;
        });
        double total = 0.0;
        for (Index i = 0; i < rows; ++i) total += row_acc[i];
        return total;
    };

    const double term_aa = wa.squaredNorm() + 2.0 * weighted_pair_sum(a.features, wa, a.features, wa, true);
    const double term_bb = wb.squaredNorm() + 2.0 * weighted_pair_sum(b.features, wb, b.features, wb, true);
    const double term_ab = weighted_pair_sum(a.features, wa, b.features, wb, false);

    return term_aa / (ns * ns) + term_bb / (ms * ms) - 2.0 * term_ab / (ns * ms);
}

double median_heuristic_bandwidth(const Dataset& a, const Dataset& b) {
    require_nonempty(a, "median_heuristic_bandwidth");
    require_nonempty(b, "median_heuristic_bandwidth");
    require_same_dim(a, b, "median_heuristic_bandwidth");

    Eigen::MatrixXd pooled(a.size() + b.size(), a.dim());
    pooled.topRows(a.size()) = a.features;
    pooled.bottomRows(b.size()) = b.features;

    const Index n = pooled.rows();
    std::vector<double> dists;
    dists.reserve(static_cast<std::size_t>(n) * (n - 1) / 2);
    for (Index i = 0; i < n; ++i)
        for (Index j = i + 1; j < n; ++j)
            dists.push_back((pooled.row(i) - pooled.row(j)).norm());
    if (dists.empty()) return 1.0;

    const std::size_t mid = dists.size() / 2;
    std::nth_element(dists.begin(), dists.begin() + mid, dists.end());
    double med = dists[mid];
    if (dists.size() % 2 == 0) {
        const double lower = *std::max_element(dists.begin(), dists.begin() + mid);
        med = 0.5 * (med + lower);
    }
    return med > 0.0 ? med : 1.0;
}

} // namespace drda
