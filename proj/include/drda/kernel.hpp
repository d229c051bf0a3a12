#pragma once

#include <Eigen/Dense>

#include "drda/dataset.hpp"
#include "drda/errors.hpp"

namespace drda {

// Gaussian kernel settings. The sup-norm bound M = sup_x k(x,x) is 1 here.
struct KernelConfig {
    double bandwidth = 1.0;  // sigma > 0

    KernelConfig() = default;
    explicit KernelConfig(double sigma) : bandwidth(sigma) { check(); }

    void check() const {
        if (!(bandwidth > 0.0)) throw InvalidInput("kernel bandwidth must be > 0");
    }

    // Bandwidth sigma/sqrt(2) of the space holding products of functions in
    // the sigma-space. Derived on demand, never stored.
    KernelConfig product_space() const { return KernelConfig(bandwidth / std::sqrt(2.0)); }
};

// Dense kernel evaluations of one dataset against another at a fixed bandwidth.
struct GramMatrix {
    Eigen::MatrixXd entries;
    Index row_count = 0;
    Index col_count = 0;
    double bandwidth = 0.0;
};

// k_sigma(x, y) = exp(-||x-y||^2 / (2 sigma^2)), in (0, 1].
double eval_kernel(const Eigen::VectorXd& x, const Eigen::VectorXd& y, const KernelConfig& cfg);

// entries(i, j) = k(a_i, b_j). Passing the same object twice takes the
// symmetric path: upper triangle computed, mirrored, unit diagonal.
GramMatrix gram(const Dataset& a, const Dataset& b, const KernelConfig& cfg);

// Full squared MMD between the w-weighted source empirical measure and the
// uniform target empirical measure, including the target-target constant:
//   (1/ns^2) w'Ks w - (2/(nt ns)) w'Kst 1 + (1/nt^2) 1'Kt 1.
double mmd_sq_weighted(const Dataset& source, const Eigen::VectorXd& w,
                       const Dataset& target, const KernelConfig& cfg);

// Constant-free form used inside the solver objective:
//   (1/ns^2) w'Ks w - (2/(nt ns)) w'Kst 1.
double mmd_sq_weighted_const_free(const Dataset& source, const Eigen::VectorXd& w,
                                  const Dataset& target, const KernelConfig& cfg);

// Squared MMD between two weighted empirical measures, streamed row by row so
// large samples never materialize a Gram matrix. Row accumulators are reduced
// in index order, so the result is independent of the thread count.
double mmd_sq_between(const Dataset& a, const Eigen::VectorXd& wa,
                      const Dataset& b, const Eigen::VectorXd& wb,
                      const KernelConfig& cfg, int threads = 1);

// Median pairwise distance over the pooled samples; 1.0 if degenerate.
double median_heuristic_bandwidth(const Dataset& a, const Dataset& b);

} // namespace drda
