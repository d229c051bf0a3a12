#pragma once

#include <vector>

#include <Eigen/Dense>

#include "drda/dataset.hpp"
#include "drda/errors.hpp"

namespace drda {

// Estimated density-ratio values on the source sample. Feasible set:
//   0 <= values[i] <= box_bound,  |sum(values) - n| <= n * sum_slack.
struct WeightVector {
    Eigen::VectorXd values;
    double box_bound = 10.0;  // B
    double sum_slack = 0.05;  // c

    // Solver metadata; a convergence warning is carried here, never dropped.
    bool converged = true;
    int iterations = 0;
    double objective = 0.0;
    std::vector<double> objective_trace;  // filled only when requested

    double sum_center() const { return static_cast<double>(values.size()); }

    bool feasible(double tol = 1e-9) const;
    void require_feasible() const;
};

// Canonical box+slab quadratic program shared by KMM and the DRDA weight
// step: minimize 0.5 w'Qw + q'w over the WeightVector feasible set.
struct QpSpec {
    Eigen::MatrixXd Q;   // symmetric PSD
    Eigen::VectorXd q;
    double box_upper = 10.0;
    double sum_center = 0.0;  // n_s
    double sum_slack = 0.0;   // n_s * c, absolute

    void check() const;
};

struct QpOptions {
    double tol = 1e-8;
    int max_iter = 10000;
    bool record_trace = false;
};

// Euclidean projection onto {0 <= w <= upper} ∩ {|sum(w) - center| <= slack},
// Dykstra alternation (box first, then slab) polished to exact feasibility.
Eigen::VectorXd project_box_slab(const Eigen::VectorXd& v, double upper,
                                 double center, double slack);

// Projected gradient descent with Barzilai-Borwein step seeding and a
// backtracking line search; deterministic (starts from the projection of the
// all-ones vector). The accepted-iterate objective is non-increasing.
// Hitting max_iter sets converged = false on the result, never throws.
WeightVector solve_box_qp(const QpSpec& spec, const QpOptions& opts = {});

} // namespace drda
