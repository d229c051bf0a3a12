#pragma once

#include <Eigen/Dense>

#include "drda/dataset.hpp"
#include "drda/kernel.hpp"

namespace drda {

// Representer-form regressor: h(x) = sum_i alpha_i k_sigma(x_i, x).
struct RegressionModel {
    Eigen::MatrixXd support_points;  // n x d
    Eigen::VectorXd alpha;
    double bandwidth = 1.0;

    void check() const {
        if (alpha.size() != support_points.rows())
            throw InvalidInput("model: alpha length must equal support point count");
        if (!(bandwidth > 0.0)) throw InvalidInput("model: bandwidth must be > 0");
    }
};

double predict(const RegressionModel& model, const Eigen::VectorXd& x);

// One prediction per row of xs.
Eigen::VectorXd predict(const RegressionModel& model, const Eigen::MatrixXd& xs);

// sqrt(alpha' K alpha), the RKHS norm of the represented function.
double rkhs_norm(const RegressionModel& model);

} // namespace drda
