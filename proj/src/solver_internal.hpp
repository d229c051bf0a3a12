#pragma once

// Shared fit machinery between the DRDA solver and the baseline regressors.
// Not installed; include only from src/.

#include <Eigen/Dense>

#include "drda/dataset.hpp"
#include "drda/kernel.hpp"
#include "drda/solver.hpp"

namespace drda::detail {

struct Penalties {
    double quartic = 0.0;
    double ridge = 0.0;
};

// Grams and labels fixed across a fit. kst_sums is empty when no target
// terms are needed (source-only fits).
struct Problem {
    Eigen::MatrixXd K;         // K^s at sigma
    Eigen::MatrixXd Kq;        // K^s at sigma/sqrt(2)
    Eigen::VectorXd kst_sums;  // K^{s,t} 1
    Eigen::VectorXd y;
    double n_s = 0.0;
    double n_t = 1.0;
    double beta = 0.0;
    Penalties lam;
};

Problem build_problem(const Dataset& source, const Dataset* target,
                      const KernelConfig& cfg, const SolverConfig& solver);

double alpha_part(const Problem& p, const Eigen::VectorXd& alpha, const Eigen::VectorXd& w);
double beta_part(const Problem& p, const Eigen::VectorXd& w);
double full_objective(const Problem& p, const Eigen::VectorXd& alpha, const Eigen::VectorXd& w);
Eigen::VectorXd alpha_grad(const Problem& p, const Eigen::VectorXd& alpha, const Eigen::VectorXd& w);
Eigen::VectorXd run_alpha_step(const Problem& p, const Eigen::VectorXd& w,
                               Eigen::VectorXd alpha, const AlphaStepConfig& cfg);

} // namespace drda::detail
