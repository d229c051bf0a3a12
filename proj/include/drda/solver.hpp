#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drda/bounds.hpp"
#include "drda/dataset.hpp"
#include "drda/kernel.hpp"
#include "drda/model.hpp"
#include "drda/qp.hpp"

namespace drda {

// Whether the norm-penalty coefficient is the user lambda or the computed
// Theorem-1 radius eps_t'.
enum class EpsilonMode { UserLambda, Theorem1 };

struct AlphaStepConfig {
    int max_iter = 2000;
    double grad_tol = 1e-7;
    double backtrack = 0.5;
    double armijo = 1e-4;
};

struct SolverConfig {
    double beta = 10.0;    // domain-adaptation trade-off
    double lambda = 1.2;   // robustness/regularization weight
    double B = 10.0;       // weight box bound
    double c = 0.05;       // weight sum slack ratio
    EpsilonMode epsilon_mode = EpsilonMode::UserLambda;
    double delta = 0.05;   // confidence for Theorem1 mode
    int outer_max = 50;
    double outer_tol = 1e-6;
    AlphaStepConfig alpha_step;
    double qp_tol = 1e-8;
    int qp_max_iter = 10000;
    // Advanced split of the penalty between the quartic-trace and ridge
    // terms; negative means "use lambda for both".
    double lambda_quartic = -1.0;
    double lambda_ridge = -1.0;
    bool sequential_warm_start = true;
    std::uint64_t seed = 0;

    void check() const {
        if (beta < 0.0 || lambda < 0.0) throw InvalidInput("solver: beta, lambda must be >= 0");
        if (!(outer_tol > 0.0)) throw InvalidInput("solver: outer_tol must be > 0");
        if (!(B > 0.0) || c < 0.0) throw InvalidInput("solver: need B > 0 and c >= 0");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("solver: delta must be in (0,1)");
    }
};

struct FitReport {
    std::vector<double> objective_trace;  // initial value, then one per outer round
    bool converged = false;
    int outer_iterations = 0;
    double final_objective = 0.0;
    double final_mmd_sq = 0.0;        // full squared MMD at the final weights
    double final_weighted_risk = 0.0;
    bool used_sequential_start = false;
};

struct DrdaFit {
    RegressionModel model;
    WeightVector weights;
    FitReport report;
};

// The joint objective, constant-free MMD form:
//   (1/ns) (K a - y)' W (K a - y)
//   + beta ((1/ns^2) w'Ks w - (2/(nt ns)) w'Kst 1)
//   + lam_q tr((D_a Kq)^4) + lam_r a'Ks a,
// where Kq is the Gram matrix at bandwidth sigma/sqrt(2) and the penalty
// coefficients come from epsilon_mode.
double drda_objective(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w,
                      const Dataset& source, const Dataset& target,
                      const KernelConfig& cfg, const SolverConfig& solver);

// Analytic gradient of drda_objective in alpha at fixed w. The quartic term
// contributes 4 lam_q diag(Kq (D_a Kq)^3).
Eigen::VectorXd alpha_gradient(const Eigen::VectorXd& alpha, const Eigen::VectorXd& w,
                               const Dataset& source, const Dataset& target,
                               const KernelConfig& cfg, const SolverConfig& solver);

// Inner minimizer over alpha at fixed weights: monotone gradient descent with
// Barzilai-Borwein step seeding and Armijo backtracking from the warm start.
Eigen::VectorXd solve_alpha_step(const Eigen::VectorXd& warm_alpha, const Eigen::VectorXd& w,
                                 const Dataset& source, const Dataset& target,
                                 const KernelConfig& cfg, const SolverConfig& solver);

// The w-subproblem at fixed alpha, delegated to solve_box_qp with
//   Q = (2 beta/ns^2) Ks,  q_i = (1/ns) r_i^2 - (2 beta/(ns nt)) (Kst 1)_i.
WeightVector solve_weight_step(const Eigen::VectorXd& alpha,
                               const Dataset& source, const Dataset& target,
                               const KernelConfig& cfg, const SolverConfig& solver);

// Alternating minimization from (alpha = 0, w = 1). When beta > 0 a second
// run warm-started from the KMM-then-alpha sequential solution is evaluated
// and the better final objective wins, so the joint fit never loses to the
// sequential pipeline. With beta = 0 the adaptation term is off and the
// weights stay at 1.
DrdaFit fit_drda(const Dataset& source, const Dataset& target,
                 const KernelConfig& cfg, const SolverConfig& solver);

} // namespace drda
