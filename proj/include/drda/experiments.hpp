#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "drda/dataset.hpp"
#include "drda/kernel.hpp"
#include "drda/solver.hpp"

namespace drda {

// Synthetic regression benchmark: y = g(x) + noise with
// g(x) = k_sigma(x, 1) - k_sigma(x, -1), source and target domains Gaussian.
struct SyntheticConfig {
    double source_mean = 1.0;
    double source_std = 0.5;
    double target_mean = -1.0;
    double target_std = 0.6;
    double label_noise_std = 0.1;
    double sigma_for_g = 1.0;
    int n_s = 100;
    int n_t = 100;
    int n_test = 500;
    int trials = 50;
    std::uint64_t base_seed = 987654321;

    void check() const {
        if (!(source_std > 0.0) || !(target_std > 0.0) || !(sigma_for_g > 0.0))
            throw InvalidInput("synthetic: stds and sigma_for_g must be > 0");
        if (label_noise_std < 0.0) throw InvalidInput("synthetic: label noise must be >= 0");
        if (n_s < 1 || n_t < 1 || n_test < 1 || trials < 1)
            throw InvalidInput("synthetic: counts must be >= 1");
    }
};

enum class PerturbKind { Features, Labels };
enum class Method { RLS, WRLS, WDRO, DRO, DRDA };

const char* method_name(Method m);

struct SweepSpec {
    std::vector<double> rho_grid;
    PerturbKind perturb = PerturbKind::Features;
    std::vector<Method> methods = {Method::RLS, Method::WRLS, Method::WDRO,
                                   Method::DRO, Method::DRDA};

    void check() const {
        if (rho_grid.empty()) throw InvalidInput("sweep: empty rho grid");
        for (double r : rho_grid)
            if (r < 0.0) throw InvalidInput("sweep: rho must be >= 0");
        if (methods.empty()) throw InvalidInput("sweep: no methods selected");
    }
};

// Shared fitting settings for one sweep. The solver's lambda/B/c also drive
// the least-squares baselines and KMM.
struct HarnessConfig {
    KernelConfig kernel{1.0};
    SolverConfig solver;
    int threads = 1;
};

struct ResultRow {
    std::string method;
    double x = 0.0;  // rho or sample size
    double mean_loss = 0.0;
    double ci_half_width = 0.0;
    int trials = 0;
};

struct TrialLoss {
    std::string method;
    double x = 0.0;
    int trial = 0;
    double loss = 0.0;
};

struct ResultTable {
    std::string x_name = "rho";
    std::vector<ResultRow> rows;
    std::vector<TrialLoss> per_trial;
    std::vector<std::string> failures;  // one note per failed (trial, method) fit
};

struct TrialData {
    Dataset source;  // labeled
    Dataset target;  // unlabeled
    Dataset test;    // labeled
};

// Labeling function of the data model.
double label_function(double x, double sigma_g);

// Counter-based streams split by role, so the triple is a pure function of
// (base_seed, trial): 0 source x, 1 target x, 2 test x, 3 source label
// noise, 4 test label noise; 5 + rho index is reserved for perturbations.
TrialData gen_synthetic(const SyntheticConfig& sc, int trial);

// Fits every selected method once per trial on clean data, then scores mean
// squared loss on the test set perturbed at each rho (fresh noise per
// (trial, rho)). Failed fits are excluded per cell and counted.
ResultTable run_noise_sweep(const SyntheticConfig& sc, const SweepSpec& spec,
                            const HarnessConfig& harness);

// DRDA risk against the noiseless labeling function on a 5000-point clean
// target sample, for n_s = n_t = size.
ResultTable run_size_sweep(const SyntheticConfig& sc, const std::vector<int>& sizes,
                           const HarnessConfig& harness);

} // namespace drda
