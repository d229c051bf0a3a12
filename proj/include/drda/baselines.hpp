#pragma once

#include "drda/dataset.hpp"
#include "drda/kernel.hpp"
#include "drda/kmm.hpp"
#include "drda/model.hpp"
#include "drda/solver.hpp"

namespace drda {

struct WeightedFit {
    RegressionModel model;
    WeightVector weights;
};

// Regularized least squares: (K'K + lambda K + jitter I) a = K'y.
RegressionModel fit_rls(const Dataset& source, const KernelConfig& cfg, double lambda);

// KMM weights, then (K'WK + lambda K + jitter I) a = K'Wy.
WeightedFit fit_wrls(const Dataset& source, const Dataset& target, const KernelConfig& cfg,
                     double lambda, double B = 10.0, double c = 0.05);

// KMM weights held fixed, then the DRDA objective minimized over alpha only.
WeightedFit fit_wdro(const Dataset& source, const Dataset& target, const KernelConfig& cfg,
                     const SolverConfig& solver);

// Source-only robust fit: w = 1, no target data; the beta = 0, w = 1
// ablation of the DRDA objective.
RegressionModel fit_dro_source_only(const Dataset& source, const KernelConfig& cfg,
                                    const SolverConfig& solver);

} // namespace drda
