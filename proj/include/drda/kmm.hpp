#pragma once

#include "drda/dataset.hpp"
#include "drda/kernel.hpp"
#include "drda/qp.hpp"

namespace drda {

struct KmmOptions {
    double B = 10.0;
    double c = 0.05;
    double tol = 1e-8;
    int max_iter = 10000;
};

// Kernel Mean Matching: weights minimizing the MMD between the weighted
// source and the uniform target empirical measures, over the box/sum set.
// QP form: Q = (2/ns^2) Ks, q = -(2/(ns nt)) Kst 1.
WeightVector kmm_fit(const Dataset& source, const Dataset& target,
                     const KernelConfig& cfg, const KmmOptions& opts = {});

} // namespace drda
