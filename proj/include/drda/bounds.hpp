#pragma once

#include "drda/errors.hpp"

namespace drda {

// Inputs to the closed-form ambiguity radii: weight cap B, kernel sup-norm
// bound M (1 for the Gaussian kernel), sample sizes and confidence delta.
struct AmbiguityParams {
    double B = 10.0;
    double M = 1.0;
    int n_s = 1;
    int n_t = 1;
    double delta = 0.05;

    void check() const {
        if (!(B > 0.0)) throw InvalidInput("ambiguity: B must be > 0");
        if (!(M > 0.0)) throw InvalidInput("ambiguity: M must be > 0");
        if (n_s < 1 || n_t < 1) throw InvalidInput("ambiguity: sample sizes must be >= 1");
        if (!(delta > 0.0 && delta < 1.0)) throw InvalidInput("ambiguity: delta must be in (0,1)");
    }
};

// High-probability distance of the weighted source population measure from
// its empirical version:  B sqrt(M/ns) (1 + sqrt(2 log(1/delta))).
double radius_weighted_source(const AmbiguityParams& p);

// Same concentration for the plain target empirical measure, using n_t only.
double radius_empirical_target(const AmbiguityParams& p);

// Radius putting the target population inside the transferred ambiguity set:
//   sqrt(M) (sqrt(B^2/ns + 1/nt) + sqrt(1/nt)) (1 + sqrt(2 log(1/delta))),
// the triangle-inequality composition of the two deviations above.
double radius_target_in_transferred_set(const AmbiguityParams& p);

// Certificate on the population target risk for hypotheses with RKHS norm
// at most eta: bound = B * empirical_source_risk + 4 eta^2 * radius.
struct BoundCertificate {
    double empirical_source_risk = 0.0;
    double radius = 0.0;  // radius_target_in_transferred_set
    double eta = 0.0;
    double bound_value = 0.0;
};

// Requires M = 1 (Gaussian kernel assumption baked into the constant 4).
BoundCertificate generalization_bound(double empirical_source_risk,
                                      const AmbiguityParams& p, double eta);

} // namespace drda
