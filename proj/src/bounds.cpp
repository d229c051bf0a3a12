#include "drda/bounds.hpp"

#include <cmath>

namespace drda {

namespace {
inline double confidence_factor(double delta) {
    return 1.0 + std::sqrt(2.0 * std::log(1.0 / delta));
}
}

double radius_weighted_source(const AmbiguityParams& p) {
    p.check();
    return p.B * std::sqrt(p.M / static_cast<double>(p.n_s)) * confidence_factor(p.delta);
}

double radius_empirical_target(const AmbiguityParams& p) {
    p.check();
    return std::sqrt(p.M / static_cast<double>(p.n_t)) * confidence_factor(p.delta);
}

double radius_target_in_transferred_set(const AmbiguityParams& p) {
    p.check();
    const double ns = static_cast<double>(p.n_s);
    const double nt = static_cast<double>(p.n_t);
    const double across = std::sqrt(p.B * p.B / ns + 1.0 / nt);
    return std::sqrt(p.M) * (across + std::sqrt(1.0 / nt)) * confidence_factor(p.delta);
}

BoundCertificate generalization_bound(double empirical_source_risk,
                                      const AmbiguityParams& p, double eta) {
    p.check();
    if (empirical_source_risk < 0.0)
        throw InvalidInput("generalization_bound: risk must be >= 0");
    if (!(eta > 0.0)) throw InvalidInput("generalization_bound: eta must be > 0");
    if (std::abs(p.M - 1.0) > 1e-12)
        throw InvalidInput("generalization_bound: stated for M = 1 (Gaussian kernel)");

    BoundCertificate cert;
    cert.empirical_source_risk = empirical_source_risk;
    cert.radius = radius_target_in_transferred_set(p);
    cert.eta = eta;
    cert.bound_value = p.B * empirical_source_risk + 4.0 * eta * eta * cert.radius;
    return cert;
}

} // namespace drda
