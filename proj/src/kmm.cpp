#include "drda/kmm.hpp"

namespace drda {

WeightVector kmm_fit(const Dataset& source, const Dataset& target,
                     const KernelConfig& cfg, const KmmOptions& opts) {
    if (source.size() == 0 || target.size() == 0)
        throw InvalidInput("kmm_fit: empty dataset");
    if (source.dim() != target.dim())
        throw InvalidInput("kmm_fit: feature dimension mismatch");
    if (!(opts.B > 0.0) || opts.c < 0.0)
        throw InvalidInput("kmm_fit: need B > 0 and c >= 0");

    const double ns = static_cast<double>(source.size());
    const double nt = static_cast<double>(target.size());

    const GramMatrix ks = gram(source, source, cfg);
    const GramMatrix kst = gram(source, target, cfg);

    QpSpec spec;
    spec.Q = (2.0 / (ns * ns)) * ks.entries;
    spec.q = (-2.0 / (ns * nt)) * (kst.entries * Eigen::VectorXd::Ones(target.size()));
    spec.box_upper = opts.B;
    spec.sum_center = ns;
    spec.sum_slack = ns * opts.c;

    QpOptions qp;
    qp.tol = opts.tol;
    qp.max_iter = opts.max_iter;
    return solve_box_qp(spec, qp);
}

} // namespace drda
