#pragma once

#include <optional>
#include <utility>

#include <Eigen/Dense>

#include "drda/errors.hpp"

namespace drda {

using Index = Eigen::Index;

// Sample container: one feature vector per row, optional real labels.
// Immutable by convention once constructed.
struct Dataset {
    Eigen::MatrixXd features;               // n x d
    std::optional<Eigen::VectorXd> labels;  // size n when present

    Dataset() = default;

    static Dataset unlabeled(Eigen::MatrixXd x) {
        Dataset d;
        d.features = std::move(x);
        d.check();
        return d;
    }

    static Dataset labeled(Eigen::MatrixXd x, Eigen::VectorXd y) {
        Dataset d;
        d.features = std::move(x);
        d.labels = std::move(y);
        d.check();
        return d;
    }

    // Convenience for 1-d feature spaces.
    static Dataset from_scalars(const Eigen::VectorXd& x) {
        Eigen::MatrixXd m(x.size(), 1);
        m.col(0) = x;
        return unlabeled(std::move(m));
    }

    static Dataset from_scalars(const Eigen::VectorXd& x, Eigen::VectorXd y) {
        Eigen::MatrixXd m(x.size(), 1);
        m.col(0) = x;
        return labeled(std::move(m), std::move(y));
    }

    Index size() const { return features.rows(); }
    Index dim() const { return features.cols(); }
    bool has_labels() const { return labels.has_value(); }

    const Eigen::VectorXd& y() const {
        if (!labels) throw InvalidInput("dataset has no labels");
        return *labels;
    }

    void check() const {
        if (features.rows() > 0 && features.cols() < 1)
            throw InvalidInput("feature dimension must be >= 1");
        if (labels && labels->size() != features.rows())
            throw InvalidInput("label count must equal sample count");
    }
};

} // namespace drda
