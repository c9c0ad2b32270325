#pragma once

#include <Eigen/Dense>

#include "fhfm/panel.hpp"

namespace fhfm {

// Sample auto-covariance matrix at a fixed lag.
struct CovMatrix {
    Eigen::MatrixXd matrix; // P x P
    int lag = 0;
};

// Full symmetric eigendecomposition with eigenvalues in nonincreasing order.
// Column i of eigenvectors pairs with eigenvalue i; each eigenvector's entry
// of largest absolute value is nonnegative (ties broken by lowest index).
struct EigenDecomp {
    Eigen::VectorXd eigenvalues;
    Eigen::MatrixXd eigenvectors;
};

// Per-series mean over time, length P.
Eigen::VectorXd sample_mean(const Panel& panel);

// Centered sample auto-covariance. Lag 0 divides by T, lag l >= 1 divides by
// T - l; both center by the full-sample mean. Requires 0 <= lag < T.
CovMatrix sample_autocov(const Panel& panel, int lag);

// Eigendecomposition of a symmetric matrix (symmetrized as (A + A^T)/2 after
// checking symmetry to 1e-8 relative tolerance).
EigenDecomp sym_eigen_desc(const Eigen::MatrixXd& matrix);

// First differences along time: column t of the output is y_{t+1} - y_t,
// labeled by the later period. Requires T >= 3.
Panel difference_panel(const Panel& panel);

} // namespace fhfm
