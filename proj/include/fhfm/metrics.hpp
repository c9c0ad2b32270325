#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "fhfm/panel.hpp"

namespace fhfm {

// Variance and lag-1 serial dependence of an estimated factor series. The
// variance divides by T-1 and the dependence divides the sum of T-1 lag-1
// products by T-2.
struct FactorDiag {
    double time_variance = 0.0;
    double time_dependence = 0.0;
    double mix = 0.0; // time_variance + time_dependence
};

// Variation and dependence left in a residual panel. Dependence fields average
// absolute covariances over ordered pairs, dividing by T(T-1) across time
// columns and P(P-1) across series.
struct ResidualDiag {
    double time_variance = 0.0;
    double time_dependence = 0.0;
    double cross_variance = 0.0;
    double cross_dependence = 0.0;
};

FactorDiag factor_diag(const Eigen::VectorXd& factor);
ResidualDiag residual_diag(const Panel& residual);

// Optional cell restriction for fit_rmse; empty vectors mean "all".
struct CellSelection {
    std::vector<Eigen::Index> rows;
    std::vector<Eigen::Index> cols;
};

// Root mean squared elementwise error over the selected cells.
double fit_rmse(const Panel& actual, const Panel& fitted,
                const CellSelection& selection = {});

// Root mean squared forecast error: sqrt(sum of squared errors / (h * P)).
double frmse(const Eigen::MatrixXd& actual_tail, const Eigen::MatrixXd& forecast);

struct SplitFrmse {
    double overall = 0.0;
    double dependent = 0.0;
    double independent = 0.0;
};

// FRMSE split into dependent/independent row blocks; the two index sets must
// partition the rows.
SplitFrmse frmse_split(const Eigen::MatrixXd& actual_tail,
                       const Eigen::MatrixXd& forecast,
                       const std::vector<int>& dependent_rows,
                       const std::vector<int>& independent_rows);

// (mean squared deviation, mean absolute deviation).
std::pair<double, double> fmse_fmae(const std::vector<double>& estimates,
                                    const std::vector<double>& truths);

} // namespace fhfm
