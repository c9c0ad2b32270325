#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fhfm/arima.hpp"

namespace fhfm::detail {

// Fit/forecast a set of factor series independently, optionally in parallel.
// Output order matches input order regardless of scheduling.
void forecast_factors(const Eigen::MatrixXd& factors, int h, const ArimaGrid& grid,
                      int threads, Eigen::MatrixXd& out, std::vector<ArimaModel>& models);

// Period labels T+1..T+h continuing the panel's (regular) label spacing.
std::vector<int> future_labels(const std::vector<int>& col_labels, int h);

} // namespace fhfm::detail
