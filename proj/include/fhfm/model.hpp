#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>
#include <vector>

#include "fhfm/arima.hpp"
#include "fhfm/linalg.hpp"
#include "fhfm/panel.hpp"

namespace fhfm {

// Two-step hierarchical factor fit configuration. Ranks left unset are chosen
// by the eigenvalue ratio criterion with cutoff R (default floor(min(P,T)/2)).
struct FhfmConfig {
    std::optional<int> r1;
    std::optional<int> r2;
    std::optional<int> R;
    bool difference_step1 = false;
    int lag = 1; // step-1 auto-covariance lag
    ArimaGrid arima_grid;
};

// Result of the two-step decomposition y_t - ybar = B K1[:,t] + A K2[:,t] + e_t
// with orthonormal loading columns.
struct FhfmFit {
    Eigen::VectorXd mean;        // ybar, length P
    Eigen::MatrixXd B;           // P x r1 step-1 loadings
    Eigen::MatrixXd K1;          // r1 x T step-1 factors
    Eigen::MatrixXd A;           // P x r2 step-2 loadings
    Eigen::MatrixXd K2;          // r2 x T step-2 factors
    Panel residual;              // P x T
    Eigen::VectorXd eigvals_step1;
    Eigen::VectorXd eigvals_step2;
    FhfmConfig config;

    int r1() const { return static_cast<int>(B.cols()); }
    int r2() const { return static_cast<int>(A.cols()); }
};

struct ForecastResult {
    int horizon = 0;
    Eigen::MatrixXd forecasts;        // P x horizon
    Eigen::MatrixXd factor_forecasts; // n_factors x horizon
    std::vector<ArimaModel> factor_models;
    std::vector<std::string> warnings;
    std::vector<int> col_labels; // periods T+1..T+h
};

// Ratio criterion: 1-based argmin over i = 1..R of lambda_{i+1}/lambda_i.
// Eigenvalues below 1e-12 * lambda_1 are floored before ratios are taken.
int select_rank(const Eigen::VectorXd& eigenvalues, int R);

// Default ratio-criterion cutoff for a P x T panel.
int default_rank_cutoff(Eigen::Index P, Eigen::Index T);

struct StepFit {
    Eigen::MatrixXd loadings; // P x r, orthonormal columns
    Eigen::MatrixXd factors;  // r x T, on levels
    Panel residual;           // P x T
    Eigen::VectorXd spectrum;
};

// Step 1: loadings from the lag-l auto-covariance product of the panel (or of
// its first differences when difference = true); factors are always computed
// on levels against the level mean.
StepFit fit_step1(const Panel& panel, std::optional<int> r1, bool difference,
                  std::optional<int> R, int lag = 1);

// Step 2: loadings from the covariance product of the step-1 residuals.
StepFit fit_step2(const Panel& residual, std::optional<int> r2, std::optional<int> R);

FhfmFit fit_fhfm(const Panel& panel, const FhfmConfig& config = {});

// ybar + B K1 + A K2; equals the input panel minus the residual exactly.
Panel reconstruct(const FhfmFit& fit);

// Forecast each factor series independently with BIC-selected ARIMA models and
// reassemble through the loadings. `threads` > 1 fits factors concurrently;
// results do not depend on the execution order.
ForecastResult forecast_fhfm(const FhfmFit& fit, int h, const ArimaGrid& grid = {},
                             int threads = 1);

} // namespace fhfm
