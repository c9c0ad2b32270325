#pragma once

#include <Eigen/Dense>
#include <optional>

#include "fhfm/model.hpp"
#include "fhfm/panel.hpp"

namespace fhfm {

enum class PcaMethod { Cpca, Dpca };

// Single-stage PCA fit: loadings from the covariance product (CPCA) or from an
// aggregate of lagged auto-covariance products (DPCA); factors on levels.
struct OneStagePcaFit {
    PcaMethod method = PcaMethod::Cpca;
    int ell0 = 0;            // DPCA: largest lag in the aggregate
    bool include_lag0 = true; // DPCA: whether lag 0 enters the aggregate
    bool difference = false;
    Eigen::VectorXd mean;
    Eigen::MatrixXd loadings; // P x r, orthonormal columns
    Eigen::MatrixXd factors;  // r x T
    Panel residual;
    Eigen::VectorXd spectrum;

    int rank() const { return static_cast<int>(loadings.cols()); }
};

// Rank-1 log-rate model ln m_{x,t} = a_x + b_x k_t with the Lee-Carter
// normalization sum(b) = 1, sum(k) = 0.
struct LeeCarterFit {
    Eigen::VectorXd a_x;
    Eigen::VectorXd b_x;
    Eigen::VectorXd k_t;
    Panel residual;
};

// How the Lee-Carter index is extrapolated.
enum class LcForecast { AutoArima, RandomWalkDrift };

OneStagePcaFit fit_cpca(const Panel& panel, std::optional<int> r, bool difference,
                        std::optional<int> R);
OneStagePcaFit fit_dpca(const Panel& panel, std::optional<int> r, int ell0,
                        bool include_lag0, bool difference, std::optional<int> R);
LeeCarterFit fit_lee_carter(const Panel& panel);

ForecastResult forecast_baseline(const OneStagePcaFit& fit, int h,
                                 const ArimaGrid& grid = {}, int threads = 1);
ForecastResult forecast_baseline(const LeeCarterFit& fit, int h,
                                 const ArimaGrid& grid = {},
                                 LcForecast mode = LcForecast::AutoArima);

// One ARIMA per series, no dimension reduction. A series whose grid fails
// falls back to a random-walk (flat) forecast and is reported in warnings.
ForecastResult fit_forecast_individual(const Panel& panel, int h,
                                       const ArimaGrid& grid = {}, int threads = 1);

} // namespace fhfm
