#pragma once

#include <vector>

namespace fhfm {

// Order-selection grid for auto_arima. Drift is only tried when d <= 1.
struct ArimaGrid {
    int p_max = 3;
    int d_max = 2;
    int q_max = 3;
    bool allow_drift = true;
};

struct ArimaOrders {
    int p = 0;
    int d = 0;
    int q = 0;
    bool drift = false;
};

// Univariate ARIMA(p,d,q) with an optional mean/drift term on the
// d-times-differenced series, fitted by conditional-sum-of-squares Gaussian
// likelihood. AR and MA polynomials are kept stationary/invertible by
// optimizing in a partial-autocorrelation parameterization.
struct ArimaModel {
    ArimaOrders orders;
    std::vector<double> ar; // phi_1..phi_p
    std::vector<double> ma; // theta_1..theta_q
    double mean = 0.0;      // mean of the differenced process; drift when d = 1
    double sigma2 = 0.0;    // innovation variance
    double loglik = 0.0;
    double bic = 0.0;
    int n_obs = 0; // original series length
};

ArimaModel fit_arima(const std::vector<double>& series, const ArimaOrders& orders);

// Minimum-BIC model over the grid cells that converged. Ties break toward
// smaller p+q, then smaller d, then smaller p, then no drift.
ArimaModel auto_arima(const std::vector<double>& series, const ArimaGrid& grid = {});

// Recursive point forecasts with future innovations set to zero, integrated
// back through the d differences.
std::vector<double> forecast_arima(const ArimaModel& model,
                                   const std::vector<double>& series, int h);

// d-fold first differences (length shrinks by d).
std::vector<double> difference(const std::vector<double>& series, int d);
// Inverse of difference: `initial` holds the last d values of the undifferenced
// series (level first, then successively differenced tails).
std::vector<double> integrate(const std::vector<double>& diffed, int d,
                              const std::vector<double>& series);

// AR coefficients from partial autocorrelations (Durbin-Levinson) and back.
std::vector<double> pacf_to_ar(const std::vector<double>& pacf);
std::vector<double> ar_to_pacf(const std::vector<double>& ar);

// Largest root modulus check helpers used by validation and tests.
double min_ar_root_modulus(const std::vector<double>& coeffs);

} // namespace fhfm
