#include "fhfm/arima.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fhfm/errors.hpp"
#include "optim.hpp"

namespace fhfm {

namespace {

constexpr double kSigma2Floor = 1e-300;
constexpr double kPacfClamp = 0.98;

double mean_of(const std::vector<double>& x) {
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

// Conditional least-squares residuals with zero start-up: presample
// deviations and innovations are taken as zero, so every model's sum of
// squares covers all n observations and likelihoods stay comparable across
// grid cells.
double css_rss(const std::vector<double>& w, double mu,
               const std::vector<double>& ar, const std::vector<double>& ma,
               std::vector<double>* residuals = nullptr) {
    const int n = static_cast<int>(w.size());
    const int p = static_cast<int>(ar.size());
    const int q = static_cast<int>(ma.size());
    std::vector<double> e(static_cast<std::size_t>(n), 0.0);
    double rss = 0.0;
    for (int t = 0; t < n; ++t) {
        double v = w[static_cast<std::size_t>(t)] - mu;
        for (int i = 1; i <= p && t - i >= 0; ++i)
            v -= ar[static_cast<std::size_t>(i - 1)] *
                 (w[static_cast<std::size_t>(t - i)] - mu);
        for (int j = 1; j <= q && t - j >= 0; ++j)
            v -= ma[static_cast<std::size_t>(j - 1)] * e[static_cast<std::size_t>(t - j)];
        e[static_cast<std::size_t>(t)] = v;
        rss += v * v;
    }
    if (residuals) *residuals = std::move(e);
    return rss;
}

struct ParamMap {
    int p = 0, q = 0;
    bool drift = false;

    int size() const { return p + q + (drift ? 1 : 0); }

    void unpack(const Eigen::VectorXd& x, std::vector<double>& ar,
                std::vector<double>& ma, double& mu) const {
        std::vector<double> r(static_cast<std::size_t>(p));
        for (int i = 0; i < p; ++i) r[static_cast<std::size_t>(i)] = std::tanh(x(i));
        ar = pacf_to_ar(r);
        std::vector<double> s(static_cast<std::size_t>(q));
        for (int j = 0; j < q; ++j) s[static_cast<std::size_t>(j)] = std::tanh(x(p + j));
        const std::vector<double> inv = pacf_to_ar(s);
        ma.resize(static_cast<std::size_t>(q));
        for (int j = 0; j < q; ++j) ma[static_cast<std::size_t>(j)] = -inv[static_cast<std::size_t>(j)];
        mu = drift ? x(p + q) : 0.0;
    }
};

Eigen::VectorXd least_squares_start(const std::vector<double>& w, const ParamMap& map) {
    Eigen::VectorXd x0 = Eigen::VectorXd::Zero(map.size());
    const double mu0 = mean_of(w);
    if (map.drift) x0(map.p + map.q) = mu0;
    if (map.p > 0) {
        const int n = static_cast<int>(w.size());
        const int rows = n - map.p;
        if (rows > map.p + 1) {
            Eigen::MatrixXd X(rows, map.p);
            Eigen::VectorXd y(rows);
            for (int t = map.p; t < n; ++t) {
                y(t - map.p) = w[static_cast<std::size_t>(t)] - mu0;
                for (int i = 1; i <= map.p; ++i)
                    X(t - map.p, i - 1) = w[static_cast<std::size_t>(t - i)] - mu0;
            }
            Eigen::VectorXd beta = X.colPivHouseholderQr().solve(y);
            std::vector<double> ar(static_cast<std::size_t>(map.p));
            for (int i = 0; i < map.p; ++i) ar[static_cast<std::size_t>(i)] = beta(i);
            std::vector<double> r = ar_to_pacf(ar);
            for (int i = 0; i < map.p; ++i) {
                double ri = r[static_cast<std::size_t>(i)];
                if (!std::isfinite(ri)) ri = 0.0;
                ri = std::clamp(ri, -kPacfClamp, kPacfClamp);
                x0(i) = std::atanh(ri);
            }
        }
    }
    return x0;
}

} // namespace

std::vector<double> pacf_to_ar(const std::vector<double>& pacf) {
    std::vector<double> coeffs;
    for (std::size_t j = 0; j < pacf.size(); ++j) {
        std::vector<double> next(j + 1);
        next[j] = pacf[j];
        for (std::size_t i = 0; i < j; ++i)
            next[i] = coeffs[i] - pacf[j] * coeffs[j - 1 - i];
        coeffs = std::move(next);
    }
    return coeffs;
}

std::vector<double> ar_to_pacf(const std::vector<double>& ar) {
    std::vector<double> pacf(ar.size());
    std::vector<double> work = ar;
    for (std::size_t j = ar.size(); j-- > 0;) {
        const double r = work[j];
        pacf[j] = r;
        if (j == 0) break;
        std::vector<double> prev(j);
        const double denom = 1.0 - r * r;
        if (std::abs(denom) < 1e-14) {
            for (std::size_t i = 0; i < j; ++i) prev[i] = 0.0;
        } else {
            for (std::size_t i = 0; i < j; ++i)
                prev[i] = (work[i] + r * work[j - 1 - i]) / denom;
        }
        work = std::move(prev);
    }
    return pacf;
}

double min_ar_root_modulus(const std::vector<double>& coeffs) {
    const int p = static_cast<int>(coeffs.size());
    if (p == 0) return std::numeric_limits<double>::infinity();
    Eigen::MatrixXd companion = Eigen::MatrixXd::Zero(p, p);
    for (int j = 0; j < p; ++j) companion(0, j) = coeffs[static_cast<std::size_t>(j)];
    for (int i = 1; i < p; ++i) companion(i, i - 1) = 1.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(companion, false);
    const double lmax = solver.eigenvalues().cwiseAbs().maxCoeff();
    if (lmax <= 0.0) return std::numeric_limits<double>::infinity();
    return 1.0 / lmax;
}

std::vector<double> difference(const std::vector<double>& series, int d) {
    if (d < 0) throw ConfigError("differencing order must be nonnegative");
    if (static_cast<int>(series.size()) <= d)
        throw DataError("series too short to difference " + std::to_string(d) + " times");
    std::vector<double> w = series;
    for (int r = 0; r < d; ++r) {
        std::vector<double> next(w.size() - 1);
        for (std::size_t t = 0; t + 1 < w.size(); ++t) next[t] = w[t + 1] - w[t];
        w = std::move(next);
    }
    return w;
}

std::vector<double> integrate(const std::vector<double>& diffed, int d,
                              const std::vector<double>& initial) {
    if (d < 0) throw ConfigError("integration order must be nonnegative");
    if (static_cast<int>(initial.size()) < d)
        throw ConfigError("integration needs the first d values of the original series");
    std::vector<double> x = diffed;
    for (int level = d; level-- > 0;) {
        const std::vector<double> head(initial.begin(), initial.begin() + level + 1);
        const double first = difference(head, level).front();
        std::vector<double> next(x.size() + 1);
        next[0] = first;
        for (std::size_t t = 0; t < x.size(); ++t) next[t + 1] = next[t] + x[t];
        x = std::move(next);
    }
    return x;
}

ArimaModel fit_arima(const std::vector<double>& series, const ArimaOrders& orders) {
    if (orders.p < 0 || orders.d < 0 || orders.q < 0)
        throw ConfigError("ARIMA orders must be nonnegative");
    if (orders.drift && orders.d > 1)
        throw ConfigError("drift is only supported for d <= 1");
    const int T = static_cast<int>(series.size());
    if (T - orders.d <= orders.p + orders.q + 2)
        throw DataError("series too short for ARIMA(" + std::to_string(orders.p) + "," +
                        std::to_string(orders.d) + "," + std::to_string(orders.q) + ")");
    for (double v : series)
        if (!std::isfinite(v)) throw NumericError("series contains non-finite values");

    const std::vector<double> w = difference(series, orders.d);
    const int n = static_cast<int>(w.size());
    const int n_eff = n;

    ArimaModel model;
    model.orders = orders;
    model.n_obs = T;
    model.ar.assign(static_cast<std::size_t>(orders.p), 0.0);
    model.ma.assign(static_cast<std::size_t>(orders.q), 0.0);

    if (orders.p == 0 && orders.q == 0) {
        model.mean = orders.drift ? mean_of(w) : 0.0;
        double rss = 0.0;
        for (double v : w) rss += (v - model.mean) * (v - model.mean);
        model.sigma2 = std::max(rss / n_eff, kSigma2Floor);
    } else {
        const ParamMap map{orders.p, orders.q, orders.drift};
        auto objective = [&](const Eigen::VectorXd& x) {
            std::vector<double> ar, ma;
            double mu;
            map.unpack(x, ar, ma, mu);
            const double rss = css_rss(w, mu, ar, ma);
            if (!std::isfinite(rss)) return 1e30;
            return 0.5 * n_eff * std::log(std::max(rss / n_eff, kSigma2Floor));
        };

        detail::BfgsResult best = detail::minimize_bfgs(objective, least_squares_start(w, map));
        if (!best.converged) {
            Eigen::VectorXd zeros = Eigen::VectorXd::Zero(map.size());
            if (map.drift) zeros(map.p + map.q) = mean_of(w);
            detail::BfgsResult alt = detail::minimize_bfgs(objective, std::move(zeros));
            if (alt.converged && alt.fval <= best.fval) best = std::move(alt);
        }
        if (!best.converged)
            throw ConvergenceError("ARIMA CSS optimization hit the iteration cap");

        map.unpack(best.x, model.ar, model.ma, model.mean);
        const double rss = css_rss(w, model.mean, model.ar, model.ma);
        model.sigma2 = std::max(rss / n_eff, kSigma2Floor);
    }

    model.loglik = -0.5 * n_eff * (std::log(2.0 * M_PI * model.sigma2) + 1.0);
    const int k = orders.p + orders.q + (orders.drift ? 1 : 0) + 1;
    model.bic = -2.0 * model.loglik + k * std::log(static_cast<double>(n));
    return model;
}

ArimaModel auto_arima(const std::vector<double>& series, const ArimaGrid& grid) {
    if (grid.p_max < 0 || grid.d_max < 0 || grid.q_max < 0)
        throw ConfigError("invalid ARIMA grid");
    const int T = static_cast<int>(series.size());

    bool have_best = false;
    ArimaModel best;
    std::array<int, 4> best_key{};
    std::string last_error = "all grid cells too short";

    for (int d = 0; d <= grid.d_max; ++d) {
        for (int p = 0; p <= grid.p_max; ++p) {
            for (int q = 0; q <= grid.q_max; ++q) {
                for (int drift = 0; drift <= ((grid.allow_drift && d <= 1) ? 1 : 0); ++drift) {
                    if (T - d <= p + q + 2) continue;
                    ArimaModel m;
                    try {
                        m = fit_arima(series, ArimaOrders{p, d, q, drift != 0});
                    } catch (const NumericError& err) {
                        last_error = err.what();
                        continue;
                    } catch (const DataError& err) {
                        last_error = err.what();
                        continue;
                    }
                    const std::array<int, 4> key{p + q, d, p, drift};
                    const bool better =
                        !have_best || m.bic < best.bic - 1e-9 ||
                        (std::abs(m.bic - best.bic) <= 1e-9 && key < best_key);
                    if (better) {
                        best = std::move(m);
                        best_key = key;
                        have_best = true;
                    }
                }
            }
        }
    }
    if (!have_best)
        throw NumericError("auto_arima: no grid cell converged (" + last_error + ")");
    return best;
}

std::vector<double> forecast_arima(const ArimaModel& model,
                                   const std::vector<double>& series, int h) {
    if (h < 1) throw ConfigError("forecast horizon must be at least 1");
    const int d = model.orders.d;
    const int p = model.orders.p;
    const int q = model.orders.q;
    if (static_cast<int>(series.size()) < d + p + 1)
        throw DataError("series too short to forecast from");

    std::vector<double> w = difference(series, d);
    std::vector<double> resid;
    css_rss(w, model.mean, model.ar, model.ma, &resid);

    const int n = static_cast<int>(w.size());
    std::vector<double> wext = w;
    std::vector<double> eext = resid;
    wext.reserve(w.size() + static_cast<std::size_t>(h));
    eext.reserve(resid.size() + static_cast<std::size_t>(h));

    // Last value of each difference level 0..d-1, for integrating back.
    std::vector<double> lasts(static_cast<std::size_t>(d));
    {
        std::vector<double> level = series;
        for (int l = 0; l < d; ++l) {
            lasts[static_cast<std::size_t>(l)] = level.back();
            level = difference(level, 1);
        }
    }

    std::vector<double> out(static_cast<std::size_t>(h));
    for (int j = 1; j <= h; ++j) {
        const int t = n + j - 1;
        double v = model.mean;
        for (int i = 1; i <= p; ++i)
            v += model.ar[static_cast<std::size_t>(i - 1)] *
                 (wext[static_cast<std::size_t>(t - i)] - model.mean);
        for (int l = 1; l <= q && t - l >= 0; ++l) {
            if (t - l < n)
                v += model.ma[static_cast<std::size_t>(l - 1)] *
                     eext[static_cast<std::size_t>(t - l)];
        }
        wext.push_back(v);
        eext.push_back(0.0);
        double level = v;
        for (int l = d; l-- > 0;) {
            level = lasts[static_cast<std::size_t>(l)] + level;
            lasts[static_cast<std::size_t>(l)] = level;
        }
        out[static_cast<std::size_t>(j - 1)] = level;
    }
    return out;
}

} // namespace fhfm
