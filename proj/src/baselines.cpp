#include "fhfm/baselines.hpp"

#include <cmath>
#include <future>
#include <string>

#include "fhfm/errors.hpp"
#include "fhfm/linalg.hpp"
#include "factor_forecast.hpp"

namespace fhfm {

namespace {

int resolve_cutoff(const Panel& panel, std::optional<int> R) {
    const int cutoff =
        R.value_or(default_rank_cutoff(panel.n_series(), panel.n_periods()));
    if (cutoff < 1 ||
        cutoff > static_cast<int>(std::min(panel.n_series(), panel.n_periods())) - 1)
        throw ConfigError("rank cutoff R must lie in [1, min(P,T)-1]");
    return cutoff;
}

OneStagePcaFit fit_one_stage(const Panel& panel, std::optional<int> r,
                             const std::vector<int>& lags, bool difference,
                             std::optional<int> R) {
    const int cutoff = resolve_cutoff(panel, R);
    const Panel* basis = &panel;
    std::optional<Panel> diffed;
    if (difference) {
        diffed.emplace(difference_panel(panel));
        basis = &*diffed;
    }
    Eigen::MatrixXd aggregate =
        Eigen::MatrixXd::Zero(panel.n_series(), panel.n_series());
    for (int lag : lags) {
        const Eigen::MatrixXd sigma = sample_autocov(*basis, lag).matrix;
        aggregate += sigma * sigma.transpose();
    }
    const EigenDecomp eig = sym_eigen_desc(aggregate);
    if (!(eig.eigenvalues(0) > 0.0))
        throw NumericError("degenerate spectrum (no signal)");
    const int rank = r ? *r : select_rank(eig.eigenvalues, cutoff);
    if (rank < 1 || rank > panel.n_series())
        throw ConfigError("rank must lie in [1, P]");

    Eigen::VectorXd mean = sample_mean(panel);
    Eigen::MatrixXd loadings = eig.eigenvectors.leftCols(rank);
    const Eigen::MatrixXd centered = panel.values().colwise() - mean;
    Eigen::MatrixXd factors = loadings.transpose() * centered;
    Panel residual = panel.with_values(centered - loadings * factors);
    return OneStagePcaFit{PcaMethod::Cpca,   0,
                          true,              difference,
                          std::move(mean),   std::move(loadings),
                          std::move(factors), std::move(residual),
                          eig.eigenvalues};
}

} // namespace

OneStagePcaFit fit_cpca(const Panel& panel, std::optional<int> r, bool difference,
                        std::optional<int> R) {
    OneStagePcaFit fit = fit_one_stage(panel, r, {0}, difference, R);
    fit.method = PcaMethod::Cpca;
    fit.ell0 = 0;
    fit.include_lag0 = true;
    return fit;
}

OneStagePcaFit fit_dpca(const Panel& panel, std::optional<int> r, int ell0,
                        bool include_lag0, bool difference, std::optional<int> R) {
    if (ell0 < 0) throw ConfigError("ell0 must be nonnegative");
    if (!include_lag0 && ell0 < 1)
        throw ConfigError("excluding lag 0 requires ell0 >= 1");
    std::vector<int> lags;
    for (int l = include_lag0 ? 0 : 1; l <= ell0; ++l) lags.push_back(l);
    OneStagePcaFit fit = fit_one_stage(panel, r, lags, difference, R);
    fit.method = PcaMethod::Dpca;
    fit.ell0 = ell0;
    fit.include_lag0 = include_lag0;
    return fit;
}

LeeCarterFit fit_lee_carter(const Panel& panel) {
    LeeCarterFit fit{Eigen::VectorXd(), Eigen::VectorXd(), Eigen::VectorXd(),
                     panel};
    fit.a_x = sample_mean(panel);
    const Eigen::MatrixXd centered = panel.values().colwise() - fit.a_x;
    const Eigen::Index T = panel.n_periods();
    const Eigen::MatrixXd sigma = centered * centered.transpose() / static_cast<double>(T);
    const EigenDecomp eig = sym_eigen_desc(sigma * sigma.transpose());
    if (!(eig.eigenvalues(0) > 0.0))
        throw NumericError("Lee-Carter: centered panel has no signal");
    const Eigen::VectorXd unit = eig.eigenvectors.col(0);
    const double scale = unit.sum();
    if (std::abs(scale) < 1e-12)
        throw NumericError("Lee-Carter: loading normalization is degenerate");
    const Eigen::VectorXd k_raw = unit.transpose() * centered;
    fit.b_x = unit / scale;
    fit.k_t = scale * k_raw;
    fit.residual = panel.with_values(centered - unit * k_raw.transpose());
    return fit;
}

ForecastResult forecast_baseline(const OneStagePcaFit& fit, int h,
                                 const ArimaGrid& grid, int threads) {
    if (h < 1) throw ConfigError("forecast horizon must be at least 1");
    ForecastResult result;
    result.horizon = h;
    detail::forecast_factors(fit.factors, h, grid, threads, result.factor_forecasts,
                             result.factor_models);
    result.forecasts = fit.loadings * result.factor_forecasts;
    result.forecasts.colwise() += fit.mean;
    result.col_labels = detail::future_labels(fit.residual.col_labels(), h);
    return result;
}

ForecastResult forecast_baseline(const LeeCarterFit& fit, int h,
                                 const ArimaGrid& grid, LcForecast mode) {
    if (h < 1) throw ConfigError("forecast horizon must be at least 1");
    const int T = static_cast<int>(fit.k_t.size());
    std::vector<double> series(fit.k_t.data(), fit.k_t.data() + T);

    ForecastResult result;
    result.horizon = h;
    result.factor_forecasts.resize(1, h);
    if (mode == LcForecast::RandomWalkDrift) {
        const double drift = (series.back() - series.front()) / (T - 1);
        for (int j = 1; j <= h; ++j)
            result.factor_forecasts(0, j - 1) = series.back() + drift * j;
    } else {
        Eigen::MatrixXd fc(1, h);
        Eigen::MatrixXd k_row = fit.k_t.transpose();
        detail::forecast_factors(k_row, h, grid, 1, fc, result.factor_models);
        result.factor_forecasts = fc;
    }
    result.forecasts = fit.b_x * result.factor_forecasts;
    result.forecasts.colwise() += fit.a_x;
    result.col_labels = detail::future_labels(fit.residual.col_labels(), h);
    return result;
}

ForecastResult fit_forecast_individual(const Panel& panel, int h,
                                       const ArimaGrid& grid, int threads) {
    if (h < 1) throw ConfigError("forecast horizon must be at least 1");
    const int P = static_cast<int>(panel.n_series());
    const int T = static_cast<int>(panel.n_periods());
    if (T < 10) throw DataError("individual ARIMA needs T >= 10");

    ForecastResult result;
    result.horizon = h;
    result.forecasts.resize(P, h);
    result.factor_models.resize(static_cast<std::size_t>(P));

    struct RowOutcome {
        std::vector<double> forecast;
        ArimaModel model;
        bool fallback = false;
        std::string message;
    };
    auto fit_row = [&](int i) {
        std::vector<double> series(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) series[static_cast<std::size_t>(t)] = panel.values()(i, t);
        RowOutcome out;
        try {
            out.model = auto_arima(series, grid);
            out.forecast = forecast_arima(out.model, series, h);
        } catch (const std::exception& err) {
            out.fallback = true;
            out.message = err.what();
            out.forecast.assign(static_cast<std::size_t>(h), series.back());
        }
        return out;
    };

    std::vector<RowOutcome> outcomes(static_cast<std::size_t>(P));
    if (threads > 1) {
        std::vector<std::future<RowOutcome>> futures;
        futures.reserve(static_cast<std::size_t>(P));
        for (int i = 0; i < P; ++i)
            futures.push_back(std::async(std::launch::async, fit_row, i));
        for (int i = 0; i < P; ++i) outcomes[static_cast<std::size_t>(i)] = futures[static_cast<std::size_t>(i)].get();
    } else {
        for (int i = 0; i < P; ++i) outcomes[static_cast<std::size_t>(i)] = fit_row(i);
    }

    for (int i = 0; i < P; ++i) {
        const RowOutcome& out = outcomes[static_cast<std::size_t>(i)];
        for (int j = 0; j < h; ++j) result.forecasts(i, j) = out.forecast[static_cast<std::size_t>(j)];
        result.factor_models[static_cast<std::size_t>(i)] = out.model;
        if (out.fallback)
            result.warnings.push_back("row " + panel.row_labels()[static_cast<std::size_t>(i)] +
                                      ": random-walk fallback (" + out.message + ")");
    }
    result.col_labels = detail::future_labels(panel.col_labels(), h);
    return result;
}

} // namespace fhfm
