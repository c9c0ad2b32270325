#include "fhfm/model.hpp"

#include <cmath>
#include <future>
#include <limits>
#include <string>

#include "fhfm/errors.hpp"
#include "factor_forecast.hpp"

namespace fhfm {

int default_rank_cutoff(Eigen::Index P, Eigen::Index T) {
    return static_cast<int>(std::min(P, T) / 2);
}

int select_rank(const Eigen::VectorXd& eigenvalues, int R) {
    if (R < 1) throw ConfigError("rank cutoff R must be at least 1");
    if (eigenvalues.size() < R + 1)
        throw ConfigError("rank selection needs at least R+1 eigenvalues");
    const double lead = eigenvalues(0);
    if (!(lead > 0.0)) throw NumericError("degenerate spectrum: leading eigenvalue is not positive");
    const double floor_value = 1e-12 * lead;
    int best = 1;
    double best_ratio = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= R; ++i) {
        const double hi = std::max(eigenvalues(i - 1), floor_value);
        const double lo = std::max(eigenvalues(i), floor_value);
        const double ratio = lo / hi;
        if (ratio < best_ratio) {
            best_ratio = ratio;
            best = i;
        }
    }
    return best;
}

namespace {

int resolve_cutoff(const Panel& panel, std::optional<int> R) {
    const Eigen::Index P = panel.n_series();
    const Eigen::Index T = panel.n_periods();
    const int cutoff = R.value_or(default_rank_cutoff(P, T));
    if (cutoff < 1 || cutoff > static_cast<int>(std::min(P, T)) - 1)
        throw ConfigError("rank cutoff R must lie in [1, min(P,T)-1]");
    return cutoff;
}

// Projects the (optionally pre-centered) panel on the leading eigenvectors of
// `source`. Step 2 passes center = false: the step-1 residual is already
// centered by construction and re-centering would break the exact
// decomposition identity.
StepFit project_step(const Panel& panel, const Eigen::MatrixXd& source,
                     std::optional<int> rank, int cutoff, bool center,
                     const char* step) {
    const Eigen::Index P = panel.n_series();
    const EigenDecomp eig = sym_eigen_desc(source);
    if (!(eig.eigenvalues(0) > 0.0))
        throw NumericError(std::string(step) + ": degenerate spectrum (no signal)");
    const int r = rank ? *rank : select_rank(eig.eigenvalues, cutoff);
    if (r < 1) throw ConfigError(std::string(step) + ": rank must be at least 1");
    if (r >= P) throw ConfigError(std::string(step) + ": rank must be below the panel dimension");

    Eigen::MatrixXd loadings = eig.eigenvectors.leftCols(r);
    Eigen::MatrixXd centered = panel.values();
    if (center) centered.colwise() -= sample_mean(panel).eval();
    Eigen::MatrixXd factors = loadings.transpose() * centered;
    Panel residual = panel.with_values(centered - loadings * factors);
    return StepFit{std::move(loadings), std::move(factors), std::move(residual),
                   eig.eigenvalues};
}

} // namespace

StepFit fit_step1(const Panel& panel, std::optional<int> r1, bool difference,
                  std::optional<int> R, int lag) {
    if (lag < 1) throw ConfigError("step 1 requires lag >= 1");
    const int cutoff = resolve_cutoff(panel, R);
    const Panel* basis = &panel;
    std::optional<Panel> diffed;
    if (difference) diffed.emplace(difference_panel(panel));
    if (difference) basis = &*diffed;
    const Eigen::MatrixXd sigma = sample_autocov(*basis, lag).matrix;
    return project_step(panel, sigma * sigma.transpose(), r1, cutoff, true, "step 1");
}

StepFit fit_step2(const Panel& residual, std::optional<int> r2, std::optional<int> R) {
    const int cutoff = resolve_cutoff(residual, R);
    const Eigen::MatrixXd sigma = sample_autocov(residual, 0).matrix;
    return project_step(residual, sigma * sigma.transpose(), r2, cutoff, false, "step 2");
}

FhfmFit fit_fhfm(const Panel& panel, const FhfmConfig& config) {
    const Eigen::Index P = panel.n_series();
    if (config.r1 && *config.r1 < 1) throw ConfigError("r1 must be at least 1");
    if (config.r2 && *config.r2 < 1) throw ConfigError("r2 must be at least 1");
    if (config.r1 && config.r2 && *config.r1 + *config.r2 >= P)
        throw ConfigError("rank budget exceeded: r1 + r2 must be below P");

    StepFit s1 = fit_step1(panel, config.r1, config.difference_step1, config.R, config.lag);
    StepFit s2 = fit_step2(s1.residual, config.r2, config.R);
    if (s1.loadings.cols() + s2.loadings.cols() >= P)
        throw ConfigError("rank budget exceeded: selected r1 + r2 must be below P");

    FhfmFit fit{sample_mean(panel),
                std::move(s1.loadings),
                std::move(s1.factors),
                std::move(s2.loadings),
                std::move(s2.factors),
                std::move(s2.residual),
                std::move(s1.spectrum),
                std::move(s2.spectrum),
                config};
    return fit;
}

Panel reconstruct(const FhfmFit& fit) {
    Eigen::MatrixXd values = fit.B * fit.K1 + fit.A * fit.K2;
    values.colwise() += fit.mean;
    return fit.residual.with_values(std::move(values));
}

namespace detail {

void forecast_factors(const Eigen::MatrixXd& factors, int h, const ArimaGrid& grid,
                      int threads, Eigen::MatrixXd& out,
                      std::vector<ArimaModel>& models) {
    const int n = static_cast<int>(factors.rows());
    const int T = static_cast<int>(factors.cols());
    if (T < 10) throw DataError("factor series too short for ARIMA selection (need T >= 10)");
    out.resize(n, h);
    models.resize(static_cast<std::size_t>(n));

    auto fit_one = [&](int i) {
        std::vector<double> series(static_cast<std::size_t>(T));
        for (int t = 0; t < T; ++t) series[static_cast<std::size_t>(t)] = factors(i, t);
        ArimaModel model;
        try {
            model = auto_arima(series, grid);
        } catch (const NumericError& err) {
            throw NumericError("factor " + std::to_string(i + 1) + ": " + err.what());
        }
        const std::vector<double> fc = forecast_arima(model, series, h);
        return std::make_pair(std::move(model), std::move(fc));
    };

    if (threads > 1 && n > 1) {
        std::vector<std::future<std::pair<ArimaModel, std::vector<double>>>> futures;
        futures.reserve(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i)
            futures.push_back(std::async(std::launch::async, fit_one, i));
        for (int i = 0; i < n; ++i) {
            auto [model, fc] = futures[static_cast<std::size_t>(i)].get();
            models[static_cast<std::size_t>(i)] = std::move(model);
            for (int j = 0; j < h; ++j) out(i, j) = fc[static_cast<std::size_t>(j)];
        }
    } else {
        for (int i = 0; i < n; ++i) {
            auto [model, fc] = fit_one(i);
            models[static_cast<std::size_t>(i)] = std::move(model);
            for (int j = 0; j < h; ++j) out(i, j) = fc[static_cast<std::size_t>(j)];
        }
    }
}

std::vector<int> future_labels(const std::vector<int>& col_labels, int h) {
    std::vector<int> out(static_cast<std::size_t>(h));
    const int last = col_labels.back();
    const int step = col_labels.size() > 1
                         ? col_labels[col_labels.size() - 1] - col_labels[col_labels.size() - 2]
                         : 1;
    for (int j = 0; j < h; ++j) out[static_cast<std::size_t>(j)] = last + step * (j + 1);
    return out;
}

} // namespace detail

ForecastResult forecast_fhfm(const FhfmFit& fit, int h, const ArimaGrid& grid, int threads) {
    if (h < 1) throw ConfigError("forecast horizon must be at least 1");
    const int r1 = fit.r1();
    const int r2 = fit.r2();
    Eigen::MatrixXd stacked(r1 + r2, fit.K1.cols());
    stacked.topRows(r1) = fit.K1;
    stacked.bottomRows(r2) = fit.K2;

    ForecastResult result;
    result.horizon = h;
    detail::forecast_factors(stacked, h, grid, threads, result.factor_forecasts,
                             result.factor_models);
    result.forecasts = fit.B * result.factor_forecasts.topRows(r1) +
                       fit.A * result.factor_forecasts.bottomRows(r2);
    result.forecasts.colwise() += fit.mean;
    result.col_labels = detail::future_labels(fit.residual.col_labels(), h);
    return result;
}

} // namespace fhfm
