#include "fhfm/serde.hpp"

#include "fhfm/errors.hpp"
#include "fhfm/metrics.hpp"

namespace fhfm {

json to_json(const Eigen::MatrixXd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

json to_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
    return out;
}

Eigen::MatrixXd matrix_from_json(const json& j) {
    if (!j.is_array() || j.empty())
        throw DataError("expected a non-empty array of rows");
    const Eigen::Index rows = static_cast<Eigen::Index>(j.size());
    const Eigen::Index cols = static_cast<Eigen::Index>(j.at(0).size());
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index i = 0; i < rows; ++i) {
        const json& row = j.at(static_cast<std::size_t>(i));
        if (static_cast<Eigen::Index>(row.size()) != cols)
            throw DataError("ragged matrix rows in JSON");
        for (Eigen::Index c = 0; c < cols; ++c)
            m(i, c) = row.at(static_cast<std::size_t>(c)).get<double>();
    }
    return m;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i)
        v(i) = j.at(static_cast<std::size_t>(i)).get<double>();
    return v;
}

json to_json(const ArimaModel& model) {
    return json{{"p", model.orders.p},
                {"d", model.orders.d},
                {"q", model.orders.q},
                {"drift", model.orders.drift},
                {"ar", model.ar},
                {"ma", model.ma},
                {"mean", model.mean},
                {"sigma2", model.sigma2},
                {"loglik", model.loglik},
                {"bic", model.bic},
                {"n_obs", model.n_obs}};
}

ArimaModel arima_from_json(const json& j) {
    ArimaModel m;
    m.orders = ArimaOrders{j.at("p").get<int>(), j.at("d").get<int>(),
                           j.at("q").get<int>(), j.at("drift").get<bool>()};
    m.ar = j.at("ar").get<std::vector<double>>();
    m.ma = j.at("ma").get<std::vector<double>>();
    m.mean = j.at("mean").get<double>();
    m.sigma2 = j.at("sigma2").get<double>();
    m.loglik = j.at("loglik").get<double>();
    m.bic = j.at("bic").get<double>();
    m.n_obs = j.at("n_obs").get<int>();
    return m;
}

namespace {

json residual_summary(const Panel& residual) {
    const ResidualDiag diag = residual_diag(residual);
    return json{{"time_variance", diag.time_variance},
                {"time_dependence", diag.time_dependence},
                {"cross_variance", diag.cross_variance},
                {"cross_dependence", diag.cross_dependence},
                {"rmse", std::sqrt(residual.values().squaredNorm() /
                                   static_cast<double>(residual.values().size()))}};
}

void check_source(const json& j, const Panel& source) {
    if (j.at("n_series").get<Eigen::Index>() != source.n_series() ||
        j.at("n_periods").get<Eigen::Index>() != source.n_periods())
        throw DataError("fit document does not match the supplied panel shape");
}

} // namespace

json to_json(const FhfmFit& fit) {
    json cfg{{"difference_step1", fit.config.difference_step1}, {"lag", fit.config.lag}};
    if (fit.config.r1) cfg["r1"] = *fit.config.r1;
    if (fit.config.r2) cfg["r2"] = *fit.config.r2;
    if (fit.config.R) cfg["R"] = *fit.config.R;
    return json{{"method", "fhfm"},
                {"n_series", fit.residual.n_series()},
                {"n_periods", fit.residual.n_periods()},
                {"mean", to_json(fit.mean)},
                {"loadings_step1", to_json(fit.B)},
                {"factors_step1", to_json(fit.K1)},
                {"loadings_step2", to_json(fit.A)},
                {"factors_step2", to_json(fit.K2)},
                {"eigvals_step1", to_json(fit.eigvals_step1)},
                {"eigvals_step2", to_json(fit.eigvals_step2)},
                {"config", std::move(cfg)},
                {"residual_summary", residual_summary(fit.residual)}};
}

FhfmFit fhfm_fit_from_json(const json& j, const Panel& source) {
    if (j.at("method").get<std::string>() != "fhfm")
        throw DataError("expected an fhfm fit document");
    check_source(j, source);
    FhfmConfig cfg;
    const json& jc = j.at("config");
    cfg.difference_step1 = jc.at("difference_step1").get<bool>();
    cfg.lag = jc.at("lag").get<int>();
    if (jc.contains("r1")) cfg.r1 = jc.at("r1").get<int>();
    if (jc.contains("r2")) cfg.r2 = jc.at("r2").get<int>();
    if (jc.contains("R")) cfg.R = jc.at("R").get<int>();

    Eigen::VectorXd mean = vector_from_json(j.at("mean"));
    Eigen::MatrixXd B = matrix_from_json(j.at("loadings_step1"));
    Eigen::MatrixXd K1 = matrix_from_json(j.at("factors_step1"));
    Eigen::MatrixXd A = matrix_from_json(j.at("loadings_step2"));
    Eigen::MatrixXd K2 = matrix_from_json(j.at("factors_step2"));
    Eigen::MatrixXd centered = source.values().colwise() - mean;
    Panel residual = source.with_values(centered - B * K1 - A * K2);
    return FhfmFit{std::move(mean),
                   std::move(B),
                   std::move(K1),
                   std::move(A),
                   std::move(K2),
                   std::move(residual),
                   vector_from_json(j.at("eigvals_step1")),
                   vector_from_json(j.at("eigvals_step2")),
                   std::move(cfg)};
}

json to_json(const OneStagePcaFit& fit) {
    return json{{"method", fit.method == PcaMethod::Cpca ? "cpca" : "dpca"},
                {"n_series", fit.residual.n_series()},
                {"n_periods", fit.residual.n_periods()},
                {"ell0", fit.ell0},
                {"include_lag0", fit.include_lag0},
                {"difference", fit.difference},
                {"mean", to_json(fit.mean)},
                {"loadings", to_json(fit.loadings)},
                {"factors", to_json(fit.factors)},
                {"spectrum", to_json(fit.spectrum)},
                {"residual_summary", residual_summary(fit.residual)}};
}

OneStagePcaFit one_stage_fit_from_json(const json& j, const Panel& source) {
    check_source(j, source);
    OneStagePcaFit fit{PcaMethod::Cpca,
                       j.at("ell0").get<int>(),
                       j.at("include_lag0").get<bool>(),
                       j.at("difference").get<bool>(),
                       vector_from_json(j.at("mean")),
                       matrix_from_json(j.at("loadings")),
                       matrix_from_json(j.at("factors")),
                       source,
                       vector_from_json(j.at("spectrum"))};
    if (j.at("method").get<std::string>() == "dpca") fit.method = PcaMethod::Dpca;
    Eigen::MatrixXd centered = source.values().colwise() - fit.mean;
    fit.residual = source.with_values(centered - fit.loadings * fit.factors);
    return fit;
}

json to_json(const LeeCarterFit& fit) {
    return json{{"method", "lee_carter"},
                {"n_series", fit.residual.n_series()},
                {"n_periods", fit.residual.n_periods()},
                {"a_x", to_json(fit.a_x)},
                {"b_x", to_json(fit.b_x)},
                {"k_t", to_json(fit.k_t)},
                {"residual_summary", residual_summary(fit.residual)}};
}

LeeCarterFit lee_carter_fit_from_json(const json& j, const Panel& source) {
    if (j.at("method").get<std::string>() != "lee_carter")
        throw DataError("expected a lee_carter fit document");
    check_source(j, source);
    LeeCarterFit fit{vector_from_json(j.at("a_x")), vector_from_json(j.at("b_x")),
                     vector_from_json(j.at("k_t")), source};
    Eigen::MatrixXd centered = source.values().colwise() - fit.a_x;
    fit.residual = source.with_values(centered - fit.b_x * fit.k_t.transpose());
    return fit;
}

json to_json(const ForecastResult& result) {
    json models = json::array();
    for (const ArimaModel& m : result.factor_models) models.push_back(to_json(m));
    return json{{"horizon", result.horizon},
                {"forecasts", to_json(result.forecasts)},
                {"factor_forecasts", to_json(result.factor_forecasts)},
                {"factor_models", std::move(models)},
                {"warnings", result.warnings},
                {"col_labels", result.col_labels}};
}

json sim_truth_to_json(const SimOutput& sim) {
    return json{{"intercept", to_json(sim.intercept)},
                {"true_loadings", to_json(sim.true_loadings)},
                {"true_factors", to_json(sim.true_factors)},
                {"true_errors", to_json(sim.true_errors)},
                {"dependent_rows", sim.dependent_rows},
                {"independent_rows", sim.independent_rows}};
}

} // namespace fhfm
