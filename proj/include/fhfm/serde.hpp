#pragma once

#include <json.hpp>

#include "fhfm/arima.hpp"
#include "fhfm/baselines.hpp"
#include "fhfm/model.hpp"
#include "fhfm/simgen.hpp"

namespace fhfm {

using json = nlohmann::json;

json to_json(const Eigen::MatrixXd& m);
json to_json(const Eigen::VectorXd& v);
Eigen::MatrixXd matrix_from_json(const json& j);
Eigen::VectorXd vector_from_json(const json& j);

json to_json(const ArimaModel& model);
ArimaModel arima_from_json(const json& j);

// Fit documents carry the mean, loadings, factors, spectra, config echo and a
// residual summary; the residual panel itself is rebuilt from the source
// panel on load via the exact decomposition identity.
json to_json(const FhfmFit& fit);
FhfmFit fhfm_fit_from_json(const json& j, const Panel& source);

json to_json(const OneStagePcaFit& fit);
OneStagePcaFit one_stage_fit_from_json(const json& j, const Panel& source);

json to_json(const LeeCarterFit& fit);
LeeCarterFit lee_carter_fit_from_json(const json& j, const Panel& source);

json to_json(const ForecastResult& result);

// Ground-truth sidecar for simulated panels.
json sim_truth_to_json(const SimOutput& sim);

} // namespace fhfm
