// Command-line driver: simulate panels, fit and compare factor models,
// run rolling-window forecast evaluations, and price mortality-linked
// quantities from the resulting forecasts.
#include <CLI11.hpp>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fhfm/actuarial.hpp"
#include "fhfm/baselines.hpp"
#include "fhfm/errors.hpp"
#include "fhfm/hmd.hpp"
#include "fhfm/metrics.hpp"
#include "fhfm/model.hpp"
#include "fhfm/serde.hpp"
#include "fhfm/simgen.hpp"

namespace fs = std::filesystem;
using fhfm::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;
constexpr int kExitPartial = 5;

json load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw fhfm::DataError("cannot open config '" + path + "'");
    try {
        return json::parse(in);
    } catch (const json::exception& err) {
        throw fhfm::ConfigError(std::string("config parse error: ") + err.what());
    }
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw fhfm::DataError("cannot open '" + path.string() + "' for writing");
    out << text;
    if (!out) throw fhfm::DataError("failed writing '" + path.string() + "'");
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

std::string format_value(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

fhfm::DgpSpec sim_spec_from(const json& j) {
    fhfm::DgpSpec spec;
    spec.example_id = j.at("example").get<int>();
    spec.P = j.at("P").get<int>();
    spec.T = j.at("T").get<int>();
    if (j.contains("d")) spec.d = j.at("d").get<double>();
    if (j.contains("seed")) spec.seed = j.at("seed").get<std::uint64_t>();
    return spec;
}

fhfm::ArimaGrid grid_from(const json& config) {
    fhfm::ArimaGrid grid;
    if (!config.contains("arima")) return grid;
    const json& j = config.at("arima");
    if (j.contains("p_max")) grid.p_max = j.at("p_max").get<int>();
    if (j.contains("d_max")) grid.d_max = j.at("d_max").get<int>();
    if (j.contains("q_max")) grid.q_max = j.at("q_max").get<int>();
    if (j.contains("allow_drift")) grid.allow_drift = j.at("allow_drift").get<bool>();
    return grid;
}

fhfm::Panel load_panel(const json& config, std::optional<std::uint64_t> seed_override) {
    if (!config.contains("data"))
        throw fhfm::ConfigError("config is missing the 'data' section");
    const json& data = config.at("data");
    if (data.contains("panel_csv"))
        return fhfm::Panel::read_csv_file(data.at("panel_csv").get<std::string>());
    if (data.contains("simulate")) {
        fhfm::DgpSpec spec = sim_spec_from(data.at("simulate"));
        if (seed_override) spec.seed = *seed_override;
        return fhfm::generate(spec).panel;
    }
    if (data.contains("hmd")) {
        const json& h = data.at("hmd");
        const fhfm::HmdTable mx =
            fhfm::parse_hmd_file(h.at("mx").get<std::string>(), fhfm::HmdKind::Mx);
        std::optional<fhfm::HmdTable> deaths, exposures;
        if (h.contains("deaths"))
            deaths = fhfm::parse_hmd_file(h.at("deaths").get<std::string>(),
                                          fhfm::HmdKind::Deaths);
        if (h.contains("exposures"))
            exposures = fhfm::parse_hmd_file(h.at("exposures").get<std::string>(),
                                             fhfm::HmdKind::Exposures);
        fhfm::LogPanelOptions opt;
        opt.first_year = h.at("first_year").get<int>();
        opt.last_year = h.at("last_year").get<int>();
        if (h.contains("age_cap")) opt.age_cap = h.at("age_cap").get<int>();
        if (h.contains("fill_zero_rates"))
            opt.fill_zero_rates = h.at("fill_zero_rates").get<bool>();
        if (h.contains("sex")) {
            const std::string sex = h.at("sex").get<std::string>();
            if (sex == "female") opt.sex = fhfm::HmdSex::Female;
            else if (sex == "male") opt.sex = fhfm::HmdSex::Male;
            else if (sex == "total") opt.sex = fhfm::HmdSex::Total;
            else throw fhfm::ConfigError("unknown sex '" + sex + "'");
        }
        std::vector<std::string> warnings;
        fhfm::Panel panel = fhfm::build_log_panel(
            mx, deaths ? &*deaths : nullptr, exposures ? &*exposures : nullptr, opt,
            &warnings);
        for (const std::string& w : warnings) std::cerr << "hmd: " << w << "\n";
        return panel;
    }
    throw fhfm::ConfigError("data section needs panel_csv, simulate, or hmd");
}

// One configured method: how to fit it and how to forecast h steps ahead.
struct Method {
    std::string name;
    json settings;

    static std::optional<int> opt_int(const json& j, const char* key) {
        if (j.contains(key)) return j.at(key).get<int>();
        return std::nullopt;
    }
    bool flag(const char* key, bool fallback = false) const {
        return settings.contains(key) ? settings.at(key).get<bool>() : fallback;
    }

    json fit_document(const fhfm::Panel& panel, fhfm::Panel* fitted) const {
        if (name == "fhfm") {
            fhfm::FhfmConfig cfg;
            cfg.r1 = opt_int(settings, "r1");
            cfg.r2 = opt_int(settings, "r2");
            cfg.R = opt_int(settings, "R");
            cfg.difference_step1 = flag("difference");
            if (settings.contains("lag")) cfg.lag = settings.at("lag").get<int>();
            const fhfm::FhfmFit fit = fhfm::fit_fhfm(panel, cfg);
            if (fitted) *fitted = fhfm::reconstruct(fit);
            return fhfm::to_json(fit);
        }
        if (name == "cpca" || name == "dpca") {
            const fhfm::OneStagePcaFit fit = fit_one_stage(panel);
            if (fitted) {
                Eigen::MatrixXd values = fit.loadings * fit.factors;
                values.colwise() += fit.mean;
                *fitted = panel.with_values(std::move(values));
            }
            return fhfm::to_json(fit);
        }
        if (name == "lee_carter") {
            const fhfm::LeeCarterFit fit = fhfm::fit_lee_carter(panel);
            if (fitted) {
                Eigen::MatrixXd values = fit.b_x * fit.k_t.transpose();
                values.colwise() += fit.a_x;
                *fitted = panel.with_values(std::move(values));
            }
            return fhfm::to_json(fit);
        }
        throw fhfm::ConfigError("method '" + name + "' has no fit output");
    }

    fhfm::OneStagePcaFit fit_one_stage(const fhfm::Panel& panel) const {
        const std::optional<int> r = opt_int(settings, "r");
        const std::optional<int> R = opt_int(settings, "R");
        const bool diff = flag("difference");
        if (name == "cpca") return fhfm::fit_cpca(panel, r, diff, R);
        const int ell0 = settings.contains("ell0") ? settings.at("ell0").get<int>() : 1;
        return fhfm::fit_dpca(panel, r, ell0, flag("include_lag0", true), diff, R);
    }

    fhfm::ForecastResult forecast(const fhfm::Panel& panel, int h,
                                  const fhfm::ArimaGrid& grid, int threads) const {
        if (name == "fhfm") {
            fhfm::FhfmConfig cfg;
            cfg.r1 = opt_int(settings, "r1");
            cfg.r2 = opt_int(settings, "r2");
            cfg.R = opt_int(settings, "R");
            cfg.difference_step1 = flag("difference");
            if (settings.contains("lag")) cfg.lag = settings.at("lag").get<int>();
            return fhfm::forecast_fhfm(fhfm::fit_fhfm(panel, cfg), h, grid, threads);
        }
        if (name == "cpca" || name == "dpca")
            return fhfm::forecast_baseline(fit_one_stage(panel), h, grid, threads);
        if (name == "lee_carter")
            return fhfm::forecast_baseline(fhfm::fit_lee_carter(panel), h, grid,
                                           flag("rw_drift")
                                               ? fhfm::LcForecast::RandomWalkDrift
                                               : fhfm::LcForecast::AutoArima);
        if (name == "individual")
            return fhfm::fit_forecast_individual(panel, h, grid, threads);
        throw fhfm::ConfigError("unknown method '" + name + "'");
    }
};

std::vector<Method> methods_from(const json& config) {
    if (!config.contains("methods") || !config.at("methods").is_array() ||
        config.at("methods").empty())
        throw fhfm::ConfigError("config needs a nonempty 'methods' array");
    std::vector<Method> out;
    for (const json& j : config.at("methods"))
        out.push_back(Method{j.at("name").get<std::string>(), j});
    return out;
}

int exit_code_for(const std::exception& err) {
    if (dynamic_cast<const fhfm::ConfigError*>(&err)) return kExitConfig;
    if (dynamic_cast<const fhfm::CoverageError*>(&err)) return kExitData;
    if (dynamic_cast<const fhfm::DataError*>(&err)) return kExitData;
    if (dynamic_cast<const fhfm::NumericError*>(&err)) return kExitNumeric;
    return kExitNumeric;
}

// ---------------------------------------------------------------- simulate

int cmd_simulate(const json& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed) {
    fhfm::DgpSpec spec = sim_spec_from(config);
    if (seed) spec.seed = *seed;
    const fhfm::SimOutput sim = fhfm::generate(spec);
    sim.panel.write_csv_file((out_dir / "panel.csv").string());
    json truth = fhfm::sim_truth_to_json(sim);
    truth["spec"] = json{{"example", spec.example_id},
                         {"P", spec.P},
                         {"T", spec.T},
                         {"d", spec.d},
                         {"seed", spec.seed}};
    write_json(out_dir / "truth.json", truth);
    return kExitOk;
}

// --------------------------------------------------------------------- fit

int cmd_fit(const json& config, const fs::path& out_dir,
            std::optional<std::uint64_t> seed) {
    const fhfm::Panel panel = load_panel(config, seed);
    const std::vector<Method> methods = methods_from(config);

    struct FitRow {
        std::string name;
        fhfm::Panel fitted;
    };
    std::vector<FitRow> fitted;
    std::vector<std::string> failures;
    std::ostringstream diag;
    diag << "method,metric,value\n";
    for (const Method& m : methods) {
        try {
            fhfm::Panel recon = panel;
            const json doc = m.fit_document(panel, &recon);
            write_json(out_dir / ("fit_" + m.name + ".json"), doc);

            // First-factor and residual diagnostics.
            const json& summary = doc.at("residual_summary");
            const json& factors = doc.contains("factors_step1") ? doc.at("factors_step1")
                                  : doc.contains("factors")     ? doc.at("factors")
                                                                : doc.at("k_t");
            Eigen::VectorXd first;
            if (factors.at(0).is_array())
                first = fhfm::matrix_from_json(factors).row(0).transpose();
            else
                first = fhfm::vector_from_json(factors);
            const fhfm::FactorDiag fd = fhfm::factor_diag(first);
            diag << m.name << ",factor_time_variance," << format_value(fd.time_variance)
                 << '\n'
                 << m.name << ",factor_time_dependence,"
                 << format_value(fd.time_dependence) << '\n'
                 << m.name << ",factor_mix," << format_value(fd.mix) << '\n';
            for (const char* key : {"time_variance", "time_dependence", "cross_variance",
                                    "cross_dependence"})
                diag << m.name << ",residual_" << key << ','
                     << format_value(summary.at(key).get<double>()) << '\n';

            fitted.push_back(FitRow{m.name, std::move(recon)});
        } catch (const std::exception& err) {
            failures.push_back(m.name + ": " + err.what());
            std::cerr << "fit " << m.name << " failed: " << err.what() << "\n";
        }
    }
    if (fitted.empty()) throw fhfm::NumericError("every method failed: " + failures.front());
    write_text(out_dir / "diagnostics.csv", diag.str());

    // RMSE table: one row per age, per year, plus the overall cell.
    std::ostringstream csv;
    csv << "section,label";
    for (const FitRow& f : fitted) csv << ',' << f.name;
    csv << '\n';
    for (Eigen::Index i = 0; i < panel.n_series(); ++i) {
        csv << "age," << panel.row_labels()[static_cast<std::size_t>(i)];
        for (const FitRow& f : fitted) {
            fhfm::CellSelection sel;
            sel.rows = {i};
            csv << ',' << format_value(fhfm::fit_rmse(panel, f.fitted, sel));
        }
        csv << '\n';
    }
    for (Eigen::Index t = 0; t < panel.n_periods(); ++t) {
        csv << "year," << panel.col_labels()[static_cast<std::size_t>(t)];
        for (const FitRow& f : fitted) {
            fhfm::CellSelection sel;
            sel.cols = {t};
            csv << ',' << format_value(fhfm::fit_rmse(panel, f.fitted, sel));
        }
        csv << '\n';
    }
    csv << "overall,";
    for (const FitRow& f : fitted) csv << ',' << format_value(fhfm::fit_rmse(panel, f.fitted));
    csv << '\n';
    write_text(out_dir / "rmse.csv", csv.str());
    return failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- forecast

int cmd_forecast(const json& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, int threads) {
    const fhfm::Panel panel = load_panel(config, seed);
    const std::vector<Method> methods = methods_from(config);
    const int h = config.at("horizon").get<int>();
    const fhfm::ArimaGrid grid = grid_from(config);

    int successes = 0;
    std::vector<std::string> failures;
    for (const Method& m : methods) {
        try {
            const fhfm::ForecastResult fc = m.forecast(panel, h, grid, threads);
            const fhfm::Panel out(fc.forecasts, panel.row_labels(), fc.col_labels);
            out.write_csv_file((out_dir / ("forecast_" + m.name + ".csv")).string());
            write_json(out_dir / ("models_" + m.name + ".json"), fhfm::to_json(fc));
            for (const std::string& w : fc.warnings)
                std::cerr << m.name << ": " << w << "\n";
            ++successes;
        } catch (const std::exception& err) {
            failures.push_back(m.name + ": " + err.what());
            std::cerr << "forecast " << m.name << " failed: " << err.what() << "\n";
        }
    }
    if (successes == 0) throw fhfm::NumericError("every method failed: " + failures.front());
    return failures.empty() ? kExitOk : kExitPartial;
}

// ---------------------------------------------------------------- evaluate

int cmd_evaluate(const json& config, const fs::path& out_dir,
                 std::optional<std::uint64_t> seed, int threads) {
    const fhfm::Panel panel = load_panel(config, seed);
    const std::vector<Method> methods = methods_from(config);
    const fhfm::ArimaGrid grid = grid_from(config);
    const json& rolling = config.at("rolling");
    const int test_start = rolling.at("test_start_year").get<int>();
    const int n_windows = rolling.at("n_windows").get<int>();
    const int max_h = rolling.at("max_horizon").get<int>();
    if (n_windows < 1 || max_h < 1)
        throw fhfm::ConfigError("rolling needs n_windows >= 1 and max_horizon >= 1");

    const std::vector<int>& years = panel.col_labels();
    const int first_year = years.front();
    const int last_year = years.back();
    if (test_start <= first_year || test_start > last_year)
        throw fhfm::ConfigError("test_start_year must fall inside the panel years");
    if (test_start + n_windows - 1 > last_year)
        throw fhfm::ConfigError("the last test window exceeds the panel years");
    if (test_start - first_year < 10)
        throw fhfm::DataError("fewer than 10 pre-test periods of history");

    const Eigen::Index P = panel.n_series();
    // errors[m][h-1] accumulates per-window squared-mean errors; counts track
    // how many windows reach that horizon inside the data.
    std::map<std::string, std::vector<double>> sums;
    std::map<std::string, std::vector<int>> counts;
    std::vector<std::string> failures;
    std::vector<std::string> ok_methods;

    for (const Method& m : methods) {
        sums[m.name].assign(static_cast<std::size_t>(max_h), 0.0);
        counts[m.name].assign(static_cast<std::size_t>(max_h), 0);
        bool failed = false;
        for (int w = 1; w <= n_windows && !failed; ++w) {
            const int test_year = test_start + w - 1;
            const fhfm::Panel train = panel.slice_periods(first_year, test_year - 1);
            try {
                const fhfm::ForecastResult fc = m.forecast(train, max_h, grid, threads);
                for (int h = 1; h <= max_h; ++h) {
                    const int target = test_year - 1 + h;
                    if (target > last_year) break;
                    const Eigen::Index col =
                        static_cast<Eigen::Index>(target - first_year);
                    const double err =
                        std::sqrt((panel.values().col(col) - fc.forecasts.col(h - 1))
                                      .squaredNorm() /
                                  static_cast<double>(P));
                    sums[m.name][static_cast<std::size_t>(h - 1)] += err;
                    counts[m.name][static_cast<std::size_t>(h - 1)] += 1;
                }
            } catch (const std::exception& err) {
                failures.push_back(m.name + ": " + err.what());
                std::cerr << "evaluate " << m.name << " window " << w
                          << " failed: " << err.what() << "\n";
                failed = true;
            }
        }
        if (!failed) ok_methods.push_back(m.name);
    }
    if (ok_methods.empty())
        throw fhfm::NumericError("every method failed: " + failures.front());

    std::ostringstream csv;
    csv << "method,horizon,metric,value\n";
    for (const std::string& name : ok_methods) {
        std::vector<double> values;
        for (int h = 1; h <= max_h; ++h) {
            const int n = counts[name][static_cast<std::size_t>(h - 1)];
            if (n == 0) continue;
            const double v = sums[name][static_cast<std::size_t>(h - 1)] / n;
            values.push_back(v);
            csv << name << ',' << h << ",frmse," << format_value(v) << '\n';
        }
        if (!values.empty()) {
            double mean = 0.0;
            for (double v : values) mean += v;
            mean /= static_cast<double>(values.size());
            std::vector<double> sorted = values;
            std::sort(sorted.begin(), sorted.end());
            const std::size_t n = sorted.size();
            const double median = n % 2 == 1
                                      ? sorted[n / 2]
                                      : 0.5 * (sorted[n / 2 - 1] + sorted[n / 2]);
            csv << name << ",0,frmse_mean," << format_value(mean) << '\n';
            csv << name << ",0,frmse_median," << format_value(median) << '\n';
        }
    }
    write_text(out_dir / "eval.csv", csv.str());
    return failures.empty() ? kExitOk : kExitPartial;
}

// --------------------------------------------------------------- actuarial

struct ActuarialSetup {
    fhfm::Panel full;
    fhfm::MortalitySurface truth;
    int train_end;
    int eval_age;
    int max_age_w;
    fhfm::AnnuityTerms terms;
};

// Years whose computation both is possible from observed data and, when
// `require_forecast`, touches at least one post-training year.
std::vector<int> eval_years(const ActuarialSetup& s, fhfm::Basis basis, bool annuity,
                            bool require_forecast) {
    const int first = s.full.col_labels().front();
    const int last = s.full.col_labels().back();
    const int span =
        annuity ? std::max(0, s.terms.end_age - s.eval_age - 1)
                : (basis == fhfm::Basis::Cohort ? std::max(0, s.max_age_w - s.eval_age - 2)
                                                : 0);
    std::vector<int> out;
    for (int year = first; year <= last; ++year) {
        if (year + span > last) continue;
        if (require_forecast && year + span <= s.train_end) continue;
        out.push_back(year);
    }
    return out;
}

int cmd_actuarial(const json& config, const fs::path& out_dir,
                  std::optional<std::uint64_t> seed, int threads) {
    const fhfm::Panel full = load_panel(config, seed);
    const std::vector<Method> methods = methods_from(config);
    const fhfm::ArimaGrid grid = grid_from(config);
    const int train_end = config.at("train_end_year").get<int>();
    const int last_year = full.col_labels().back();
    if (train_end > last_year || train_end < full.col_labels().front())
        throw fhfm::ConfigError("train_end_year must fall inside the panel years");
    const int horizon = last_year - train_end;

    ActuarialSetup setup{full, fhfm::MortalitySurface::from_log_panel(full), train_end,
                         config.contains("age") ? config.at("age").get<int>() : 66,
                         config.contains("w") ? config.at("w").get<int>() : 91,
                         fhfm::AnnuityTerms{}};
    if (config.contains("interest"))
        setup.terms.interest = config.at("interest").get<double>();
    if (config.contains("retirement_age"))
        setup.terms.retirement_age = config.at("retirement_age").get<int>();
    if (config.contains("end_age")) setup.terms.end_age = config.at("end_age").get<int>();

    const fhfm::Panel train = full.slice_periods(full.col_labels().front(), train_end);

    struct Surfaced {
        std::string name;
        fhfm::MortalitySurface surface;
    };
    std::vector<Surfaced> surfaces;
    std::vector<std::string> failures;
    for (const Method& m : methods) {
        try {
            if (horizon == 0) {
                surfaces.push_back(Surfaced{m.name, setup.truth});
                continue;
            }
            const fhfm::ForecastResult fc = m.forecast(train, horizon, grid, threads);
            surfaces.push_back(Surfaced{
                m.name, fhfm::MortalitySurface::splice(train, fc.forecasts, train_end + 1)});
        } catch (const std::exception& err) {
            failures.push_back(m.name + ": " + err.what());
            std::cerr << "actuarial " << m.name << " failed: " << err.what() << "\n";
        }
    }
    if (surfaces.empty())
        throw fhfm::NumericError("every method failed: " + failures.front());

    struct Application {
        std::string name;
        fhfm::Basis basis;
        bool annuity;
    };
    const std::vector<Application> apps{{"period_life_expectancy", fhfm::Basis::Period, false},
                                        {"cohort_life_expectancy", fhfm::Basis::Cohort, false},
                                        {"annuity_pv", fhfm::Basis::Cohort, true}};

    auto evaluate_one = [&](const fhfm::MortalitySurface& surface, const Application& app,
                            int year) {
        if (app.annuity) return fhfm::annuity_pv(surface, setup.eval_age, year, setup.terms);
        return fhfm::life_expectancy(surface, setup.eval_age, year, app.basis,
                                     setup.max_age_w);
    };

    std::ostringstream summary;
    summary << "method,application,n,fmse,fmae\n";
    for (const Surfaced& s : surfaces) {
        for (const Application& app : apps) {
            const std::vector<int> years =
                eval_years(setup, app.basis, app.annuity, horizon > 0);
            if (years.empty())
                throw fhfm::CoverageError("no evaluable years for " + app.name);
            std::vector<double> est, truth;
            for (int year : years) {
                truth.push_back(evaluate_one(setup.truth, app, year));
                est.push_back(evaluate_one(s.surface, app, year));
            }
            const auto [fmse, fmae] = fhfm::fmse_fmae(est, truth);
            summary << s.name << ',' << app.name << ',' << years.size() << ','
                    << format_value(fmse) << ',' << format_value(fmae) << '\n';
        }
    }
    write_text(out_dir / "fmse_fmae.csv", summary.str());

    // Selected (year, age) rows, * when the window never touches a forecast
    // or runs outside the data.
    if (config.contains("selected")) {
        std::ostringstream sel;
        sel << "year,age,application,true";
        for (const Surfaced& s : surfaces) sel << ',' << s.name;
        sel << '\n';
        for (const json& pair : config.at("selected")) {
            const int year = pair.at(0).get<int>();
            const int age = pair.at(1).get<int>();
            for (const Application& app : apps) {
                const int span =
                    app.annuity
                        ? std::max(0, setup.terms.end_age - age - 1)
                        : (app.basis == fhfm::Basis::Cohort
                               ? std::max(0, setup.max_age_w - age - 2)
                               : 0);
                sel << year << ',' << age << ',' << app.name;
                const bool computable = year + span <= last_year;
                const bool uses_forecast = horizon > 0 && year + span > train_end;
                if (!computable) {
                    sel << ",*";
                    for (std::size_t i = 0; i < surfaces.size(); ++i) sel << ",*";
                    sel << '\n';
                    continue;
                }
                auto value_on = [&](const fhfm::MortalitySurface& surf) {
                    if (app.annuity) return fhfm::annuity_pv(surf, age, year, setup.terms);
                    return fhfm::life_expectancy(surf, age, year, app.basis,
                                                 setup.max_age_w);
                };
                sel << ',' << format_value(value_on(setup.truth));
                for (const Surfaced& s : surfaces) {
                    if (!uses_forecast && horizon > 0)
                        sel << ",*";
                    else
                        sel << ',' << format_value(value_on(s.surface));
                }
                sel << '\n';
            }
        }
        write_text(out_dir / "selected.csv", sel.str());
    }
    return failures.empty() ? kExitOk : kExitPartial;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Hierarchical factor model forecasting toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    int threads = 1;

    auto add_common = [&](CLI::App* cmd, bool with_threads = true) {
        cmd->add_option("--config", config_path, "JSON experiment config")->required();
        cmd->add_option("--out", out_dir, "output directory");
        cmd->add_option("--seed", seed, "seed override for simulated data");
        if (with_threads) cmd->add_option("--threads", threads, "worker threads");
    };

    CLI::App* simulate = app.add_subcommand("simulate", "generate a simulated panel");
    add_common(simulate, false);
    CLI::App* fit = app.add_subcommand("fit", "fit methods and report fit RMSE tables");
    add_common(fit);
    CLI::App* forecast = app.add_subcommand("forecast", "fit and forecast h steps");
    add_common(forecast);
    CLI::App* evaluate =
        app.add_subcommand("evaluate", "rolling-window out-of-sample evaluation");
    add_common(evaluate);
    CLI::App* actuarial =
        app.add_subcommand("actuarial", "life expectancy and annuity pricing reports");
    add_common(actuarial);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        const json config = load_config(config_path);
        fs::create_directories(out_dir);
        const fs::path out(out_dir);
        if (simulate->parsed()) return cmd_simulate(config, out, seed);
        if (fit->parsed()) return cmd_fit(config, out, seed);
        if (forecast->parsed()) return cmd_forecast(config, out, seed, threads);
        if (evaluate->parsed()) return cmd_evaluate(config, out, seed, threads);
        if (actuarial->parsed()) return cmd_actuarial(config, out, seed, threads);
        return kExitConfig;
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return exit_code_for(err);
    }
}
