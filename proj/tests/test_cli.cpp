#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <sys/wait.h>
#include <unistd.h>

#include "fhfm/baselines.hpp"
#include "fhfm/metrics.hpp"
#include "fhfm/model.hpp"
#include "fhfm/panel.hpp"
#include "fhfm/simgen.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace fhfm;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("fhfm_cli_test_" + std::to_string(::getpid()) + "_" +
                std::to_string(counter()++));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    static int& counter() {
        static int n = 0;
        return n;
    }
};

int run_cli(const std::string& args) {
    const std::string cmd = std::string(FHFM_CLI_PATH) + " " + args + " 2>/dev/null";
    const int status = std::system(cmd.c_str());
    return WEXITSTATUS(status);
}

void write_file(const fs::path& p, const std::string& text) {
    std::ofstream out(p);
    out << text;
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace

TEST_CASE("simulate writes deterministic panel and truth files") {
    TempDir dir;
    write_file(dir.path / "config.json",
               R"({"example": 1, "P": 20, "T": 30, "seed": 7})");
    const std::string base = "simulate --config " + (dir.path / "config.json").string();
    REQUIRE(run_cli(base + " --out " + (dir.path / "a").string()) == 0);
    REQUIRE(run_cli(base + " --out " + (dir.path / "b").string()) == 0);
    CHECK(read_file(dir.path / "a" / "panel.csv") ==
          read_file(dir.path / "b" / "panel.csv"));
    CHECK(read_file(dir.path / "a" / "truth.json") ==
          read_file(dir.path / "b" / "truth.json"));
    // The panel reloads and matches the library generator.
    const Panel panel = Panel::read_csv_file((dir.path / "a" / "panel.csv").string());
    DgpSpec spec;
    spec.example_id = 1;
    spec.P = 20;
    spec.T = 30;
    spec.seed = 7;
    CHECK((panel.values() - generate(spec).panel.values()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("simulate rejects an unknown example id with exit 2") {
    TempDir dir;
    write_file(dir.path / "config.json", R"({"example": 9, "P": 10, "T": 20})");
    CHECK(run_cli("simulate --config " + (dir.path / "config.json").string() +
                  " --out " + dir.path.string()) == 2);
}

TEST_CASE("simulate writes the block split for design 5") {
    TempDir dir;
    write_file(dir.path / "config.json",
               R"({"example": 5, "P": 10, "T": 25, "d": 0.5, "seed": 3})");
    REQUIRE(run_cli("simulate --config " + (dir.path / "config.json").string() +
                    " --out " + dir.path.string()) == 0);
    const json truth = json::parse(read_file(dir.path / "truth.json"));
    CHECK(truth.at("dependent_rows").size() == 5);
    CHECK(truth.at("independent_rows").size() == 5);
}

TEST_CASE("fit writes per-method fit documents and an RMSE table") {
    TempDir dir;
    write_file(dir.path / "config.json", R"({
      "data": {"simulate": {"example": 1, "P": 15, "T": 40, "seed": 5}},
      "methods": [{"name": "fhfm", "r1": 1, "r2": 1},
                  {"name": "cpca", "r": 15}]
    })");
    REQUIRE(run_cli("fit --config " + (dir.path / "config.json").string() + " --out " +
                    dir.path.string()) == 0);
    CHECK(fs::exists(dir.path / "fit_fhfm.json"));
    CHECK(fs::exists(dir.path / "fit_cpca.json"));

    // Full-rank CPCA reconstructs exactly: every age row reports rmse 0.
    const std::string csv = read_file(dir.path / "rmse.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "section,label,fhfm,cpca");
    int age_rows = 0;
    while (std::getline(lines, line)) {
        if (line.rfind("age,", 0) != 0) continue;
        ++age_rows;
        const std::size_t last = line.rfind(',');
        CHECK(std::stod(line.substr(last + 1)) < 1e-10);
    }
    CHECK(age_rows == 15);
}

TEST_CASE("fit reports partial failure but keeps good outputs") {
    TempDir dir;
    // Second method requests an impossible rank budget.
    write_file(dir.path / "config.json", R"({
      "data": {"simulate": {"example": 1, "P": 10, "T": 30, "seed": 5}},
      "methods": [{"name": "fhfm", "r1": 1, "r2": 1},
                  {"name": "fhfm", "r1": 5, "r2": 5}]
    })");
    CHECK(run_cli("fit --config " + (dir.path / "config.json").string() + " --out " +
                  dir.path.string()) == 5);
    CHECK(fs::exists(dir.path / "fit_fhfm.json"));
    CHECK(fs::exists(dir.path / "rmse.csv"));
}

TEST_CASE("forecast writes panels with future period labels") {
    TempDir dir;
    write_file(dir.path / "config.json", R"({
      "data": {"simulate": {"example": 2, "P": 12, "T": 50, "seed": 9}},
      "methods": [{"name": "fhfm", "r1": 1, "r2": 1}, {"name": "individual"}],
      "horizon": 3
    })");
    REQUIRE(run_cli("forecast --config " + (dir.path / "config.json").string() +
                    " --out " + dir.path.string()) == 0);
    const Panel fc =
        Panel::read_csv_file((dir.path / "forecast_fhfm.csv").string());
    CHECK(fc.n_periods() == 3);
    CHECK(fc.col_labels() == std::vector<int>{51, 52, 53});
    CHECK(fs::exists(dir.path / "models_individual.json"));
}

TEST_CASE("evaluate with one window equals the direct pipeline") {
    TempDir dir;
    write_file(dir.path / "config.json", R"({
      "data": {"simulate": {"example": 1, "P": 10, "T": 40, "seed": 4}},
      "methods": [{"name": "cpca", "r": 1}],
      "rolling": {"test_start_year": 38, "n_windows": 1, "max_horizon": 3}
    })");
    REQUIRE(run_cli("evaluate --config " + (dir.path / "config.json").string() +
                    " --out " + dir.path.string()) == 0);
    const std::string csv = read_file(dir.path / "eval.csv");

    DgpSpec spec;
    spec.example_id = 1;
    spec.P = 10;
    spec.T = 40;
    spec.seed = 4;
    const Panel panel = generate(spec).panel;
    const Panel train = panel.slice_periods(1, 37);
    const ForecastResult fc = forecast_baseline(fit_cpca(train, 1, false, std::nullopt), 3);

    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "method,horizon,metric,value");
    int checked = 0;
    while (std::getline(lines, line)) {
        std::istringstream cells(line);
        std::string method, horizon, metric, value;
        std::getline(cells, method, ',');
        std::getline(cells, horizon, ',');
        std::getline(cells, metric, ',');
        std::getline(cells, value, ',');
        if (metric != "frmse") continue;
        const int h = std::stoi(horizon);
        const double direct = frmse(panel.values().col(36 + h), fc.forecasts.col(h - 1));
        CHECK(std::stod(value) == doctest::Approx(direct).epsilon(1e-9));
        ++checked;
    }
    CHECK(checked == 3);
}

TEST_CASE("missing config and bad usage return exit 2") {
    CHECK(run_cli("evaluate --config /nonexistent.json --out /tmp") == 3);
    CHECK(run_cli("unknown-subcommand") == 2);
    TempDir dir;
    write_file(dir.path / "bad.json", "{not json");
    CHECK(run_cli("fit --config " + (dir.path / "bad.json").string() + " --out " +
                  dir.path.string()) == 2);
    write_file(dir.path / "nomethods.json",
               R"({"data": {"simulate": {"example": 1, "P": 10, "T": 20}}, "methods": []})");
    CHECK(run_cli("fit --config " + (dir.path / "nomethods.json").string() + " --out " +
                  dir.path.string()) == 2);
}

TEST_CASE("actuarial on a no-forecast split reports zero error") {
    TempDir dir;
    // Synthetic mortality panel: 91 ages, constant small rates.
    Eigen::MatrixXd logs(91, 30);
    for (int i = 0; i < 91; ++i) logs.row(i).setConstant(-6.0 + 0.05 * i);
    std::vector<std::string> rows;
    for (int i = 0; i < 90; ++i) rows.push_back(std::to_string(i));
    rows.push_back("90+");
    std::vector<int> cols;
    for (int t = 0; t < 30; ++t) cols.push_back(1980 + t);
    Panel(logs, rows, cols).write_csv_file((dir.path / "panel.csv").string());

    write_file(dir.path / "config.json", R"({
      "data": {"panel_csv": ")" + (dir.path / "panel.csv").string() + R"("},
      "methods": [{"name": "lee_carter"}],
      "train_end_year": 2009,
      "age": 66
    })");
    REQUIRE(run_cli("actuarial --config " + (dir.path / "config.json").string() +
                    " --out " + dir.path.string()) == 0);
    const std::string csv = read_file(dir.path / "fmse_fmae.csv");
    std::istringstream lines(csv);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "method,application,n,fmse,fmae");
    int rows_seen = 0;
    while (std::getline(lines, line)) {
        ++rows_seen;
        const std::size_t last = line.rfind(',');
        const std::size_t prev = line.rfind(',', last - 1);
        CHECK(std::stod(line.substr(last + 1)) == doctest::Approx(0.0).epsilon(1e-12));
        CHECK(std::stod(line.substr(prev + 1, last - prev - 1)) ==
              doctest::Approx(0.0).epsilon(1e-12));
    }
    CHECK(rows_seen == 3);
}

TEST_CASE("actuarial hand-checked three-age toy") {
    TempDir dir;
    // Three ages, constant rates 0.1/0.2/0.3, no forecasting.
    Eigen::MatrixXd logs(3, 12);
    logs.row(0).setConstant(std::log(0.1));
    logs.row(1).setConstant(std::log(0.2));
    logs.row(2).setConstant(std::log(0.3));
    std::vector<int> cols;
    for (int t = 0; t < 12; ++t) cols.push_back(2000 + t);
    Panel(logs, {"0", "1", "2+"}, cols).write_csv_file((dir.path / "panel.csv").string());

    write_file(dir.path / "config.json", R"({
      "data": {"panel_csv": ")" + (dir.path / "panel.csv").string() + R"("},
      "methods": [{"name": "lee_carter"}],
      "train_end_year": 2011,
      "age": 0,
      "w": 3,
      "retirement_age": 1,
      "end_age": 2,
      "interest": 0.02,
      "selected": [[2005, 1]]
    })");
    REQUIRE(run_cli("actuarial --config " + (dir.path / "config.json").string() +
                    " --out " + dir.path.string()) == 0);
    const std::string sel = read_file(dir.path / "selected.csv");
    // PV at age 1 (retirement age): 0.8 / 1.02, exact.
    const std::string needle = "2005,1,annuity_pv,";
    const std::size_t at = sel.find(needle);
    REQUIRE(at != std::string::npos);
    std::istringstream rest(sel.substr(at + needle.size()));
    std::string truth;
    std::getline(rest, truth, ',');
    CHECK(std::stod(truth) == doctest::Approx(0.8 / 1.02).epsilon(1e-12));
}
