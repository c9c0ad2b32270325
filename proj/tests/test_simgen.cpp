#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "fhfm/errors.hpp"
#include "fhfm/metrics.hpp"
#include "fhfm/model.hpp"
#include "fhfm/simgen.hpp"

using namespace fhfm;

TEST_CASE("generation is deterministic in the seed") {
    DgpSpec spec;
    spec.example_id = 1;
    spec.P = 20;
    spec.T = 30;
    spec.seed = 42;
    const SimOutput a = generate(spec);
    const SimOutput b = generate(spec);
    CHECK((a.panel.values().array() == b.panel.values().array()).all());

    spec.seed = 43;
    const SimOutput c = generate(spec);
    CHECK((a.panel.values() - c.panel.values()).cwiseAbs().maxCoeff() > 1e-8);
}

TEST_CASE("reassembly identity is exact for every design") {
    for (int ex = 1; ex <= 6; ++ex) {
        DgpSpec spec;
        spec.example_id = ex;
        spec.P = 12;
        spec.T = 20;
        spec.d = 0.5;
        spec.seed = 77;
        const SimOutput sim = generate(spec);
        Eigen::MatrixXd rebuilt = sim.true_loadings * sim.true_factors + sim.true_errors;
        rebuilt.colwise() += sim.intercept;
        CHECK((sim.panel.values() - rebuilt).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("design 1 factor has the right serial correlation") {
    DgpSpec spec;
    spec.example_id = 1;
    spec.P = 100;
    spec.T = 5000;
    spec.seed = 5;
    const SimOutput sim = generate(spec);
    const Eigen::VectorXd k = sim.true_factors.row(0).transpose();
    const FactorDiag diag = factor_diag(k);
    const double rho = diag.time_dependence / diag.time_variance;
    CHECK(rho > 0.77);
    CHECK(rho < 0.83);
}

TEST_CASE("error variance matches the design scale") {
    DgpSpec spec;
    spec.example_id = 1;
    spec.P = 100;
    spec.T = 200;
    spec.seed = 8;
    const SimOutput sim = generate(spec);
    const double var =
        sim.true_errors.squaredNorm() / static_cast<double>(sim.true_errors.size());
    CHECK(var == doctest::Approx(0.04).epsilon(0.05));

    spec.example_id = 6;
    spec.d = 0.4;
    const SimOutput sim6 = generate(spec);
    const double var6 =
        sim6.true_errors.squaredNorm() / static_cast<double>(sim6.true_errors.size());
    CHECK(var6 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("blocked designs split the rows by the dependent fraction") {
    DgpSpec spec;
    spec.example_id = 5;
    spec.P = 10;
    spec.T = 25;
    spec.d = 0.43;
    spec.seed = 9;
    const SimOutput sim = generate(spec);
    CHECK(sim.dependent_rows.size() == 4); // round(0.43 * 10)
    CHECK(sim.independent_rows.size() == 6);
    // Loadings are block-structured.
    for (int i : sim.dependent_rows) CHECK(sim.true_loadings(i, 1) == 0.0);
    for (int i : sim.independent_rows) CHECK(sim.true_loadings(i, 0) == 0.0);
    // The independent block has no serial dependence by construction.
    const Eigen::VectorXd w = sim.true_factors.row(1).transpose();
    const FactorDiag diag = factor_diag(w);
    CHECK(std::abs(diag.time_dependence) / diag.time_variance < 0.5);
}

TEST_CASE("two-step residual variance on design 5 sits at the error scale") {
    // Design 5, d = 0.5, (100,100): the fitted residual time variance stays
    // near the 0.2^2 error variance (reference level about 0.039).
    const int n = 40;
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
        DgpSpec spec;
        spec.example_id = 5;
        spec.P = 100;
        spec.T = 100;
        spec.d = 0.5;
        spec.seed = 900 + static_cast<std::uint64_t>(i);
        FhfmConfig cfg;
        cfg.r1 = 1;
        cfg.r2 = 1;
        const FhfmFit fit = fit_fhfm(generate(spec).panel, cfg);
        acc += residual_diag(fit.residual).time_variance / n;
    }
    CHECK(acc > 0.033);
    CHECK(acc < 0.045);
}

TEST_CASE("design 4 has a unit-norm loading and an intercept") {
    DgpSpec spec;
    spec.example_id = 4;
    spec.P = 30;
    spec.T = 40;
    spec.seed = 10;
    const SimOutput sim = generate(spec);
    CHECK(sim.true_loadings.col(0).norm() == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sim.intercept.cwiseAbs().maxCoeff() > 0.1);
}

TEST_CASE("invalid specs are rejected") {
    DgpSpec spec;
    spec.example_id = 7;
    CHECK_THROWS_AS(generate(spec), ConfigError);
    spec.example_id = 5;
    spec.d = 0.0;
    CHECK_THROWS_AS(generate(spec), ConfigError);
    spec.d = 0.01;
    spec.P = 10;
    CHECK_THROWS_AS(generate(spec), ConfigError); // empty dependent block
    spec.example_id = 1;
    spec.P = 1;
    CHECK_THROWS_AS(generate(spec), ConfigError);
}
