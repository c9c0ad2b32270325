#include "fhfm/simgen.hpp"

#include <cmath>

#include "fhfm/errors.hpp"
#include "fhfm/rng.hpp"

namespace fhfm {

namespace {

// Substream ids per component; the draw order within a stream is fixed.
enum Stream : std::uint64_t {
    kLoadingB = 0,
    kLoadingA = 1,
    kFactorK = 2,
    kFactorW = 3,
    kErrors = 4,
    kIntercept = 5,
};

Eigen::VectorXd ar1_series(Rng rng, int T, double phi, double innovation_sd) {
    Eigen::VectorXd x(T);
    x(0) = rng.normal() * innovation_sd / std::sqrt(1.0 - phi * phi);
    for (int t = 1; t < T; ++t) x(t) = phi * x(t - 1) + innovation_sd * rng.normal();
    return x;
}

Eigen::VectorXd iid_normal(Rng rng, int T, double sd) {
    Eigen::VectorXd x(T);
    for (int t = 0; t < T; ++t) x(t) = sd * rng.normal();
    return x;
}

Eigen::VectorXd uniform_vector(Rng rng, int n) {
    Eigen::VectorXd v(n);
    for (int i = 0; i < n; ++i) v(i) = rng.uniform();
    return v;
}

Eigen::MatrixXd normal_matrix(Rng rng, int rows, int cols, double sd) {
    Eigen::MatrixXd m(rows, cols);
    for (int j = 0; j < cols; ++j)
        for (int i = 0; i < rows; ++i) m(i, j) = sd * rng.normal();
    return m;
}

struct BlockedSpec {
    double phi_k;
    double sd_w;
    double sd_eps;
};

SimOutput generate_blocked(const DgpSpec& spec, const BlockedSpec& params) {
    if (!(spec.d > 0.0 && spec.d < 1.0))
        throw ConfigError("dependent fraction d must lie in (0,1)");
    const int P1 = static_cast<int>(std::lround(spec.d * spec.P));
    const int P2 = spec.P - P1;
    if (P1 < 1 || P2 < 1)
        throw ConfigError("dependent fraction leaves an empty block");

    Rng rng(spec.seed);
    const Eigen::VectorXd b = uniform_vector(rng.stream(kLoadingB), P1);
    const Eigen::VectorXd a = uniform_vector(rng.stream(kLoadingA), P2);
    const Eigen::VectorXd k = ar1_series(rng.stream(kFactorK), spec.T, params.phi_k, 1.0);
    const Eigen::VectorXd w = iid_normal(rng.stream(kFactorW), spec.T, params.sd_w);
    const Eigen::MatrixXd eps = normal_matrix(rng.stream(kErrors), spec.P, spec.T, params.sd_eps);

    Eigen::MatrixXd loadings = Eigen::MatrixXd::Zero(spec.P, 2);
    loadings.col(0).head(P1) = b;
    loadings.col(1).tail(P2) = a;
    Eigen::MatrixXd factors(2, spec.T);
    factors.row(0) = k.transpose();
    factors.row(1) = w.transpose();

    SimOutput out{Panel::unlabeled(loadings * factors + eps),
                  Eigen::VectorXd::Zero(spec.P),
                  std::move(loadings),
                  std::move(factors),
                  eps,
                  {},
                  {}};
    for (int i = 0; i < P1; ++i) out.dependent_rows.push_back(i);
    for (int i = P1; i < spec.P; ++i) out.independent_rows.push_back(i);
    return out;
}

} // namespace

SimOutput generate(const DgpSpec& spec) {
    if (spec.P < 2 || spec.T < 10)
        throw ConfigError("simulation requires P >= 2 and T >= 10");

    switch (spec.example_id) {
        case 1:
        case 2:
        case 3: {
            Rng rng(spec.seed);
            const Eigen::VectorXd b = uniform_vector(rng.stream(kLoadingB), spec.P);
            const Eigen::VectorXd a = uniform_vector(rng.stream(kLoadingA), spec.P);
            const Eigen::VectorXd k = ar1_series(rng.stream(kFactorK), spec.T, 0.8, 1.0);
            Eigen::VectorXd w;
            if (spec.example_id == 1)
                w = iid_normal(rng.stream(kFactorW), spec.T, 1.0);
            else
                w = ar1_series(rng.stream(kFactorW), spec.T,
                               spec.example_id == 2 ? 0.05 : 0.2, 1.0);
            const Eigen::MatrixXd eps =
                normal_matrix(rng.stream(kErrors), spec.P, spec.T, 0.2);

            Eigen::MatrixXd loadings(spec.P, 2);
            loadings.col(0) = b;
            loadings.col(1) = a;
            Eigen::MatrixXd factors(2, spec.T);
            factors.row(0) = k.transpose();
            factors.row(1) = w.transpose();
            return SimOutput{Panel::unlabeled(loadings * factors + eps),
                             Eigen::VectorXd::Zero(spec.P),
                             std::move(loadings),
                             std::move(factors),
                             eps,
                             {},
                             {}};
        }
        case 4: {
            Rng rng(spec.seed);
            Eigen::VectorXd intercept(spec.P);
            {
                Rng s = rng.stream(kIntercept);
                for (int i = 0; i < spec.P; ++i) intercept(i) = s.normal();
            }
            // Unit-norm loading: first column of the QR factor of a random
            // normal matrix.
            const Eigen::MatrixXd raw = normal_matrix(rng.stream(kLoadingB), spec.P, spec.P, 1.0);
            Eigen::MatrixXd q = Eigen::HouseholderQR<Eigen::MatrixXd>(raw).householderQ();
            Eigen::MatrixXd loadings = q.leftCols(1);
            const Eigen::VectorXd k = ar1_series(rng.stream(kFactorK), spec.T, 0.7, 1.0);
            const Eigen::MatrixXd eps = normal_matrix(rng.stream(kErrors), spec.P, spec.T, 1.0);

            Eigen::MatrixXd factors(1, spec.T);
            factors.row(0) = k.transpose();
            Eigen::MatrixXd values = loadings * factors + eps;
            values.colwise() += intercept;
            return SimOutput{Panel::unlabeled(std::move(values)),
                             std::move(intercept),
                             std::move(loadings),
                             std::move(factors),
                             eps,
                             {},
                             {}};
        }
        case 5:
            return generate_blocked(spec, BlockedSpec{0.8, 1.5, 0.2});
        case 6:
            return generate_blocked(spec, BlockedSpec{0.7, 3.0, 0.5});
        default:
            throw ConfigError("unknown simulation design id " +
                              std::to_string(spec.example_id));
    }
}

} // namespace fhfm
