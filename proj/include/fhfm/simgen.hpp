#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "fhfm/panel.hpp"

namespace fhfm {

// Seeded simulation designs 1..6. Designs 1-3 share y_t = b k_t + a w_t + e_t
// with U(0,1) loadings, k_t ~ AR(1) 0.8 and error sd 0.2; they differ in w_t
// (iid N(0,1) / AR(1) 0.05 / AR(1) 0.2). Design 4 is a single unit-norm factor
// with an N(0,1) intercept and unit noise. Designs 5-6 split the series into a
// serially dependent block and an independent high-variance block, with `d`
// the dependent fraction.
struct DgpSpec {
    int example_id = 1;
    int P = 50;
    int T = 50;
    double d = 0.5; // dependent-part fraction, designs 5-6 only
    std::uint64_t seed = 0;
};

struct SimOutput {
    Panel panel;
    Eigen::VectorXd intercept;    // design 4's mean vector, else zero
    Eigen::MatrixXd true_loadings; // P x n_factors
    Eigen::MatrixXd true_factors;  // n_factors x T
    Eigen::MatrixXd true_errors;   // P x T
    std::vector<int> dependent_rows;   // designs 5-6
    std::vector<int> independent_rows; // designs 5-6
};

// panel = intercept * 1' + true_loadings * true_factors + true_errors, exact.
SimOutput generate(const DgpSpec& spec);

} // namespace fhfm
