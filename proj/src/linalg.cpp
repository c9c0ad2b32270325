#include "fhfm/linalg.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>

#include "fhfm/errors.hpp"

namespace fhfm {

Eigen::VectorXd sample_mean(const Panel& panel) {
    return panel.values().rowwise().mean();
}

CovMatrix sample_autocov(const Panel& panel, int lag) {
    const Eigen::Index T = panel.n_periods();
    if (lag < 0) throw ConfigError("autocovariance lag must be nonnegative");
    if (lag >= T) throw ConfigError("autocovariance lag " + std::to_string(lag) +
                                    " must be below the panel length " + std::to_string(T));
    const Eigen::MatrixXd centered = panel.values().colwise() - sample_mean(panel);
    CovMatrix out;
    out.lag = lag;
    if (lag == 0) {
        out.matrix = centered * centered.transpose() / static_cast<double>(T);
    } else {
        out.matrix = centered.rightCols(T - lag) * centered.leftCols(T - lag).transpose() /
                     static_cast<double>(T - lag);
    }
    return out;
}

EigenDecomp sym_eigen_desc(const Eigen::MatrixXd& matrix) {
    if (matrix.rows() != matrix.cols())
        throw ConfigError("eigendecomposition requires a square matrix");
    if (!matrix.allFinite())
        throw NumericError("eigendecomposition input contains non-finite values");
    const double scale = matrix.cwiseAbs().maxCoeff();
    const double asym = (matrix - matrix.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-8 * std::max(scale, 1.0))
        throw ConfigError("matrix is not symmetric within tolerance");
    const Eigen::MatrixXd sym = 0.5 * (matrix + matrix.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success)
        throw ConvergenceError("symmetric eigensolver failed to converge");

    const Eigen::Index n = sym.rows();
    EigenDecomp out;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n, n);
    // Eigen returns ascending order; reverse to nonincreasing.
    for (Eigen::Index i = 0; i < n; ++i) {
        out.eigenvalues(i) = solver.eigenvalues()(n - 1 - i);
        out.eigenvectors.col(i) = solver.eigenvectors().col(n - 1 - i);
    }
    // Sign convention: the entry of largest absolute value is nonnegative,
    // ties broken by lowest index.
    for (Eigen::Index i = 0; i < n; ++i) {
        Eigen::Index arg = 0;
        double best = std::abs(out.eigenvectors(0, i));
        for (Eigen::Index r = 1; r < n; ++r) {
            const double a = std::abs(out.eigenvectors(r, i));
            if (a > best) {
                best = a;
                arg = r;
            }
        }
        if (out.eigenvectors(arg, i) < 0.0) out.eigenvectors.col(i) *= -1.0;
    }
    return out;
}

Panel difference_panel(const Panel& panel) {
    const Eigen::Index T = panel.n_periods();
    if (T < 3) throw DataError("differencing requires at least 3 periods");
    Eigen::MatrixXd diff =
        panel.values().rightCols(T - 1) - panel.values().leftCols(T - 1);
    std::vector<int> cols(panel.col_labels().begin() + 1, panel.col_labels().end());
    return panel.with_values(std::move(diff), std::move(cols));
}

} // namespace fhfm
