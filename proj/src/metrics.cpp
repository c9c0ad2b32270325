#include "fhfm/metrics.hpp"

#include <cmath>
#include <unordered_set>

#include "fhfm/errors.hpp"

namespace fhfm {

FactorDiag factor_diag(const Eigen::VectorXd& factor) {
    const Eigen::Index T = factor.size();
    if (T < 3) throw ConfigError("factor diagnostics need T >= 3");
    const Eigen::VectorXd c = factor.array() - factor.mean();
    FactorDiag diag;
    diag.time_variance = c.squaredNorm() / static_cast<double>(T - 1);
    diag.time_dependence =
        c.head(T - 1).dot(c.tail(T - 1)) / static_cast<double>(T - 2);
    diag.mix = diag.time_variance + diag.time_dependence;
    return diag;
}

ResidualDiag residual_diag(const Panel& residual) {
    const Eigen::Index P = residual.n_series();
    const Eigen::Index T = residual.n_periods();
    if (P < 2 || T < 2) throw ConfigError("residual diagnostics need P >= 2 and T >= 2");
    const Eigen::MatrixXd& E = residual.values();

    // Centered per row (across time) and per column (across series).
    const Eigen::MatrixXd row_centered = E.colwise() - E.rowwise().mean().eval();
    const Eigen::MatrixXd col_centered = E.rowwise() - E.colwise().mean().eval();

    ResidualDiag diag;
    diag.time_variance =
        row_centered.squaredNorm() / static_cast<double>(P * (T - 1));
    diag.cross_variance =
        col_centered.squaredNorm() / static_cast<double>(T * (P - 1));

    const Eigen::MatrixXd time_cov =
        col_centered.transpose() * col_centered / static_cast<double>(P);
    double acc = time_cov.cwiseAbs().sum() - time_cov.diagonal().cwiseAbs().sum();
    diag.time_dependence = acc / static_cast<double>(T * (T - 1));

    const Eigen::MatrixXd cross_cov =
        row_centered * row_centered.transpose() / static_cast<double>(T);
    acc = cross_cov.cwiseAbs().sum() - cross_cov.diagonal().cwiseAbs().sum();
    diag.cross_dependence = acc / static_cast<double>(P * (P - 1));
    return diag;
}

double fit_rmse(const Panel& actual, const Panel& fitted, const CellSelection& selection) {
    if (actual.n_series() != fitted.n_series() ||
        actual.n_periods() != fitted.n_periods())
        throw ConfigError("fit_rmse: panel shapes differ");
    const Eigen::MatrixXd diff = actual.values() - fitted.values();

    std::vector<Eigen::Index> rows = selection.rows;
    std::vector<Eigen::Index> cols = selection.cols;
    if (rows.empty())
        for (Eigen::Index i = 0; i < diff.rows(); ++i) rows.push_back(i);
    if (cols.empty())
        for (Eigen::Index t = 0; t < diff.cols(); ++t) cols.push_back(t);
    double acc = 0.0;
    for (Eigen::Index i : rows) {
        if (i < 0 || i >= diff.rows()) throw ConfigError("fit_rmse: row index out of range");
        for (Eigen::Index t : cols) {
            if (t < 0 || t >= diff.cols()) throw ConfigError("fit_rmse: column index out of range");
            acc += diff(i, t) * diff(i, t);
        }
    }
    return std::sqrt(acc / (static_cast<double>(rows.size()) * static_cast<double>(cols.size())));
}

double frmse(const Eigen::MatrixXd& actual_tail, const Eigen::MatrixXd& forecast) {
    if (actual_tail.rows() != forecast.rows() || actual_tail.cols() != forecast.cols())
        throw ConfigError("frmse: shapes differ");
    const double hp = static_cast<double>(actual_tail.rows() * actual_tail.cols());
    return std::sqrt((actual_tail - forecast).squaredNorm() / hp);
}

SplitFrmse frmse_split(const Eigen::MatrixXd& actual_tail,
                       const Eigen::MatrixXd& forecast,
                       const std::vector<int>& dependent_rows,
                       const std::vector<int>& independent_rows) {
    if (actual_tail.rows() != forecast.rows() || actual_tail.cols() != forecast.cols())
        throw ConfigError("frmse_split: shapes differ");
    const Eigen::Index P = actual_tail.rows();
    std::unordered_set<int> seen;
    for (int i : dependent_rows) seen.insert(i);
    for (int i : independent_rows) seen.insert(i);
    if (static_cast<Eigen::Index>(seen.size()) != P ||
        static_cast<Eigen::Index>(dependent_rows.size() + independent_rows.size()) != P)
        throw ConfigError("frmse_split: row sets must partition the rows");

    const Eigen::MatrixXd sq = (actual_tail - forecast).array().square().matrix();
    const double h = static_cast<double>(actual_tail.cols());
    auto part = [&](const std::vector<int>& rows) {
        double acc = 0.0;
        for (int i : rows) {
            if (i < 0 || i >= P) throw ConfigError("frmse_split: row index out of range");
            acc += sq.row(i).sum();
        }
        return std::sqrt(acc / (h * static_cast<double>(rows.size())));
    };
    SplitFrmse out;
    out.overall = std::sqrt(sq.sum() / (h * static_cast<double>(P)));
    out.dependent = part(dependent_rows);
    out.independent = part(independent_rows);
    return out;
}

std::pair<double, double> fmse_fmae(const std::vector<double>& estimates,
                                    const std::vector<double>& truths) {
    if (estimates.size() != truths.size() || estimates.empty())
        throw ConfigError("fmse_fmae: inputs must have equal nonzero length");
    double sq = 0.0, abs = 0.0;
    for (std::size_t i = 0; i < estimates.size(); ++i) {
        const double d = estimates[i] - truths[i];
        sq += d * d;
        abs += std::abs(d);
    }
    const double n = static_cast<double>(estimates.size());
    return {sq / n, abs / n};
}

} // namespace fhfm
