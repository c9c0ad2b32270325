#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <string>
#include <vector>

namespace fhfm {

// Labeled P x T data panel. Rows are series (e.g. ages), columns are time
// points with strictly increasing integer labels (e.g. years). Immutable
// after construction; all values must be finite.
class Panel {
public:
    Panel(Eigen::MatrixXd values, std::vector<std::string> row_labels,
          std::vector<int> col_labels);

    // Convenience: rows "s1".."sP", columns first_period..first_period+T-1.
    static Panel unlabeled(Eigen::MatrixXd values, int first_period = 1);

    const Eigen::MatrixXd& values() const { return values_; }
    Eigen::Index n_series() const { return values_.rows(); }
    Eigen::Index n_periods() const { return values_.cols(); }
    const std::vector<std::string>& row_labels() const { return row_labels_; }
    const std::vector<int>& col_labels() const { return col_labels_; }

    // Same row labels, caller-supplied values and column labels.
    Panel with_values(Eigen::MatrixXd values, std::vector<int> col_labels) const;
    // Same labels, replaced values (shape must match).
    Panel with_values(Eigen::MatrixXd values) const;

    // Column subset [first, last] by column label (inclusive).
    Panel slice_periods(int first_label, int last_label) const;

    // CSV layout: header "series,<t1>,...,<tT>", one row per series with its
    // label in the first cell. Empty cells and "." are rejected.
    static Panel read_csv(std::istream& in);
    static Panel read_csv_file(const std::string& path);
    void write_csv(std::ostream& out) const;
    void write_csv_file(const std::string& path) const;

private:
    Eigen::MatrixXd values_;
    std::vector<std::string> row_labels_;
    std::vector<int> col_labels_;
};

} // namespace fhfm
