#include "fhfm/panel.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <utility>

#include "fhfm/errors.hpp"

namespace fhfm {

namespace {

void validate(const Eigen::MatrixXd& values,
              const std::vector<std::string>& row_labels,
              const std::vector<int>& col_labels) {
    if (values.rows() < 1 || values.cols() < 2)
        throw ConfigError("panel requires at least 1 series and 2 periods");
    if (!values.allFinite())
        throw ConfigError("panel contains non-finite values");
    if (static_cast<Eigen::Index>(row_labels.size()) != values.rows())
        throw ConfigError("row label count does not match series count");
    if (static_cast<Eigen::Index>(col_labels.size()) != values.cols())
        throw ConfigError("column label count does not match period count");
    for (std::size_t t = 1; t < col_labels.size(); ++t)
        if (col_labels[t] <= col_labels[t - 1])
            throw ConfigError("column labels must be strictly increasing");
}

} // namespace

Panel::Panel(Eigen::MatrixXd values, std::vector<std::string> row_labels,
             std::vector<int> col_labels)
    : values_(std::move(values)),
      row_labels_(std::move(row_labels)),
      col_labels_(std::move(col_labels)) {
    validate(values_, row_labels_, col_labels_);
}

Panel Panel::unlabeled(Eigen::MatrixXd values, int first_period) {
    std::vector<std::string> rows(static_cast<std::size_t>(values.rows()));
    for (std::size_t i = 0; i < rows.size(); ++i)
        rows[i] = "s" + std::to_string(i + 1);
    std::vector<int> cols(static_cast<std::size_t>(values.cols()));
    for (std::size_t t = 0; t < cols.size(); ++t)
        cols[t] = first_period + static_cast<int>(t);
    return Panel(std::move(values), std::move(rows), std::move(cols));
}

Panel Panel::with_values(Eigen::MatrixXd values, std::vector<int> col_labels) const {
    return Panel(std::move(values), row_labels_, std::move(col_labels));
}

Panel Panel::with_values(Eigen::MatrixXd values) const {
    if (values.rows() != values_.rows() || values.cols() != values_.cols())
        throw ConfigError("replacement values must match panel shape");
    return Panel(std::move(values), row_labels_, col_labels_);
}

Panel Panel::slice_periods(int first_label, int last_label) const {
    Eigen::Index lo = -1, hi = -1;
    for (Eigen::Index t = 0; t < n_periods(); ++t) {
        if (col_labels_[static_cast<std::size_t>(t)] == first_label) lo = t;
        if (col_labels_[static_cast<std::size_t>(t)] == last_label) hi = t;
    }
    if (lo < 0 || hi < 0 || hi < lo)
        throw ConfigError("slice bounds not found among column labels");
    std::vector<int> cols(col_labels_.begin() + lo, col_labels_.begin() + hi + 1);
    return Panel(values_.middleCols(lo, hi - lo + 1), row_labels_, std::move(cols));
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::stringstream ss(line);
    while (std::getline(ss, cell, ',')) out.push_back(cell);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

double parse_cell(const std::string& cell, std::size_t line_no) {
    if (cell.empty() || cell == ".")
        throw DataError("line " + std::to_string(line_no) +
                        ": empty or missing cell in panel CSV");
    try {
        std::size_t pos = 0;
        double v = std::stod(cell, &pos);
        if (pos != cell.size()) throw std::invalid_argument(cell);
        return v;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) +
                        ": cannot parse numeric cell '" + cell + "'");
    }
}

} // namespace

Panel Panel::read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line))
        throw DataError("panel CSV is empty");
    auto header = split_csv_line(line);
    if (header.size() < 3)
        throw DataError("panel CSV header needs at least two time labels");
    std::vector<int> cols;
    for (std::size_t j = 1; j < header.size(); ++j) {
        try {
            cols.push_back(std::stoi(header[j]));
        } catch (const std::exception&) {
            throw DataError("header: time label '" + header[j] + "' is not an integer");
        }
    }
    std::vector<std::string> rows;
    std::vector<std::vector<double>> data;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto cells = split_csv_line(line);
        if (cells.size() != header.size())
            throw DataError("line " + std::to_string(line_no) + ": expected " +
                            std::to_string(header.size()) + " cells, got " +
                            std::to_string(cells.size()));
        rows.push_back(cells[0]);
        std::vector<double> vals(cells.size() - 1);
        for (std::size_t j = 1; j < cells.size(); ++j)
            vals[j - 1] = parse_cell(cells[j], line_no);
        data.push_back(std::move(vals));
    }
    if (data.empty()) throw DataError("panel CSV has no data rows");
    Eigen::MatrixXd values(static_cast<Eigen::Index>(data.size()),
                           static_cast<Eigen::Index>(cols.size()));
    for (Eigen::Index i = 0; i < values.rows(); ++i)
        for (Eigen::Index j = 0; j < values.cols(); ++j)
            values(i, j) = data[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    return Panel(std::move(values), std::move(rows), std::move(cols));
}

Panel Panel::read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open panel CSV '" + path + "'");
    return read_csv(in);
}

void Panel::write_csv(std::ostream& out) const {
    out << "series";
    for (int label : col_labels_) out << ',' << label;
    out << '\n';
    char buf[64];
    for (Eigen::Index i = 0; i < n_series(); ++i) {
        out << row_labels_[static_cast<std::size_t>(i)];
        for (Eigen::Index t = 0; t < n_periods(); ++t) {
            // Shortest representation that round-trips the double exactly.
            auto res = std::to_chars(buf, buf + sizeof(buf), values_(i, t));
            out << ',';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

void Panel::write_csv_file(const std::string& path) const {
    std::ofstream out(path);
    if (!out) throw DataError("cannot open '" + path + "' for writing");
    write_csv(out);
    if (!out) throw DataError("failed writing panel CSV '" + path + "'");
}

} // namespace fhfm
