#include "fhfm/hmd.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fhfm/errors.hpp"

namespace fhfm {

namespace {

constexpr int kLadderTop = 110; // ages 0..109 plus "110+"

std::optional<double> parse_value(const std::string& token, std::size_t line_no) {
    if (token == ".") return std::nullopt;
    try {
        std::size_t pos = 0;
        const double v = std::stod(token, &pos);
        if (pos != token.size()) throw std::invalid_argument(token);
        if (v < 0.0)
            throw DataError("line " + std::to_string(line_no) + ": negative value");
        return v;
    } catch (const DataError&) {
        throw;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": cannot parse value '" +
                        token + "'");
    }
}

int age_from_label(const std::string& label, std::size_t line_no) {
    std::string digits = label;
    if (!digits.empty() && digits.back() == '+') digits.pop_back();
    try {
        std::size_t pos = 0;
        const int age = std::stoi(digits, &pos);
        if (pos != digits.size() || age < 0) throw std::invalid_argument(label);
        return age;
    } catch (const std::exception&) {
        throw DataError("line " + std::to_string(line_no) + ": bad age label '" +
                        label + "'");
    }
}

} // namespace

std::vector<int> HmdTable::years() const {
    std::vector<int> out;
    for (const HmdRecord& rec : records)
        if (out.empty() || out.back() != rec.year) out.push_back(rec.year);
    return out;
}

std::optional<double> HmdTable::value(int year, const std::string& age_label,
                                      HmdSex sex) const {
    for (const HmdRecord& rec : records) {
        if (rec.year != year || rec.age_label != age_label) continue;
        switch (sex) {
            case HmdSex::Female: return rec.female;
            case HmdSex::Male: return rec.male;
            case HmdSex::Total: return rec.total;
        }
    }
    return std::nullopt;
}

HmdTable parse_hmd(std::istream& in, HmdKind kind) {
    HmdTable table;
    table.kind = kind;
    std::string line;
    std::size_t line_no = 0;
    bool in_data = false;
    int current_year = -1;
    int expected_age = 0;

    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ss(line);
        std::string first;
        if (!(ss >> first)) continue; // blank line
        if (!in_data) {
            if (first == "Year") {
                in_data = true;
            }
            continue;
        }
        HmdRecord rec;
        std::string f, m, t;
        try {
            rec.year = std::stoi(first);
        } catch (const std::exception&) {
            throw DataError("line " + std::to_string(line_no) + ": bad year '" + first + "'");
        }
        if (!(ss >> rec.age_label >> f >> m >> t))
            throw DataError("line " + std::to_string(line_no) +
                            ": expected Year Age Female Male Total");
        std::string extra;
        if (ss >> extra)
            throw DataError("line " + std::to_string(line_no) + ": trailing token '" +
                            extra + "'");
        rec.female = parse_value(f, line_no);
        rec.male = parse_value(m, line_no);
        rec.total = parse_value(t, line_no);

        const int age = age_from_label(rec.age_label, line_no);
        if (rec.year != current_year) {
            if (current_year >= 0 && expected_age != kLadderTop + 1)
                throw DataError("year " + std::to_string(current_year) +
                                ": incomplete age ladder");
            current_year = rec.year;
            expected_age = 0;
        }
        if (age != expected_age)
            throw DataError("line " + std::to_string(line_no) + ": expected age " +
                            std::to_string(expected_age) + ", got '" + rec.age_label + "'");
        ++expected_age;
        table.records.push_back(std::move(rec));
    }
    if (!in_data) throw DataError("no 'Year ...' column header found");
    if (table.records.empty()) throw DataError("no data rows found");
    if (expected_age != kLadderTop + 1)
        throw DataError("year " + std::to_string(current_year) + ": incomplete age ladder");
    return table;
}

HmdTable parse_hmd_file(const std::string& path, HmdKind kind) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open HMD file '" + path + "'");
    return parse_hmd(in, kind);
}

namespace {

std::optional<double> record_value(const HmdRecord& rec, HmdSex sex) {
    switch (sex) {
        case HmdSex::Female: return rec.female;
        case HmdSex::Male: return rec.male;
        case HmdSex::Total: return rec.total;
    }
    return std::nullopt;
}

} // namespace

Panel build_log_panel(const HmdTable& mx, const HmdTable* deaths,
                      const HmdTable* exposures, const LogPanelOptions& options,
                      std::vector<std::string>* warnings) {
    if (options.first_year > options.last_year)
        throw ConfigError("first_year must not exceed last_year");
    if (options.age_cap < 1 || options.age_cap > kLadderTop)
        throw ConfigError("age_cap must lie in [1, 110]");
    const int n_years = options.last_year - options.first_year + 1;
    const int n_ages = options.age_cap + 1;

    // Index the tables: per year, values by age 0..110 in ladder order.
    auto index = [&](const HmdTable& table) {
        std::map<int, std::vector<std::optional<double>>> by_year;
        for (const HmdRecord& rec : table.records) {
            auto& ages = by_year[rec.year];
            if (ages.empty()) ages.resize(kLadderTop + 1);
            const int age = [&] {
                std::string digits = rec.age_label;
                if (!digits.empty() && digits.back() == '+') digits.pop_back();
                return std::stoi(digits);
            }();
            ages[static_cast<std::size_t>(age)] = record_value(rec, options.sex);
        }
        return by_year;
    };
    const auto mx_by_year = index(mx);
    std::map<int, std::vector<std::optional<double>>> d_by_year, e_by_year;
    const bool pooled_de = deaths != nullptr && exposures != nullptr;
    if (pooled_de) {
        d_by_year = index(*deaths);
        e_by_year = index(*exposures);
    } else if (warnings) {
        warnings->push_back("pooling " + std::to_string(options.age_cap) +
                            "+ as an exposure-free mean of rates; supply Deaths and "
                            "Exposures for the sum(D)/sum(E) aggregate");
    }

    Eigen::MatrixXd raw(n_ages, n_years);
    std::vector<std::vector<bool>> needs_fill(
        static_cast<std::size_t>(n_ages), std::vector<bool>(static_cast<std::size_t>(n_years), false));

    for (int year = options.first_year; year <= options.last_year; ++year) {
        const auto it = mx_by_year.find(year);
        if (it == mx_by_year.end())
            throw DataError("year " + std::to_string(year) + " missing from Mx table");
        const auto& ages = it->second;
        const int col = year - options.first_year;

        for (int age = 0; age < options.age_cap; ++age) {
            const auto v = ages[static_cast<std::size_t>(age)];
            if (!v || *v <= 0.0) {
                if (!options.fill_zero_rates)
                    throw DataError("zero or missing rate at age " + std::to_string(age) +
                                    ", year " + std::to_string(year) +
                                    " (enable fill_zero_rates to substitute)");
                needs_fill[static_cast<std::size_t>(age)][static_cast<std::size_t>(col)] = true;
                raw(age, col) = std::numeric_limits<double>::quiet_NaN();
            } else {
                raw(age, col) = *v;
            }
        }

        // Pooled open age group.
        double pooled = std::numeric_limits<double>::quiet_NaN();
        if (pooled_de) {
            const auto dit = d_by_year.find(year);
            const auto eit = e_by_year.find(year);
            if (dit == d_by_year.end() || eit == e_by_year.end())
                throw DataError("year " + std::to_string(year) +
                                " missing from Deaths/Exposures tables");
            double dsum = 0.0, esum = 0.0;
            for (int age = options.age_cap; age <= kLadderTop; ++age) {
                const auto dv = dit->second[static_cast<std::size_t>(age)];
                const auto ev = eit->second[static_cast<std::size_t>(age)];
                if (dv && ev) {
                    dsum += *dv;
                    esum += *ev;
                }
            }
            if (esum > 0.0) pooled = dsum / esum;
        } else {
            double sum = 0.0;
            int count = 0;
            for (int age = options.age_cap; age <= kLadderTop; ++age) {
                const auto v = ages[static_cast<std::size_t>(age)];
                if (v && *v > 0.0) {
                    sum += *v;
                    ++count;
                }
            }
            if (count > 0) pooled = sum / count;
        }
        if (!std::isfinite(pooled) || pooled <= 0.0) {
            if (!options.fill_zero_rates)
                throw DataError("cannot pool the " + std::to_string(options.age_cap) +
                                "+ group for year " + std::to_string(year));
            needs_fill[static_cast<std::size_t>(options.age_cap)][static_cast<std::size_t>(col)] = true;
        }
        raw(options.age_cap, col) = pooled;
    }

    // Fill policy: smallest positive rate observed for the age across years.
    for (int age = 0; age < n_ages; ++age) {
        bool any = false;
        for (int col = 0; col < n_years; ++col) any = any || needs_fill[static_cast<std::size_t>(age)][static_cast<std::size_t>(col)];
        if (!any) continue;
        double min_pos = std::numeric_limits<double>::infinity();
        for (int col = 0; col < n_years; ++col) {
            const double v = raw(age, col);
            if (std::isfinite(v) && v > 0.0) min_pos = std::min(min_pos, v);
        }
        if (!std::isfinite(min_pos))
            throw DataError("age " + std::to_string(age) +
                            ": no positive rate available to fill from");
        for (int col = 0; col < n_years; ++col) {
            if (needs_fill[static_cast<std::size_t>(age)][static_cast<std::size_t>(col)]) {
                raw(age, col) = min_pos;
                if (warnings)
                    warnings->push_back("filled age " + std::to_string(age) + ", year " +
                                        std::to_string(options.first_year + col) +
                                        " with the age minimum " + std::to_string(min_pos));
            }
        }
    }

    Eigen::MatrixXd values = raw.array().log().matrix();
    std::vector<std::string> row_labels;
    for (int age = 0; age < options.age_cap; ++age) row_labels.push_back(std::to_string(age));
    row_labels.push_back(std::to_string(options.age_cap) + "+");
    std::vector<int> col_labels(static_cast<std::size_t>(n_years));
    for (int j = 0; j < n_years; ++j) col_labels[static_cast<std::size_t>(j)] = options.first_year + j;
    return Panel(std::move(values), std::move(row_labels), std::move(col_labels));
}

} // namespace fhfm
