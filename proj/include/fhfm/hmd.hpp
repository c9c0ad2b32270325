#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fhfm/panel.hpp"

namespace fhfm {

enum class HmdKind { Mx, Deaths, Exposures };
enum class HmdSex { Female, Male, Total };

// One row of an HMD period 1x1 file. Age labels run "0".."109","110+";
// missing cells ('.') stay unset.
struct HmdRecord {
    int year = 0;
    std::string age_label;
    std::optional<double> female;
    std::optional<double> male;
    std::optional<double> total;
};

struct HmdTable {
    HmdKind kind = HmdKind::Mx;
    std::vector<HmdRecord> records;

    std::vector<int> years() const;
    std::optional<double> value(int year, const std::string& age_label, HmdSex sex) const;
};

// Parse the whitespace-delimited HMD period 1x1 layout (header lines, then
// columns Year, Age, Female, Male, Total). Each year must carry the complete
// 0..110+ age ladder.
HmdTable parse_hmd(std::istream& in, HmdKind kind);
HmdTable parse_hmd_file(const std::string& path, HmdKind kind);

struct LogPanelOptions {
    HmdSex sex = HmdSex::Total;
    int first_year = 0;
    int last_year = 0;
    int age_cap = 90;
    // Replace zero/missing rates by the smallest positive rate seen for that
    // age across the requested years instead of failing.
    bool fill_zero_rates = false;
};

// Build the (age_cap+1) x n_years log death-rate panel: ages 0..age_cap-1
// straight from Mx, plus a pooled "age_cap+" row. Pooling uses
// sum(Deaths)/sum(Exposures) over the capped ages when both tables are given,
// otherwise the exposure-free mean of the available rates (with a warning).
Panel build_log_panel(const HmdTable& mx, const HmdTable* deaths,
                      const HmdTable* exposures, const LogPanelOptions& options,
                      std::vector<std::string>* warnings = nullptr);

} // namespace fhfm
