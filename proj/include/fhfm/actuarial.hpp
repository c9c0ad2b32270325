#pragma once

#include <Eigen/Dense>
#include <vector>

#include "fhfm/panel.hpp"

namespace fhfm {

enum class Basis { Period, Cohort };
enum class YearProvenance { Observed, Forecast };

// Treatment of rates above 1 encountered in survival math. Strict raises an
// error; Clip caps the one-year death probability at 1.
enum class RateHandling { Strict, Clip };

// Death rates m_{x,t} on a complete age x year grid. Row age_max is the
// pooled open age group ("90+" for the US mortality panel). One-year death
// probabilities are taken as q = m directly.
class MortalitySurface {
public:
    MortalitySurface(Eigen::MatrixXd rates, int first_year,
                     std::vector<YearProvenance> provenance);

    // exp() of a log-rate panel; all years marked observed.
    static MortalitySurface from_log_panel(const Panel& log_rates);

    // Historical log-rate panel extended by forecast log-rate columns, with
    // forecast years flagged in the provenance.
    static MortalitySurface splice(const Panel& historical_log,
                                   const Eigen::MatrixXd& forecast_log,
                                   int first_forecast_year);

    int age_max() const { return static_cast<int>(rates_.rows()) - 1; }
    int first_year() const { return first_year_; }
    int last_year() const { return first_year_ + static_cast<int>(rates_.cols()) - 1; }
    bool has_year(int year) const { return year >= first_year() && year <= last_year(); }
    double rate(int age, int year) const;
    YearProvenance provenance(int year) const;

private:
    Eigen::MatrixXd rates_; // (age_max+1) x n_years
    int first_year_;
    std::vector<YearProvenance> provenance_;
};

struct AnnuityTerms {
    double interest = 0.02;
    int retirement_age = 66;
    int end_age = 90;
    double payment = 1.0;
};

// P(survive t more years) for an individual aged x in `year`: the product of
// one-year survivals read down the year column (period) or along the cohort
// diagonal (cohort).
double survival_prob(const MortalitySurface& surface, int age, int year, int t,
                     Basis basis, RateHandling handling = RateHandling::Strict);

// e_{x,T} = sum_{t=1}^{w-x-1} tp_{x,T} with maximum age w (default 91).
double life_expectancy(const MortalitySurface& surface, int age, int year,
                       Basis basis, int max_age_w = 91,
                       RateHandling handling = RateHandling::Strict);

// Present value per unit annual payment of a life annuity paying from
// retirement age to end_age on a cohort basis. For ages below retirement the
// deferred value is discounted without a survival factor.
double annuity_pv(const MortalitySurface& surface, int age, int year,
                  const AnnuityTerms& terms = {},
                  RateHandling handling = RateHandling::Strict);

} // namespace fhfm
