#include "fhfm/actuarial.hpp"

#include <cmath>
#include <string>

#include "fhfm/errors.hpp"

namespace fhfm {

MortalitySurface::MortalitySurface(Eigen::MatrixXd rates, int first_year,
                                   std::vector<YearProvenance> provenance)
    : rates_(std::move(rates)), first_year_(first_year),
      provenance_(std::move(provenance)) {
    if (rates_.rows() < 1 || rates_.cols() < 1)
        throw ConfigError("mortality surface must be non-empty");
    if (!rates_.allFinite() || (rates_.array() < 0.0).any())
        throw ConfigError("mortality rates must be finite and nonnegative");
    if (provenance_.size() != static_cast<std::size_t>(rates_.cols()))
        throw ConfigError("provenance flags must cover every year");
}

MortalitySurface MortalitySurface::from_log_panel(const Panel& log_rates) {
    return MortalitySurface(
        log_rates.values().array().exp().matrix(), log_rates.col_labels().front(),
        std::vector<YearProvenance>(log_rates.col_labels().size(),
                                    YearProvenance::Observed));
}

MortalitySurface MortalitySurface::splice(const Panel& historical_log,
                                          const Eigen::MatrixXd& forecast_log,
                                          int first_forecast_year) {
    if (forecast_log.rows() != historical_log.n_series())
        throw ConfigError("forecast rows must match the historical age grid");
    if (first_forecast_year != historical_log.col_labels().back() + 1)
        throw ConfigError("forecast years must continue the historical years");
    Eigen::MatrixXd rates(historical_log.n_series(),
                          historical_log.n_periods() + forecast_log.cols());
    rates.leftCols(historical_log.n_periods()) =
        historical_log.values().array().exp().matrix();
    rates.rightCols(forecast_log.cols()) = forecast_log.array().exp().matrix();
    std::vector<YearProvenance> prov(
        static_cast<std::size_t>(rates.cols()), YearProvenance::Observed);
    for (std::size_t j = static_cast<std::size_t>(historical_log.n_periods());
         j < prov.size(); ++j)
        prov[j] = YearProvenance::Forecast;
    return MortalitySurface(std::move(rates), historical_log.col_labels().front(),
                            std::move(prov));
}

double MortalitySurface::rate(int age, int year) const {
    if (age < 0 || age > age_max())
        throw CoverageError("age " + std::to_string(age) + " outside the surface grid");
    if (!has_year(year))
        throw CoverageError("year " + std::to_string(year) + " outside the surface grid");
    return rates_(age, year - first_year_);
}

YearProvenance MortalitySurface::provenance(int year) const {
    if (!has_year(year))
        throw CoverageError("year " + std::to_string(year) + " outside the surface grid");
    return provenance_[static_cast<std::size_t>(year - first_year_)];
}

namespace {

double death_prob(const MortalitySurface& surface, int age, int year,
                  RateHandling handling) {
    const double m = surface.rate(age, year);
    if (m > 1.0) {
        if (handling == RateHandling::Strict)
            throw NumericError("death rate above 1 at age " + std::to_string(age) +
                               ", year " + std::to_string(year));
        return 1.0;
    }
    return m;
}

} // namespace

double survival_prob(const MortalitySurface& surface, int age, int year, int t,
                     Basis basis, RateHandling handling) {
    if (t < 0) throw ConfigError("survival length must be nonnegative");
    if (age < 0) throw CoverageError("age must be nonnegative");
    if (age + t > surface.age_max() + 1)
        throw CoverageError("survival past the maximum age group");
    double p = 1.0;
    for (int j = 0; j < t; ++j) {
        const int y = basis == Basis::Cohort ? year + j : year;
        p *= 1.0 - death_prob(surface, age + j, y, handling);
    }
    return p;
}

double life_expectancy(const MortalitySurface& surface, int age, int year,
                       Basis basis, int max_age_w, RateHandling handling) {
    if (max_age_w > surface.age_max() + 2)
        throw ConfigError("maximum age w exceeds the surface age grid");
    if (max_age_w <= age) throw ConfigError("maximum age w must exceed the age");
    const int horizon = max_age_w - age - 1;
    if (basis == Basis::Cohort && horizon >= 1) {
        const int last_needed = year + horizon - 1;
        if (!surface.has_year(year) || !surface.has_year(last_needed))
            throw CoverageError("cohort life expectancy needs years " +
                                std::to_string(year) + ".." + std::to_string(last_needed));
    }
    double e = 0.0;
    double p = 1.0;
    for (int t = 1; t <= horizon; ++t) {
        const int j = t - 1;
        const int y = basis == Basis::Cohort ? year + j : year;
        p *= 1.0 - death_prob(surface, age + j, y, handling);
        e += p;
    }
    return e;
}

double annuity_pv(const MortalitySurface& surface, int age, int year,
                  const AnnuityTerms& terms, RateHandling handling) {
    if (terms.interest <= -1.0) throw ConfigError("interest rate must exceed -1");
    if (terms.retirement_age > terms.end_age)
        throw ConfigError("retirement age must not exceed the end age");
    if (age < terms.retirement_age) {
        const int defer = terms.retirement_age - age;
        return annuity_pv(surface, terms.retirement_age, year + defer, terms, handling) /
               std::pow(1.0 + terms.interest, defer);
    }
    double pv = 0.0;
    double p = 1.0;
    for (int t = 1; t <= terms.end_age - age; ++t) {
        const int j = t - 1;
        p *= 1.0 - death_prob(surface, age + j, year + j, handling);
        pv += p / std::pow(1.0 + terms.interest, t);
    }
    return pv * terms.payment;
}

} // namespace fhfm
