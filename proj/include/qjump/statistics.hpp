#ifndef QJUMP_STATISTICS_HPP
#define QJUMP_STATISTICS_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qjump/jump_process.hpp"

namespace qjump {

/// Empirical outcome frequencies against the snapshot probabilities.
struct FrequencyReport {
    std::size_t n = 0;                 // jumps counted
    std::vector<std::size_t> counts;   // per 1-based outcome
    std::vector<double> frequencies;
    std::vector<double> target;        // snapshot p_i
    double max_abs_deviation = 0.0;
    double chi_squared = 0.0;
    double p_value = 1.0;              // chi^2 with n-1 degrees of freedom
    bool low_expected_warning = false; // some expected count < 5

    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// Uniformity battery over a sequence of reals in [0,1).
struct UniformityReport {
    std::size_t n = 0;
    double ks_statistic = 0.0;     // one-sample KS vs uniform on [0,1)
    double serial_correlation = 0.0;
    bool serial_degenerate = false; // zero variance
    double monobit_ones_fraction = 0.0;
    double runs_z = 0.0;
    std::size_t bit_count = 0;      // bits fed to monobit/runs

    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// Requires a constant per-jump distribution; use frequency_reports for
/// trajectories whose distribution changes.
FrequencyReport frequency_report(const Trajectory& traj);

/// One report per maximal run-of-equal-distribution stratum, in order.
std::vector<FrequencyReport> frequency_reports(const Trajectory& traj);

FrequencyReport frequency_report(const std::vector<int>& outcomes,
                                 const DiscreteDistribution& target);

UniformityReport uniformity_report(std::span<const UnitReal> rs);

/// Regularized upper incomplete gamma Q(a, x) by series / continued fraction.
double gamma_q(double a, double x);

/// P(chi^2_df >= value).
double chi_squared_p_value(double value, std::size_t df);

/// Wald-Wolfowitz runs z-score over a binary sequence.
double runs_z_score(const std::vector<std::uint8_t>& bits);

/// Side-by-side battery for several drivers on one script.
struct DriverComparison {
    struct Row {
        std::string label;
        DriverKind kind;
        std::size_t jumps = 0;
        std::optional<std::size_t> exhausted_at;
        FrequencyReport frequency;
        UniformityReport uniformity;
    };
    std::vector<Row> rows;

    nlohmann::json to_json() const;
    std::string to_text() const;
    std::string to_csv() const;
};

DriverComparison compare_drivers(const std::vector<std::pair<std::string, DriverConfig>>& configs,
                                 const JumpScript& script, std::size_t n_jumps);

} // namespace qjump

#endif
