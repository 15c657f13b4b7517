#include "qjump/statistics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <nlohmann/json.hpp>

namespace qjump {

double gamma_q(double a, double x) {
    if (a <= 0.0 || x < 0.0) throw DomainError("gamma_q: need a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    if (x < a + 1.0) {
        // Series for P(a, x); Q = 1 - P.
        double ap = a;
        double sum = 1.0 / a;
        double del = sum;
        for (int i = 0; i < 1000; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::abs(del) < std::abs(sum) * 1e-16) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
        return std::clamp(1.0 - p, 0.0, 1.0);
    }
    // Lentz continued fraction for Q(a, x).
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 1000; ++i) {
        double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    double q = std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
    return std::clamp(q, 0.0, 1.0);
}

double chi_squared_p_value(double value, std::size_t df) {
    if (df == 0) throw DomainError("chi_squared_p_value: zero degrees of freedom");
    if (std::isinf(value)) return 0.0;
    return gamma_q(static_cast<double>(df) / 2.0, value / 2.0);
}

double runs_z_score(const std::vector<std::uint8_t>& bits) {
    std::size_t n = bits.size();
    if (n < 2) throw DomainError("runs_z_score: need at least two bits");
    std::size_t ones = 0, runs = 1;
    for (std::size_t i = 0; i < n; ++i) {
        if (bits[i]) ++ones;
        if (i > 0 && bits[i] != bits[i - 1]) ++runs;
    }
    std::size_t zeros = n - ones;
    if (ones == 0 || zeros == 0) return 0.0;
    double n1 = static_cast<double>(ones), n0 = static_cast<double>(zeros);
    double nn = static_cast<double>(n);
    double expected = 2.0 * n1 * n0 / nn + 1.0;
    double variance = 2.0 * n1 * n0 * (2.0 * n1 * n0 - nn) / (nn * nn * (nn - 1.0));
    if (variance <= 0.0) return 0.0;
    return (static_cast<double>(runs) - expected) / std::sqrt(variance);
}

FrequencyReport frequency_report(const std::vector<int>& outcomes,
                                 const DiscreteDistribution& target) {
    if (outcomes.empty()) throw DomainError("frequency_report: no outcomes");
    FrequencyReport rep;
    rep.n = outcomes.size();
    rep.counts.assign(target.size(), 0);
    for (int o : outcomes) {
        if (o < 1 || static_cast<std::size_t>(o) > target.size())
            throw DomainError("frequency_report: outcome index out of range");
        ++rep.counts[o - 1];
    }
    double nn = static_cast<double>(rep.n);
    rep.frequencies.reserve(target.size());
    rep.target = target.probs();
    for (std::size_t i = 0; i < target.size(); ++i) {
        double f = static_cast<double>(rep.counts[i]) / nn;
        rep.frequencies.push_back(f);
        rep.max_abs_deviation = std::max(rep.max_abs_deviation, std::abs(f - rep.target[i]));
        double expected = nn * rep.target[i];
        if (rep.target[i] > 0.0) {
            double diff = static_cast<double>(rep.counts[i]) - expected;
            rep.chi_squared += diff * diff / expected;
            if (expected < 5.0) rep.low_expected_warning = true;
        } else if (rep.counts[i] > 0) {
            rep.chi_squared = std::numeric_limits<double>::infinity();
        }
    }
    rep.p_value = chi_squared_p_value(rep.chi_squared, target.size() - 1);
    return rep;
}

FrequencyReport frequency_report(const Trajectory& traj) {
    if (traj.records.empty()) throw DomainError("frequency_report: empty trajectory");
    const DiscreteDistribution& first = traj.records.front().probs;
    std::vector<int> outcomes;
    outcomes.reserve(traj.records.size());
    for (const auto& rec : traj.records) {
        if (!(rec.probs == first))
            throw DomainError(
                "frequency_report: distribution varies across jumps; use frequency_reports");
        outcomes.push_back(rec.outcome_basis);
    }
    return frequency_report(outcomes, first);
}

std::vector<FrequencyReport> frequency_reports(const Trajectory& traj) {
    if (traj.records.empty()) throw DomainError("frequency_reports: empty trajectory");
    std::vector<FrequencyReport> reports;
    std::size_t start = 0;
    while (start < traj.records.size()) {
        std::size_t end = start + 1;
        while (end < traj.records.size() &&
               traj.records[end].probs == traj.records[start].probs)
            ++end;
        std::vector<int> outcomes;
        for (std::size_t i = start; i < end; ++i)
            outcomes.push_back(traj.records[i].outcome_basis);
        reports.push_back(frequency_report(outcomes, traj.records[start].probs));
        start = end;
    }
    return reports;
}

UniformityReport uniformity_report(std::span<const UnitReal> rs) {
    if (rs.size() < 2) throw DomainError("uniformity_report: need at least two samples");
    UniformityReport rep;
    rep.n = rs.size();
    std::vector<double> xs;
    xs.reserve(rs.size());
    for (const auto& r : rs) xs.push_back(r.value());

    std::vector<double> sorted = xs;
    std::sort(sorted.begin(), sorted.end());
    double nn = static_cast<double>(rep.n);
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double upper = static_cast<double>(i + 1) / nn - sorted[i];
        double lower = sorted[i] - static_cast<double>(i) / nn;
        rep.ks_statistic = std::max({rep.ks_statistic, upper, lower});
    }

    // Lag-1 serial correlation of the values.
    std::size_t pairs = rep.n - 1;
    double ma = 0.0, mb = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        ma += xs[i];
        mb += xs[i + 1];
    }
    ma /= static_cast<double>(pairs);
    mb /= static_cast<double>(pairs);
    double cov = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i < pairs; ++i) {
        double da = xs[i] - ma, db = xs[i + 1] - mb;
        cov += da * db;
        va += da * da;
        vb += db * db;
    }
    if (va <= 0.0 || vb <= 0.0) {
        rep.serial_degenerate = true;
    } else {
        rep.serial_correlation = cov / std::sqrt(va * vb);
    }

    // Fixed 32-bit prefix per sample keeps the bit battery independent of
    // heterogeneous budgets; shorter samples contribute what they have.
    std::vector<std::uint8_t> bits;
    bits.reserve(rs.size() * 32);
    for (const auto& r : rs) {
        std::size_t k = std::min<std::size_t>(32, r.budget());
        std::uint64_t prefix = r.prefix_bits(k);
        for (std::size_t b = k; b > 0; --b)
            bits.push_back(static_cast<std::uint8_t>((prefix >> (b - 1)) & 1u));
    }
    rep.bit_count = bits.size();
    std::size_t ones = 0;
    for (auto b : bits) ones += b;
    rep.monobit_ones_fraction = static_cast<double>(ones) / static_cast<double>(bits.size());
    rep.runs_z = bits.size() >= 2 ? runs_z_score(bits) : 0.0;
    return rep;
}

nlohmann::json FrequencyReport::to_json() const {
    return nlohmann::json{{"n", n},
                          {"counts", counts},
                          {"frequencies", frequencies},
                          {"target", target},
                          {"max_abs_deviation", max_abs_deviation},
                          {"chi_squared", chi_squared},
                          {"p_value", p_value},
                          {"low_expected_warning", low_expected_warning}};
}

std::string FrequencyReport::to_text() const {
    std::ostringstream out;
    out << "outcome    count      freq    target\n";
    for (std::size_t i = 0; i < counts.size(); ++i) {
        char buf[80];
        std::snprintf(buf, sizeof buf, "%7zu %8zu %9.6f %9.6f\n", i + 1, counts[i],
                      frequencies[i], target[i]);
        out << buf;
    }
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "n=%zu  max|freq-p|=%.6f  chi2=%.6f  p=%.6g%s\n", n, max_abs_deviation,
                  chi_squared, p_value, low_expected_warning ? "  [low expected counts]" : "");
    out << buf;
    return out.str();
}

nlohmann::json UniformityReport::to_json() const {
    return nlohmann::json{{"n", n},
                          {"ks_statistic", ks_statistic},
                          {"serial_correlation", serial_correlation},
                          {"serial_degenerate", serial_degenerate},
                          {"monobit_ones_fraction", monobit_ones_fraction},
                          {"runs_z", runs_z},
                          {"bit_count", bit_count}};
}

std::string UniformityReport::to_text() const {
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "n=%zu  KS=%.6f  serial=%s  monobit=%.6f  runs_z=%.3f  bits=%zu\n", n,
                  ks_statistic,
                  serial_degenerate ? "degenerate" : std::to_string(serial_correlation).c_str(),
                  monobit_ones_fraction, runs_z, bit_count);
    return buf;
}

DriverComparison compare_drivers(
    const std::vector<std::pair<std::string, DriverConfig>>& configs, const JumpScript& script,
    std::size_t n_jumps) {
    if (n_jumps == 0) throw DomainError("compare_drivers: n_jumps must be >= 1");
    DriverComparison cmp;
    for (const auto& [label, config] : configs) {
        DriverComparison::Row row;
        row.label = label;
        row.kind = config.kind;
        JumpScript s = script;
        s.n_jumps = n_jumps;
        Trajectory traj;
        try {
            traj = run(s, config);
        } catch (const ExhaustionError&) {
            row.exhausted_at = 0; // could not start at all
            cmp.rows.push_back(std::move(row));
            continue;
        }
        row.jumps = traj.records.size();
        row.exhausted_at = traj.exhausted_at;
        if (!traj.records.empty()) {
            row.frequency = frequency_reports(traj).front();
            if (traj.records.size() >= 2) {
                std::vector<UnitReal> rs;
                rs.reserve(traj.records.size());
                for (const auto& rec : traj.records) rs.push_back(rec.r);
                row.uniformity = uniformity_report(rs);
            }
        }
        cmp.rows.push_back(std::move(row));
    }
    return cmp;
}

nlohmann::json DriverComparison::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& row : rows) {
        nlohmann::json r{{"label", row.label},
                         {"kind", to_string(row.kind)},
                         {"jumps", row.jumps},
                         {"frequency", row.frequency.to_json()},
                         {"uniformity", row.uniformity.to_json()}};
        if (row.exhausted_at) r["exhausted_at"] = *row.exhausted_at;
        arr.push_back(r);
    }
    return arr;
}

std::string DriverComparison::to_text() const {
    std::ostringstream out;
    out << "driver            jumps   max|f-p|      chi2     p-value        KS    runs_z  note\n";
    for (const auto& row : rows) {
        char buf[240];
        std::string note = row.exhausted_at ? "exhausted@" + std::to_string(*row.exhausted_at) : "";
        std::snprintf(buf, sizeof buf, "%-16s %6zu %10.6f %9.4f %11.4g %9.6f %9.3f  %s\n",
                      row.label.c_str(), row.jumps, row.frequency.max_abs_deviation,
                      row.frequency.chi_squared, row.frequency.p_value,
                      row.uniformity.ks_statistic, row.uniformity.runs_z, note.c_str());
        out << buf;
    }
    return out.str();
}

std::string DriverComparison::to_csv() const {
    std::ostringstream out;
    out << "label,kind,jumps,exhausted_at,max_abs_deviation,chi_squared,p_value,ks,serial,"
           "monobit,runs_z\n";
    for (const auto& row : rows) {
        out << row.label << ',' << to_string(row.kind) << ',' << row.jumps << ',';
        if (row.exhausted_at) out << *row.exhausted_at;
        out << ',' << row.frequency.max_abs_deviation << ',' << row.frequency.chi_squared << ','
            << row.frequency.p_value << ',' << row.uniformity.ks_statistic << ','
            << row.uniformity.serial_correlation << ',' << row.uniformity.monobit_ones_fraction
            << ',' << row.uniformity.runs_z << '\n';
    }
    return out.str();
}

} // namespace qjump
