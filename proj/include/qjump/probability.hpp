#ifndef QJUMP_PROBABILITY_HPP
#define QJUMP_PROBABILITY_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

#include "qjump/errors.hpp"
#include "qjump/unit_real.hpp"

namespace qjump {

/// Normalization tolerance for float-valued distributions. Exact-rational
/// distributions must sum to one exactly.
inline constexpr double kNormTolerance = 9.094947017729282e-13; // 2^-40

/// Probabilities p_1 ... p_n of a discrete probability space, n >= 2.
/// Float-backed or exact-rational; immutable after construction.
class DiscreteDistribution {
public:
    static DiscreteDistribution from_reals(std::vector<double> probs);
    static DiscreteDistribution from_rationals(std::vector<mpq_class> probs);

    /// Array of numbers (float mode) or fraction strings like "3/10" (exact).
    static DiscreteDistribution from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t size() const { return probs_.size(); }
    double prob(std::size_t idx0) const { return probs_[idx0]; }
    const std::vector<double>& probs() const { return probs_; }

    bool exact() const { return exact_.has_value(); }
    const std::vector<mpq_class>& exact_probs() const;

    bool operator==(const DiscreteDistribution& other) const;

private:
    DiscreteDistribution() = default;
    std::vector<double> probs_;
    std::optional<std::vector<mpq_class>> exact_;
};

/// Boundaries r_0 = 0 <= r_1 <= ... <= r_n = 1 with r_i - r_{i-1} = p_i.
/// Boundaries are kept as exact rationals (dyadic when built from floats)
/// so membership tests against a UnitReal are decidable or raise exhaustion,
/// never approximate.
class CumulativePartition {
public:
    std::size_t intervals() const { return boundary_exact_.size() - 1; }
    double boundary(std::size_t i) const { return boundary_double_[i]; } // r_i, i in [0,n]
    const mpq_class& boundary_exact(std::size_t i) const { return boundary_exact_[i]; }
    bool zero_width(std::size_t idx0) const { return zero_width_[idx0]; }
    bool exact() const { return exact_; }
    std::uint64_t id() const { return id_; }

    nlohmann::json to_json() const;

private:
    friend CumulativePartition partition(const DiscreteDistribution&);
    CumulativePartition() = default;
    std::vector<double> boundary_double_;
    std::vector<mpq_class> boundary_exact_;
    std::vector<bool> zero_width_;
    bool exact_ = false;
    std::uint64_t id_ = 0;
};

/// Canonical outcome ordering: probabilities read through `permutation` are
/// non-increasing. permutation[k] is the 1-based original outcome index at
/// canonical position k+1.
struct OutcomeOrdering {
    std::vector<int> permutation;
    bool used_hints = false;
};

/// Sort outcomes by descending probability; tied blocks by descending
/// derivative hint (the probabilities' order just after the jump instant);
/// residual ties by ascending original index.
OutcomeOrdering canonical_order(const DiscreteDistribution& dist,
                                const std::vector<double>* derivative_hints = nullptr);

/// Distribution reordered through an ordering's permutation.
DiscreteDistribution apply_ordering(const DiscreteDistribution& dist,
                                    const OutcomeOrdering& ordering);

/// Prefix sums of the probabilities.
CumulativePartition partition(const DiscreteDistribution& dist);

/// The unique 1-based i with r in [r_{i-1}, r_i). Zero-width intervals are
/// unselectable. Raises ExhaustionError when r's budget cannot separate it
/// from a boundary.
int select_outcome(const CumulativePartition& part, const UnitReal& r);

/// Distribution function F(x): 0 below p_1, the staircase of prefix sums on
/// the half-open steps, 1 at and above 1.
double cdf(const DiscreteDistribution& dist, double x);
mpq_class cdf_exact(const DiscreteDistribution& dist, const mpq_class& x);

} // namespace qjump

#endif
