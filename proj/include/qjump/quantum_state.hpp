#ifndef QJUMP_QUANTUM_STATE_HPP
#define QJUMP_QUANTUM_STATE_HPP

#include <complex>
#include <optional>
#include <utility>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

#include "qjump/probability.hpp"
#include "qjump/unit_real.hpp"

namespace qjump {

/// Normalized amplitudes c_1 ... c_n over the standard basis, n >= 2.
/// Optionally carries exact rational real/imaginary parts, in which case the
/// Born probabilities stay rational. Immutable after construction.
class StateVector {
public:
    using ExactAmp = std::pair<mpq_class, mpq_class>; // (re, im)

    /// Divide by the norm; all-zero or length < 2 input is a domain error.
    static StateVector normalize(std::vector<std::complex<double>> amplitudes);

    /// Exact-mode normalization. Succeeds only when the squared norm is the
    /// square of a rational, so that the result stays rational.
    static StateVector normalize_exact(std::vector<ExactAmp> amplitudes);

    /// Array of amplitudes; each entry is a number, a fraction string, or an
    /// [re, im] pair of either.
    static StateVector from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    std::size_t dimension() const { return amps_.size(); }
    std::complex<double> amplitude(std::size_t idx0) const { return amps_[idx0]; }
    bool exact() const { return exact_.has_value(); }
    const std::vector<ExactAmp>& exact_amplitudes() const;

    bool operator==(const StateVector& other) const;

    /// True when the states differ only by a global phase factor.
    bool same_up_to_phase(const StateVector& other, double tol = 1e-12) const;

private:
    StateVector() = default;
    std::vector<std::complex<double>> amps_;
    std::optional<std::vector<ExactAmp>> exact_;
};

/// p_i = |c_i|^2 in basis order (no canonical reordering).
DiscreteDistribution born_probabilities(const StateVector& state);

/// One reduction |> -> |i>: the recorded facts of a jump.
struct ReductionEvent {
    StateVector pre_state;
    DiscreteDistribution probs;   // born_probabilities(pre_state)
    OutcomeOrdering ordering;     // canonical permutation used
    UnitReal r_used;
    int outcome_canonical = 0;    // 1-based position in the ordered partition
    int outcome_basis = 0;        // 1-based original basis index
};

struct ReduceOptions {
    const std::vector<double>* derivative_hints = nullptr;
    bool canonical = true; // false: partition in raw basis order
};

/// Order the Born probabilities canonically, partition [0,1), select the
/// interval containing r, and map the slot back to the basis index.
ReductionEvent reduce(const StateVector& state, const UnitReal& r,
                      const ReduceOptions& options = {});

/// Two distinct pre-states that reduce to the same outcome under the same r:
/// the post-jump record does not determine the pre-jump state.
struct RetrodictionWitness {
    StateVector first;
    StateVector second;
    UnitReal r;
    int outcome = 0;
};

RetrodictionWitness retrodiction_witness(int outcome, std::size_t n);

} // namespace qjump

#endif
