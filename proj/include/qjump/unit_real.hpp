#ifndef QJUMP_UNIT_REAL_HPP
#define QJUMP_UNIT_REAL_HPP

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <gmpxx.h>

#include "qjump/errors.hpp"

namespace qjump {

enum class Ordering { less, equal, greater };

/// A real in [0,1) held as a finite binary expansion 0.b_1 b_2 ... b_B.
/// The budget B is the number of bits actually known; bits past the budget
/// are undefined, and any operation that would need them raises
/// ExhaustionError instead of fabricating zeros.
///
/// Immutable after construction.
class UnitReal {
public:
    /// Build from explicit bits, most significant first.
    static UnitReal from_bits(const std::vector<bool>& bits);

    /// Build from a string like "1100" (b_1 first).
    static UnitReal from_bit_string(std::string_view s);

    /// First `budget` binary digits of numerator/denominator (truncation).
    /// Requires numerator < denominator and budget > 0.
    static UnitReal from_fraction(std::uint64_t numerator, std::uint64_t denominator,
                                  std::size_t budget);

    /// Truncated expansion of an exact rational in [0,1).
    static UnitReal from_rational(const mpq_class& value, std::size_t budget);

    /// Named seed constants: "champernowne2", "sqrt2_frac", "pi_frac".
    static UnitReal seed_constant(std::string_view name, std::size_t budget);

    /// Parse the serialized form "<budget>:<hex>", e.g. "12:DCB".
    static UnitReal parse(std::string_view text);

    std::size_t budget() const { return budget_; }

    /// Bit b_i, 1-based. i > budget raises ExhaustionError.
    int bit(std::size_t i) const;

    /// Drop the first k bits: 0.b_{k+1} b_{k+2} ... with budget B-k.
    /// k >= budget raises ExhaustionError (the seed's bit supply is spent).
    UnitReal shift_left(std::size_t k) const;

    /// Keep only the first new_budget bits (new_budget <= budget).
    UnitReal truncate(std::size_t new_budget) const;

    /// Exact represented value sum b_i 2^{-i}.
    mpq_class value_exact() const;

    /// Double approximation from the leading bits (at most 64).
    double value() const;

    /// The first k bits (k <= 64, k <= budget) packed into the low k bits
    /// of the result, b_1 most significant.
    std::uint64_t prefix_bits(std::size_t k) const;

    /// Serialized form "<budget>:<hex>", bits packed MSB-first, last nibble
    /// zero-padded. Bit-exact round trip with parse().
    std::string serialize() const;

    std::string bit_string() const;

    bool operator==(const UnitReal& other) const {
        return budget_ == other.budget_ && bytes_ == other.bytes_;
    }

private:
    UnitReal(std::vector<std::uint8_t> bytes, std::size_t budget)
        : bytes_(std::move(bytes)), budget_(budget) {}

    std::vector<std::uint8_t> bytes_; // MSB-first packed, padding bits zero
    std::size_t budget_ = 0;

    friend Ordering compare(const UnitReal&, const UnitReal&);
};

/// Exact comparison of two expansions. If the common prefix agrees and the
/// shorter operand is exhausted while the longer still holds a one bit, the
/// order cannot be decided and ExhaustionError is raised.
Ordering compare(const UnitReal& a, const UnitReal& b);

/// Compare an expansion against an exact rational in [0,1].
/// Raises ExhaustionError when r's budget cannot separate r from the value.
Ordering compare(const UnitReal& r, const mpq_class& value);

/// Fast-path comparison against num/den with 0 <= num <= den.
Ordering compare_fraction(const UnitReal& r, std::uint64_t num, std::uint64_t den);

} // namespace qjump

#endif
