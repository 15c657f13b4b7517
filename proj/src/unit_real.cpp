#include "qjump/unit_real.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>

#include <mpfr.h>

namespace qjump {

namespace {

std::vector<std::uint8_t> pack(const std::vector<bool>& bits) {
    std::vector<std::uint8_t> bytes((bits.size() + 7) / 8, 0);
    for (std::size_t i = 0; i < bits.size(); ++i) {
        if (bits[i]) bytes[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return bytes;
}

// Low `budget` bits of v are the fraction digits, b_1 at position budget-1.
std::vector<bool> bits_from_mpz(const mpz_class& v, std::size_t budget) {
    std::vector<bool> bits(budget);
    for (std::size_t i = 1; i <= budget; ++i)
        bits[i - 1] = mpz_tstbit(v.get_mpz_t(), static_cast<mp_bitcnt_t>(budget - i)) != 0;
    return bits;
}

std::vector<bool> champernowne_bits(std::size_t budget) {
    std::vector<bool> bits;
    bits.reserve(budget + 64);
    for (unsigned long long n = 1; bits.size() < budget; ++n) {
        int top = 63 - __builtin_clzll(n);
        for (int k = top; k >= 0; --k) bits.push_back((n >> k) & 1u);
    }
    bits.resize(budget);
    return bits;
}

std::vector<bool> sqrt2_bits(std::size_t budget) {
    // floor(sqrt(2) * 2^budget); low `budget` bits are the fraction.
    mpz_class two = 2;
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), two.get_mpz_t(), 2 * budget);
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    return bits_from_mpz(root, budget);
}

std::vector<bool> pi_bits(std::size_t budget) {
    mpfr_t pi;
    mpfr_init2(pi, static_cast<mpfr_prec_t>(budget + 16));
    mpfr_const_pi(pi, MPFR_RNDD);
    mpfr_frac(pi, pi, MPFR_RNDD);
    mpfr_mul_2ui(pi, pi, static_cast<unsigned long>(budget), MPFR_RNDD);
    mpz_class scaled;
    mpfr_get_z(scaled.get_mpz_t(), pi, MPFR_RNDD);
    mpfr_clear(pi);
    return bits_from_mpz(scaled, budget);
}

} // namespace

UnitReal UnitReal::from_bits(const std::vector<bool>& bits) {
    if (bits.empty()) throw DomainError("UnitReal: budget must be positive");
    return UnitReal(pack(bits), bits.size());
}

UnitReal UnitReal::from_bit_string(std::string_view s) {
    std::vector<bool> bits;
    bits.reserve(s.size());
    for (char c : s) {
        if (c == '0') bits.push_back(false);
        else if (c == '1') bits.push_back(true);
        else throw DomainError(std::string("UnitReal: invalid bit character '") + c + "'");
    }
    return from_bits(bits);
}

UnitReal UnitReal::from_fraction(std::uint64_t numerator, std::uint64_t denominator,
                                 std::size_t budget) {
    if (denominator == 0) throw DomainError("UnitReal: zero denominator");
    if (numerator >= denominator)
        throw DomainError("UnitReal: fraction must lie in [0,1)");
    if (budget == 0) throw DomainError("UnitReal: budget must be positive");
    mpz_class num(static_cast<unsigned long>(numerator >> 32));
    num <<= 32;
    num += static_cast<unsigned long>(numerator & 0xffffffffu);
    mpz_class den(static_cast<unsigned long>(denominator >> 32));
    den <<= 32;
    den += static_cast<unsigned long>(denominator & 0xffffffffu);
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), num.get_mpz_t(), budget);
    mpz_class q = scaled / den;
    return from_bits(bits_from_mpz(q, budget));
}

UnitReal UnitReal::from_rational(const mpq_class& value, std::size_t budget) {
    if (budget == 0) throw DomainError("UnitReal: budget must be positive");
    if (value < 0 || value >= 1) throw DomainError("UnitReal: value must lie in [0,1)");
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), value.get_num().get_mpz_t(), budget);
    mpz_class q = scaled / value.get_den();
    return from_bits(bits_from_mpz(q, budget));
}

UnitReal UnitReal::seed_constant(std::string_view name, std::size_t budget) {
    if (budget == 0) throw DomainError("seed_constant: budget must be positive");
    if (name == "champernowne2") return from_bits(champernowne_bits(budget));
    if (name == "sqrt2_frac") return from_bits(sqrt2_bits(budget));
    if (name == "pi_frac") return from_bits(pi_bits(budget));
    throw DomainError("seed_constant: unknown constant '" + std::string(name) + "'");
}

int UnitReal::bit(std::size_t i) const {
    if (i == 0 || i > budget_)
        throw ExhaustionError("UnitReal: bit index past budget");
    std::size_t z = i - 1;
    return (bytes_[z / 8] >> (7 - z % 8)) & 1;
}

UnitReal UnitReal::shift_left(std::size_t k) const {
    if (k >= budget_)
        throw ExhaustionError("shift_left: bit supply exhausted (k >= budget)");
    if (k == 0) return *this;
    std::size_t nb = budget_ - k;
    std::vector<std::uint8_t> out((nb + 7) / 8, 0);
    for (std::size_t i = 0; i < nb; ++i) {
        std::size_t src = i + k;
        if (bytes_[src / 8] & (0x80u >> (src % 8)))
            out[i / 8] |= static_cast<std::uint8_t>(0x80u >> (i % 8));
    }
    return UnitReal(std::move(out), nb);
}

UnitReal UnitReal::truncate(std::size_t new_budget) const {
    if (new_budget == 0 || new_budget > budget_)
        throw DomainError("truncate: new budget out of range");
    std::vector<std::uint8_t> out(bytes_.begin(), bytes_.begin() + (new_budget + 7) / 8);
    std::size_t pad = out.size() * 8 - new_budget;
    if (pad) out.back() &= static_cast<std::uint8_t>(0xffu << pad);
    return UnitReal(std::move(out), new_budget);
}

mpq_class UnitReal::value_exact() const {
    mpz_class n = 0;
    for (std::uint8_t b : bytes_) {
        n <<= 8;
        n += b;
    }
    std::size_t total = bytes_.size() * 8;
    n >>= (total - budget_); // drop padding? padding is at the low end; shift off
    mpz_class den = 1;
    mpz_mul_2exp(den.get_mpz_t(), den.get_mpz_t(), budget_);
    mpq_class q(n, den);
    q.canonicalize();
    return q;
}

double UnitReal::value() const {
    std::size_t m = std::min<std::size_t>(budget_, 64);
    return std::ldexp(static_cast<double>(prefix_bits(m)), -static_cast<int>(m));
}

std::uint64_t UnitReal::prefix_bits(std::size_t k) const {
    if (k > 64) throw DomainError("prefix_bits: at most 64 bits");
    if (k > budget_) throw ExhaustionError("prefix_bits: budget too small");
    std::uint64_t v = 0;
    std::size_t nbytes = (k + 7) / 8;
    for (std::size_t i = 0; i < nbytes; ++i) v = (v << 8) | bytes_[i];
    v >>= (nbytes * 8 - k);
    return v;
}

std::string UnitReal::serialize() const {
    static const char* hexdig = "0123456789ABCDEF";
    std::string out = std::to_string(budget_);
    out += ':';
    std::size_t nhex = (budget_ + 3) / 4;
    for (std::size_t j = 0; j < nhex; ++j) {
        unsigned nib = 0;
        for (std::size_t b = 0; b < 4; ++b) {
            std::size_t idx = j * 4 + b;
            nib <<= 1;
            if (idx < budget_) nib |= static_cast<unsigned>(bit(idx + 1));
        }
        out += hexdig[nib];
    }
    return out;
}

UnitReal UnitReal::parse(std::string_view text) {
    auto colon = text.find(':');
    if (colon == std::string_view::npos)
        throw SchemaError("UnitReal: missing ':' in serialized form");
    std::size_t budget = 0;
    for (char c : text.substr(0, colon)) {
        if (c < '0' || c > '9') throw SchemaError("UnitReal: bad budget field");
        budget = budget * 10 + static_cast<std::size_t>(c - '0');
        if (budget > (1u << 28)) throw SchemaError("UnitReal: budget too large");
    }
    if (budget == 0) throw SchemaError("UnitReal: budget must be positive");
    std::string_view hex = text.substr(colon + 1);
    if (hex.size() != (budget + 3) / 4)
        throw SchemaError("UnitReal: hex length does not match budget");
    std::vector<bool> bits;
    bits.reserve(hex.size() * 4);
    for (char c : hex) {
        unsigned nib;
        if (c >= '0' && c <= '9') nib = static_cast<unsigned>(c - '0');
        else if (c >= 'A' && c <= 'F') nib = static_cast<unsigned>(c - 'A' + 10);
        else if (c >= 'a' && c <= 'f') nib = static_cast<unsigned>(c - 'a' + 10);
        else throw SchemaError("UnitReal: invalid hex digit");
        for (int b = 3; b >= 0; --b) bits.push_back((nib >> b) & 1u);
    }
    for (std::size_t i = budget; i < bits.size(); ++i)
        if (bits[i]) throw SchemaError("UnitReal: nonzero padding bits");
    bits.resize(budget);
    return from_bits(bits);
}

std::string UnitReal::bit_string() const {
    std::string s;
    s.reserve(budget_);
    for (std::size_t i = 1; i <= budget_; ++i) s += static_cast<char>('0' + bit(i));
    return s;
}

Ordering compare(const UnitReal& a, const UnitReal& b) {
    std::size_t common = std::min(a.budget_, b.budget_);
    std::size_t cbytes = common / 8;
    for (std::size_t i = 0; i < cbytes; ++i) {
        if (a.bytes_[i] != b.bytes_[i])
            return a.bytes_[i] < b.bytes_[i] ? Ordering::less : Ordering::greater;
    }
    for (std::size_t i = cbytes * 8 + 1; i <= common; ++i) {
        int ba = a.bit(i), bb = b.bit(i);
        if (ba != bb) return ba < bb ? Ordering::less : Ordering::greater;
    }
    const UnitReal& longer = a.budget_ >= b.budget_ ? a : b;
    for (std::size_t i = common + 1; i <= longer.budget(); ++i) {
        if (longer.bit(i))
            throw ExhaustionError("compare: identical prefixes, one operand exhausted");
    }
    return Ordering::equal;
}

Ordering compare_fraction(const UnitReal& r, std::uint64_t num, std::uint64_t den) {
    if (den == 0 || num > den) throw DomainError("compare_fraction: value outside [0,1]");
    if (r.budget() <= 64) {
        std::uint64_t n = r.prefix_bits(r.budget());
        unsigned __int128 scaled = static_cast<unsigned __int128>(num) << r.budget();
        unsigned __int128 t = scaled / den;
        unsigned __int128 rem = scaled % den;
        if (static_cast<unsigned __int128>(n) < t) return Ordering::less;
        if (static_cast<unsigned __int128>(n) > t) return Ordering::greater;
        if (rem == 0) return Ordering::equal;
        throw ExhaustionError("compare: budget cannot separate value from boundary");
    }
    mpq_class q(static_cast<unsigned long>(num), static_cast<unsigned long>(den));
    q.canonicalize();
    return compare(r, q);
}

Ordering compare(const UnitReal& r, const mpq_class& value) {
    if (value < 0 || value > 1) throw DomainError("compare: value outside [0,1]");
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), value.get_num().get_mpz_t(), r.budget());
    mpz_class t, rem;
    mpz_tdiv_qr(t.get_mpz_t(), rem.get_mpz_t(), scaled.get_mpz_t(),
                value.get_den().get_mpz_t());
    mpq_class rv = r.value_exact();
    mpz_class n;
    mpz_mul_2exp(n.get_mpz_t(), rv.get_num().get_mpz_t(), r.budget());
    n /= rv.get_den();
    int c = cmp(n, t);
    if (c < 0) return Ordering::less;
    if (c > 0) return Ordering::greater;
    if (rem == 0) return Ordering::equal;
    throw ExhaustionError("compare: budget cannot separate value from boundary");
}

} // namespace qjump
