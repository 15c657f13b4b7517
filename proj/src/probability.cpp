#include "qjump/probability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>

#include <nlohmann/json.hpp>

#include "qjump/rational.hpp"

namespace qjump {

namespace {

void check_size(std::size_t n) {
    if (n < 2) throw DomainError("distribution: need at least two outcomes");
}

} // namespace

DiscreteDistribution DiscreteDistribution::from_reals(std::vector<double> probs) {
    check_size(probs.size());
    double sum = 0.0;
    for (double p : probs) {
        if (!std::isfinite(p) || p < 0)
            throw DomainError("distribution: probabilities must be finite and >= 0");
        sum += p;
    }
    if (std::abs(sum - 1.0) > kNormTolerance)
        throw NormalizationError("distribution: probabilities sum to " + std::to_string(sum));
    DiscreteDistribution d;
    d.probs_ = std::move(probs);
    return d;
}

DiscreteDistribution DiscreteDistribution::from_rationals(std::vector<mpq_class> probs) {
    check_size(probs.size());
    mpq_class sum = 0;
    for (const auto& p : probs) {
        if (p < 0) throw DomainError("distribution: probabilities must be >= 0");
        sum += p;
    }
    if (sum != 1)
        throw NormalizationError("distribution: exact probabilities must sum to 1, got " +
                                 rational_to_string(sum));
    DiscreteDistribution d;
    d.probs_.reserve(probs.size());
    for (const auto& p : probs) d.probs_.push_back(p.get_d());
    d.exact_ = std::move(probs);
    return d;
}

DiscreteDistribution DiscreteDistribution::from_json(const nlohmann::json& j) {
    if (!j.is_array()) throw SchemaError("distribution: expected a JSON array");
    bool any_string = false, any_number = false;
    for (const auto& e : j) {
        if (e.is_string()) any_string = true;
        else if (e.is_number()) any_number = true;
        else throw SchemaError("distribution: entries must be numbers or fraction strings");
    }
    if (any_string && any_number)
        throw SchemaError("distribution: do not mix numbers and fraction strings");
    if (any_string) {
        std::vector<mpq_class> probs;
        for (const auto& e : j) probs.push_back(rational_from_string(e.get<std::string>()));
        return from_rationals(std::move(probs));
    }
    std::vector<double> probs;
    for (const auto& e : j) probs.push_back(e.get<double>());
    return from_reals(std::move(probs));
}

nlohmann::json DiscreteDistribution::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    if (exact_) {
        for (const auto& p : *exact_) arr.push_back(rational_to_string(p));
    } else {
        for (double p : probs_) arr.push_back(p);
    }
    return arr;
}

const std::vector<mpq_class>& DiscreteDistribution::exact_probs() const {
    if (!exact_) throw DomainError("distribution: not in exact mode");
    return *exact_;
}

bool DiscreteDistribution::operator==(const DiscreteDistribution& other) const {
    if (exact_.has_value() != other.exact_.has_value()) return false;
    if (exact_) return *exact_ == *other.exact_;
    return probs_ == other.probs_;
}

OutcomeOrdering canonical_order(const DiscreteDistribution& dist,
                                const std::vector<double>* derivative_hints) {
    std::size_t n = dist.size();
    if (derivative_hints && derivative_hints->size() != n)
        throw DomainError("canonical_order: hint count does not match outcome count");
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    auto prob_less = [&](int a, int b) {
        if (dist.exact()) {
            int c = cmp(dist.exact_probs()[a], dist.exact_probs()[b]);
            if (c != 0) return c > 0; // descending
        } else {
            if (dist.prob(a) != dist.prob(b)) return dist.prob(a) > dist.prob(b);
        }
        if (derivative_hints && (*derivative_hints)[a] != (*derivative_hints)[b])
            return (*derivative_hints)[a] > (*derivative_hints)[b];
        return false; // stable sort keeps ascending original index
    };
    std::stable_sort(idx.begin(), idx.end(), prob_less);
    OutcomeOrdering ord;
    ord.used_hints = derivative_hints != nullptr;
    ord.permutation.reserve(n);
    for (int i : idx) ord.permutation.push_back(i + 1);
    return ord;
}

DiscreteDistribution apply_ordering(const DiscreteDistribution& dist,
                                    const OutcomeOrdering& ordering) {
    if (ordering.permutation.size() != dist.size())
        throw DomainError("apply_ordering: permutation size mismatch");
    if (dist.exact()) {
        std::vector<mpq_class> probs;
        probs.reserve(dist.size());
        for (int i : ordering.permutation) probs.push_back(dist.exact_probs()[i - 1]);
        return DiscreteDistribution::from_rationals(std::move(probs));
    }
    std::vector<double> probs;
    probs.reserve(dist.size());
    for (int i : ordering.permutation) probs.push_back(dist.prob(i - 1));
    return DiscreteDistribution::from_reals(std::move(probs));
}

CumulativePartition partition(const DiscreteDistribution& dist) {
    static std::atomic<std::uint64_t> next_id{1};
    CumulativePartition part;
    part.id_ = next_id.fetch_add(1, std::memory_order_relaxed);
    std::size_t n = dist.size();
    part.boundary_exact_.reserve(n + 1);
    part.boundary_double_.reserve(n + 1);
    part.zero_width_.reserve(n);
    if (dist.exact()) {
        part.exact_ = true;
        mpq_class cum = 0;
        part.boundary_exact_.push_back(cum);
        part.boundary_double_.push_back(0.0);
        for (const auto& p : dist.exact_probs()) {
            cum += p;
            part.boundary_exact_.push_back(cum);
            part.boundary_double_.push_back(cum.get_d());
            part.zero_width_.push_back(sgn(p) == 0);
        }
        if (part.boundary_exact_.back() != 1)
            throw NormalizationError("partition: exact boundaries do not reach 1");
    } else {
        double cum = 0.0;
        part.boundary_exact_.emplace_back(0);
        part.boundary_double_.push_back(0.0);
        for (std::size_t i = 0; i < n; ++i) {
            cum += dist.prob(i);
            part.boundary_exact_.emplace_back(cum);
            part.boundary_double_.push_back(cum);
            part.zero_width_.push_back(dist.prob(i) == 0.0);
        }
        if (std::abs(cum - 1.0) > kNormTolerance)
            throw NormalizationError("partition: probabilities sum to " + std::to_string(cum));
        part.boundary_exact_.back() = 1;
        part.boundary_double_.back() = 1.0;
    }
    return part;
}

namespace {

// Boundary prefixes at a fixed budget, cached per (partition, budget) so
// sweeps over many r values at one resolution stay cheap. Thread-local and
// keyed by the partition's unique id, so reuse across threads or reallocated
// partitions cannot alias.
struct SelectCache {
    std::uint64_t part_id = 0;
    std::size_t budget = 0;
    bool fast = false;
    // prefix[i] = floor(r_{i+1} * 2^budget); dyadic[i]: remainder is zero.
    std::vector<unsigned __int128> prefix;
    std::vector<bool> dyadic;
};

thread_local SelectCache tl_select_cache;

void build_cache(SelectCache& c, const CumulativePartition& part, std::size_t budget) {
    c.part_id = part.id();
    c.budget = budget;
    c.prefix.clear();
    c.dyadic.clear();
    c.fast = budget <= 64;
    std::size_t n = part.intervals();
    if (!c.fast) return;
    for (std::size_t i = 1; i <= n && c.fast; ++i) {
        const mpq_class& b = part.boundary_exact(i);
        if (!mpz_fits_ulong_p(b.get_num().get_mpz_t()) ||
            !mpz_fits_ulong_p(b.get_den().get_mpz_t())) {
            c.fast = false;
            break;
        }
        std::uint64_t num = mpz_get_ui(b.get_num().get_mpz_t());
        std::uint64_t den = mpz_get_ui(b.get_den().get_mpz_t());
        unsigned __int128 scaled = static_cast<unsigned __int128>(num) << budget;
        c.prefix.push_back(scaled / den);
        c.dyadic.push_back(scaled % den == 0);
    }
    if (!c.fast) {
        c.prefix.clear();
        c.dyadic.clear();
    }
}

} // namespace

int select_outcome(const CumulativePartition& part, const UnitReal& r) {
    std::size_t n = part.intervals();
    SelectCache& cache = tl_select_cache;
    if (cache.part_id != part.id() || cache.budget != r.budget())
        build_cache(cache, part, r.budget());
    if (cache.fast) {
        unsigned __int128 nv = r.prefix_bits(r.budget());
        for (std::size_t i = 0; i < n; ++i) {
            if (part.zero_width(i)) continue;
            if (nv < cache.prefix[i]) return static_cast<int>(i + 1);
            if (nv == cache.prefix[i] && !cache.dyadic[i])
                throw ExhaustionError("select_outcome: budget cannot separate r from boundary");
            // nv >= boundary prefix: r lies at or beyond r_i, keep scanning.
        }
    } else {
        for (std::size_t i = 1; i <= n; ++i) {
            if (part.zero_width(i - 1)) continue;
            Ordering o = compare(r, part.boundary_exact(i));
            if (o == Ordering::less) return static_cast<int>(i);
        }
    }
    throw DomainError("select_outcome: r not contained in [0,1)");
}

double cdf(const DiscreteDistribution& dist, double x) {
    if (x >= 1.0) return 1.0;
    double cum = 0.0;
    double result = 0.0;
    for (std::size_t i = 0; i < dist.size(); ++i) {
        cum += dist.prob(i);
        if (x >= cum) result = cum;
        else break;
    }
    return result;
}

mpq_class cdf_exact(const DiscreteDistribution& dist, const mpq_class& x) {
    if (x >= 1) return 1;
    mpq_class cum = 0;
    mpq_class result = 0;
    for (const auto& p : dist.exact_probs()) {
        cum += p;
        if (x >= cum) result = cum;
        else break;
    }
    return result;
}

nlohmann::json CumulativePartition::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    for (std::size_t i = 0; i < boundary_exact_.size(); ++i) {
        if (exact_) arr.push_back(rational_to_string(boundary_exact_[i]));
        else arr.push_back(boundary_double_[i]);
    }
    return nlohmann::json{{"boundaries", arr}};
}

} // namespace qjump
