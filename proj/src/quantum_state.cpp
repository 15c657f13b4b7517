#include "qjump/quantum_state.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "qjump/rational.hpp"

namespace qjump {

namespace {

// sqrt of a rational that is a perfect square of a rational, else nullopt.
std::optional<mpq_class> rational_sqrt(const mpq_class& q) {
    if (sgn(q) < 0) return std::nullopt;
    if (!mpz_perfect_square_p(q.get_num().get_mpz_t()) ||
        !mpz_perfect_square_p(q.get_den().get_mpz_t()))
        return std::nullopt;
    mpz_class num, den;
    mpz_sqrt(num.get_mpz_t(), q.get_num().get_mpz_t());
    mpz_sqrt(den.get_mpz_t(), q.get_den().get_mpz_t());
    mpq_class root(num, den);
    root.canonicalize();
    return root;
}

} // namespace

StateVector StateVector::normalize(std::vector<std::complex<double>> amplitudes) {
    if (amplitudes.size() < 2)
        throw DomainError("state: need dimension >= 2");
    double norm2 = 0.0;
    for (const auto& c : amplitudes) norm2 += std::norm(c);
    if (norm2 == 0.0) throw DomainError("state: all amplitudes are zero");
    double norm = std::sqrt(norm2);
    for (auto& c : amplitudes) c /= norm;
    StateVector s;
    s.amps_ = std::move(amplitudes);
    return s;
}

StateVector StateVector::normalize_exact(std::vector<ExactAmp> amplitudes) {
    if (amplitudes.size() < 2)
        throw DomainError("state: need dimension >= 2");
    mpq_class norm2 = 0;
    for (const auto& [re, im] : amplitudes) norm2 += re * re + im * im;
    if (sgn(norm2) == 0) throw DomainError("state: all amplitudes are zero");
    auto norm = rational_sqrt(norm2);
    if (!norm)
        throw DomainError("state: exact normalization needs a rational norm; squared norm " +
                          rational_to_string(norm2) + " is not a perfect square");
    StateVector s;
    s.amps_.reserve(amplitudes.size());
    for (auto& [re, im] : amplitudes) {
        re /= *norm;
        im /= *norm;
        s.amps_.emplace_back(re.get_d(), im.get_d());
    }
    s.exact_ = std::move(amplitudes);
    return s;
}

const std::vector<StateVector::ExactAmp>& StateVector::exact_amplitudes() const {
    if (!exact_) throw DomainError("state: not in exact mode");
    return *exact_;
}

bool StateVector::operator==(const StateVector& other) const {
    if (exact_.has_value() != other.exact_.has_value()) return false;
    if (exact_) return *exact_ == *other.exact_;
    return amps_ == other.amps_;
}

bool StateVector::same_up_to_phase(const StateVector& other, double tol) const {
    if (dimension() != other.dimension()) return false;
    std::complex<double> phase(0, 0);
    for (std::size_t i = 0; i < dimension(); ++i) {
        if (std::abs(amps_[i]) > tol) {
            phase = other.amps_[i] / amps_[i];
            break;
        }
    }
    if (std::abs(std::abs(phase) - 1.0) > tol) return false;
    for (std::size_t i = 0; i < dimension(); ++i)
        if (std::abs(other.amps_[i] - phase * amps_[i]) > tol) return false;
    return true;
}

StateVector StateVector::from_json(const nlohmann::json& j) {
    if (!j.is_array() || j.size() < 2)
        throw SchemaError("state: expected an array of at least two amplitudes");
    bool any_string = false, any_number = false;
    auto classify = [&](const nlohmann::json& e) {
        if (e.is_string()) any_string = true;
        else if (e.is_number()) any_number = true;
        else throw SchemaError("state: amplitude parts must be numbers or fraction strings");
    };
    for (const auto& e : j) {
        if (e.is_array()) {
            if (e.size() != 2) throw SchemaError("state: [re, im] pair expected");
            classify(e[0]);
            classify(e[1]);
        } else {
            classify(e);
        }
    }
    if (any_string && any_number)
        throw SchemaError("state: do not mix numbers and fraction strings");
    if (any_string) {
        std::vector<ExactAmp> amps;
        for (const auto& e : j) {
            if (e.is_array())
                amps.emplace_back(rational_from_string(e[0].get<std::string>()),
                                  rational_from_string(e[1].get<std::string>()));
            else
                amps.emplace_back(rational_from_string(e.get<std::string>()), mpq_class(0));
        }
        return normalize_exact(std::move(amps));
    }
    std::vector<std::complex<double>> amps;
    for (const auto& e : j) {
        if (e.is_array()) amps.emplace_back(e[0].get<double>(), e[1].get<double>());
        else amps.emplace_back(e.get<double>(), 0.0);
    }
    return normalize(std::move(amps));
}

nlohmann::json StateVector::to_json() const {
    nlohmann::json arr = nlohmann::json::array();
    if (exact_) {
        for (const auto& [re, im] : *exact_)
            arr.push_back({rational_to_string(re), rational_to_string(im)});
    } else {
        for (const auto& c : amps_) arr.push_back({c.real(), c.imag()});
    }
    return arr;
}

DiscreteDistribution born_probabilities(const StateVector& state) {
    if (state.exact()) {
        std::vector<mpq_class> probs;
        probs.reserve(state.dimension());
        for (const auto& [re, im] : state.exact_amplitudes())
            probs.push_back(re * re + im * im);
        return DiscreteDistribution::from_rationals(std::move(probs));
    }
    std::vector<double> probs;
    probs.reserve(state.dimension());
    for (std::size_t i = 0; i < state.dimension(); ++i)
        probs.push_back(std::norm(state.amplitude(i)));
    return DiscreteDistribution::from_reals(std::move(probs));
}

ReductionEvent reduce(const StateVector& state, const UnitReal& r,
                      const ReduceOptions& options) {
    ReductionEvent ev{state, born_probabilities(state), {}, r, 0, 0};
    if (options.canonical) {
        ev.ordering = canonical_order(ev.probs, options.derivative_hints);
    } else {
        ev.ordering.permutation.resize(state.dimension());
        for (std::size_t i = 0; i < state.dimension(); ++i)
            ev.ordering.permutation[i] = static_cast<int>(i + 1);
    }
    DiscreteDistribution ordered = apply_ordering(ev.probs, ev.ordering);
    CumulativePartition part = partition(ordered);
    ev.outcome_canonical = select_outcome(part, r);
    ev.outcome_basis = ev.ordering.permutation[ev.outcome_canonical - 1];
    return ev;
}

RetrodictionWitness retrodiction_witness(int outcome, std::size_t n) {
    if (n < 2) throw DomainError("retrodiction_witness: dimension must be >= 2");
    if (outcome < 1 || static_cast<std::size_t>(outcome) > n)
        throw DomainError("retrodiction_witness: outcome out of range");
    std::vector<std::complex<double>> certain(n, 0.0);
    certain[outcome - 1] = 1.0;
    std::vector<std::complex<double>> uniform(n, 1.0);
    RetrodictionWitness w{StateVector::normalize(std::move(certain)),
                          StateVector::normalize(std::move(uniform)),
                          // Midpoint of the uniform state's interval for the
                          // outcome: equal probabilities keep basis order, so
                          // the interval is [(outcome-1)/n, outcome/n).
                          UnitReal::from_fraction(2 * outcome - 1, 2 * n, 64),
                          outcome};
    return w;
}

} // namespace qjump
