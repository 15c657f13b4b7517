#ifndef QJUMP_DRIVERS_HPP
#define QJUMP_DRIVERS_HPP

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <gmpxx.h>
#include <nlohmann/json_fwd.hpp>

#include "qjump/unit_real.hpp"

namespace qjump {

enum class DriverKind { stochastic, preassigned, bitshift, cosmic_time };

std::string to_string(DriverKind kind);
DriverKind driver_kind_from_string(const std::string& s);

/// Jump instants tau_j, dimensionless, strictly increasing, >= 0.
struct InstantSource {
    enum class Mode { explicit_list, arithmetic };
    Mode mode = Mode::explicit_list;
    std::vector<mpq_class> instants; // explicit_list
    mpq_class start;                 // arithmetic: tau_j = start + j * step
    mpq_class step;

    /// One decimal/rational value per line; '#' starts a comment.
    static InstantSource from_file(const std::string& path);
};

/// Time unit selector: tau = t / t_unit. Planck units give multiplier 1;
/// kappa_lambda passes the dimensionless product through.
mpq_class time_unit(const std::string& selector, const mpq_class& lambda_dimensionless);

struct DriverConfig {
    DriverKind kind = DriverKind::stochastic;

    // stochastic
    std::uint64_t entropy_seed = 0;

    // preassigned
    std::vector<UnitReal> list;

    // bitshift
    std::optional<UnitReal> seed;

    // cosmic_time
    InstantSource instants;
    mpq_class unit_multiplier = 1;

    /// Bits emitted per r_j. For bitshift, 0 means "full remaining tail".
    std::size_t resolution = 64;

    static DriverConfig from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;
};

struct DriverOutput {
    UnitReal r;
    std::optional<mpq_class> tau; // cosmic_time only
    std::optional<mpz_class> m;   // integer part of tau
};

/// Sequential source of the sequence r~ = (r_j). Single-owner state; clone()
/// snapshots the cursor.
class Driver {
public:
    virtual ~Driver() = default;
    virtual DriverOutput next() = 0;
    UnitReal next_r() { return next().r; }
    virtual std::unique_ptr<Driver> clone() const = 0;
    /// Number of values still available, if finite.
    virtual std::optional<std::size_t> remaining() const = 0;
    std::size_t cursor() const { return cursor_; }
    DriverKind kind() const { return kind_; }

protected:
    explicit Driver(DriverKind kind) : kind_(kind) {}
    std::size_t cursor_ = 0;
    DriverKind kind_;
};

/// Build a driver. When n_jumps is known, the bitshift driver checks its
/// seed budget up front (budget >= n_jumps + resolution) and raises
/// ExhaustionError at construction rather than mid-run.
std::unique_ptr<Driver> make_driver(const DriverConfig& config,
                                    std::optional<std::size_t> n_jumps = std::nullopt);

} // namespace qjump

#endif
