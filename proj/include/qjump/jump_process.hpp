#ifndef QJUMP_JUMP_PROCESS_HPP
#define QJUMP_JUMP_PROCESS_HPP

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "qjump/drivers.hpp"
#include "qjump/quantum_state.hpp"

namespace qjump {

/// What gets reduced at each jump. The origin of per-jump distributions is
/// left open; this is the injection point, not a dynamical law.
struct JumpScript {
    enum class Mode { fixed_state, state_list, fixed_distribution, distribution_list };
    Mode mode = Mode::fixed_state;
    std::vector<StateVector> states;
    std::vector<DiscreteDistribution> distributions;
    /// Unset means "until driver exhaustion".
    std::optional<std::size_t> n_jumps;

    static JumpScript from_json(const nlohmann::json& j);
    nlohmann::json to_json() const;

    void validate() const;
};

struct RunOptions {
    std::optional<std::vector<double>> derivative_hints;
    bool canonical = true;

    nlohmann::json to_json() const;
    static RunOptions from_json(const nlohmann::json& j);
};

struct JumpRecord {
    std::size_t j = 0;
    UnitReal r;
    DiscreteDistribution probs;     // snapshot p_{jk} in basis order
    std::vector<int> permutation;   // canonical position -> 1-based basis index
    int outcome_canonical = 0;
    int outcome_basis = 0;
    std::optional<mpq_class> tau;
    std::optional<mpz_class> m;

    nlohmann::json to_json() const;
    static JumpRecord from_json(const nlohmann::json& j);
    bool operator==(const JumpRecord& other) const;
};

struct Trajectory {
    std::string config_digest;
    DriverKind driver_kind = DriverKind::stochastic;
    std::vector<JumpRecord> records;
    /// Set when the driver (or a budget-limited comparison) ran dry at jump j.
    std::optional<std::size_t> exhausted_at;

    void write_ndjson(std::ostream& out) const;
    static Trajectory read_ndjson(std::istream& in);
    void write_csv(std::ostream& out) const;
};

/// SHA-256 hex digest of the canonical JSON of (script, driver, options).
std::string config_digest(const JumpScript& script, const DriverConfig& driver,
                          const RunOptions& options = {});

/// Execute the jump sequence: per jump, fetch the distribution, draw r_j,
/// select the outcome, append the record. Driver exhaustion mid-run yields a
/// partial trajectory with the exhaustion point marked, not a failure.
Trajectory run(const JumpScript& script, const DriverConfig& driver,
               const RunOptions& options = {});

/// Re-run the configuration and compare records bit-for-bit. A digest
/// mismatch between the trajectory and the supplied configuration is a
/// domain error (unlike runs are not comparable).
bool replay_verify(const Trajectory& traj, const JumpScript& script,
                   const DriverConfig& driver, const RunOptions& options = {});

} // namespace qjump

#endif
