#ifndef QJUMP_MANIFEST_HPP
#define QJUMP_MANIFEST_HPP

#include <iosfwd>
#include <string>

#include <nlohmann/json_fwd.hpp>

#include "qjump/jump_process.hpp"

namespace qjump {

/// Exit codes shared by the CLI: 0 success, 2 validation, 3 exhaustion.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitExhaustion = 3;

/// A validated simulation request. Strict: unknown fields are rejected so
/// config digests stay meaningful.
struct RunManifest {
    int schema_version = 1;
    JumpScript script;
    DriverConfig driver;
    RunOptions options;
    std::string output; // trajectory file path

    static RunManifest from_json(const nlohmann::json& j);
    static RunManifest load(const std::string& path);

    /// True when the script payload carries exact rationals throughout.
    bool exact() const;
};

struct SimulateResult {
    int exit_code = kExitOk;
    std::string output_path;
    Trajectory trajectory;
};

/// Validate, run, and write the trajectory (plus a small sidecar with the
/// wall-clock metadata, kept out of the data file). Never leaves a partial
/// file behind on validation failure; a mid-run exhaustion writes the partial
/// trajectory with its exhaustion marker and reports kExitExhaustion.
SimulateResult run_simulate(const RunManifest& manifest, const std::string& out_dir_override,
                            std::ostream& summary);

} // namespace qjump

#endif
