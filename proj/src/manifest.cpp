#include "qjump/manifest.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include <nlohmann/json.hpp>

namespace qjump {

RunManifest RunManifest::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("manifest: expected a JSON object");
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "schema_version" && key != "script" && key != "driver" && key != "n_jumps" &&
            key != "options" && key != "output" && key != "scalar_mode")
            throw SchemaError("manifest: unknown field '" + key + "'");
    }
    RunManifest m;
    if (!j.contains("schema_version"))
        throw SchemaError("manifest: missing 'schema_version'");
    m.schema_version = j.at("schema_version").get<int>();
    if (m.schema_version != 1)
        throw SchemaError("manifest: unsupported schema_version " +
                          std::to_string(m.schema_version));
    if (!j.contains("script")) throw SchemaError("manifest: missing 'script'");
    m.script = JumpScript::from_json(j.at("script"));
    if (!j.contains("driver")) throw SchemaError("manifest: missing 'driver'");
    m.driver = DriverConfig::from_json(j.at("driver"));
    if (!j.contains("n_jumps")) throw SchemaError("manifest: missing 'n_jumps'");
    const auto& nj = j.at("n_jumps");
    if (nj.is_string()) {
        if (nj.get<std::string>() != "until-exhaustion")
            throw SchemaError("manifest: n_jumps must be a count or 'until-exhaustion'");
    } else {
        m.script.n_jumps = nj.get<std::size_t>();
    }
    if (j.contains("options")) m.options = RunOptions::from_json(j.at("options"));
    if (j.contains("output")) m.output = j.at("output").get<std::string>();
    if (j.contains("scalar_mode")) {
        std::string mode = j.at("scalar_mode").get<std::string>();
        if (mode != "float" && mode != "exact")
            throw SchemaError("manifest: scalar_mode must be 'float' or 'exact'");
        if (mode == "exact" && !m.exact())
            throw SchemaError("manifest: scalar_mode 'exact' but payload holds floats; "
                              "use fraction strings");
    }
    m.script.validate();
    return m;
}

RunManifest RunManifest::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("manifest: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw SchemaError("manifest: " + std::string(e.what()));
    }
    return from_json(j);
}

bool RunManifest::exact() const {
    for (const auto& s : script.states)
        if (!s.exact()) return false;
    for (const auto& d : script.distributions)
        if (!d.exact()) return false;
    return true;
}

SimulateResult run_simulate(const RunManifest& manifest, const std::string& out_dir_override,
                            std::ostream& summary) {
    if (manifest.output.empty())
        throw SchemaError("manifest: simulate needs an 'output' path");
    std::filesystem::path out_path(manifest.output);
    if (!out_dir_override.empty())
        out_path = std::filesystem::path(out_dir_override) / out_path.filename();

    // Fail fast on driver construction (e.g. a bitshift seed too small for
    // the requested jump count) before any file is touched.
    try {
        make_driver(manifest.driver, manifest.script.n_jumps);
    } catch (const ExhaustionError& e) {
        summary << "exhaustion precheck failed: " << e.what() << '\n';
        return {kExitExhaustion, out_path.string(), {}};
    }

    Trajectory traj = run(manifest.script, manifest.driver, manifest.options);

    std::ofstream out(out_path);
    if (!out) throw Error("cannot open output file '" + out_path.string() + "'");
    traj.write_ndjson(out);
    out.close();

    // Wall-clock metadata lives in a sidecar so the data file stays
    // byte-reproducible.
    std::ofstream meta(out_path.string() + ".meta.json");
    if (meta) {
        auto now = std::chrono::system_clock::now().time_since_epoch();
        nlohmann::json side{
            {"written_unix_ms",
             std::chrono::duration_cast<std::chrono::milliseconds>(now).count()},
            {"config_digest", traj.config_digest}};
        meta << side.dump() << '\n';
    }

    std::map<int, std::size_t> histogram;
    for (const auto& rec : traj.records) ++histogram[rec.outcome_basis];
    summary << "records: " << traj.records.size() << '\n';
    summary << "outcomes:";
    for (const auto& [outcome, count] : histogram)
        summary << ' ' << outcome << ':' << count;
    summary << '\n';
    summary << "config_digest: " << traj.config_digest << '\n';
    if (traj.exhausted_at) {
        summary << "exhausted at jump " << *traj.exhausted_at << " (partial trajectory)\n";
        return {kExitExhaustion, out_path.string(), std::move(traj)};
    }
    return {kExitOk, out_path.string(), std::move(traj)};
}

} // namespace qjump
