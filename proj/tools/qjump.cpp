#include <cstdlib>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "qjump/manifest.hpp"
#include "qjump/statistics.hpp"

namespace {

using namespace qjump;

int do_simulate(const std::string& manifest_path, std::size_t resolution_override,
                bool force_exact) {
    RunManifest manifest = RunManifest::load(manifest_path);
    if (resolution_override > 0) manifest.driver.resolution = resolution_override;
    if (force_exact && !manifest.exact()) {
        std::cerr << "error: --exact requested but the script payload holds floats; "
                     "use fraction strings\n";
        return kExitValidation;
    }
    const char* out_dir = std::getenv("QJUMP_OUT_DIR");
    SimulateResult result =
        run_simulate(manifest, out_dir ? out_dir : "", std::cout);
    return result.exit_code;
}

int do_seed(const std::string& name, std::size_t bits, const std::string& out_path) {
    UnitReal seed = UnitReal::seed_constant(name, bits);
    std::ofstream out(out_path);
    if (!out) {
        std::cerr << "error: cannot open '" << out_path << "'\n";
        return kExitValidation;
    }
    out << seed.serialize() << '\n';
    std::cout << "wrote " << bits << " bits of " << name << " to " << out_path << '\n';
    return kExitOk;
}

Trajectory load_trajectory(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw SchemaError("cannot open trajectory '" + path + "'");
    return Trajectory::read_ndjson(in);
}

int do_analyze(const std::string& path, const std::string& second_path) {
    Trajectory traj = load_trajectory(path);
    if (traj.records.empty()) {
        std::cerr << "error: trajectory holds no records\n";
        return kExitValidation;
    }

    auto freq = frequency_reports(traj);
    std::cout << "== frequency ==\n";
    for (const auto& rep : freq) std::cout << rep.to_text();
    std::vector<UnitReal> rs;
    rs.reserve(traj.records.size());
    for (const auto& rec : traj.records) rs.push_back(rec.r);
    nlohmann::json report{{"frequency", nlohmann::json::array()}};
    for (const auto& rep : freq) report["frequency"].push_back(rep.to_json());
    if (rs.size() >= 2) {
        UniformityReport uni = uniformity_report(rs);
        std::cout << "== uniformity ==\n" << uni.to_text();
        report["uniformity"] = uni.to_json();
    }
    std::ofstream rep_out(path + ".report.json");
    if (rep_out) rep_out << report.dump(2) << '\n';

    if (!second_path.empty()) {
        Trajectory other = load_trajectory(second_path);
        bool verdict = traj.config_digest == other.config_digest &&
                       traj.records.size() == other.records.size() &&
                       traj.exhausted_at == other.exhausted_at;
        std::size_t first_divergence = 0;
        std::size_t common = std::min(traj.records.size(), other.records.size());
        for (std::size_t i = 0; i < common; ++i) {
            if (!(traj.records[i] == other.records[i])) {
                verdict = false;
                first_divergence = traj.records[i].j;
                break;
            }
        }
        std::cout << "== replay ==\nverdict: " << (verdict ? "true" : "false") << '\n';
        if (!verdict && first_divergence > 0)
            std::cout << "first divergence at j=" << first_divergence << '\n';
    }
    return kExitOk;
}

int do_retro(std::size_t dim) {
    RetrodictionWitness w = retrodiction_witness(1, dim);
    std::cout << "outcome: " << w.outcome << "\nr: " << w.r.serialize() << '\n';
    auto show = [&](const char* label, const StateVector& s) {
        std::cout << label << ": " << s.to_json().dump() << '\n';
        ReductionEvent ev = reduce(s, w.r);
        std::cout << "  probs " << ev.probs.to_json().dump() << " -> outcome "
                  << ev.outcome_basis << " (canonical slot " << ev.outcome_canonical << ")\n";
        if (ev.outcome_basis != w.outcome) throw Error("witness failed verification");
    };
    show("state A", w.first);
    show("state B", w.second);
    std::cout << "distinct pre-states, same record: retrodiction is ambiguous\n";
    return kExitOk;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"quantum jump dynamics simulator"};
    app.require_subcommand(1);

    std::size_t resolution = 0;
    bool exact = false;
    app.add_option("--resolution", resolution, "per-jump selection resolution in bits");
    app.add_flag("--exact", exact, "require exact rational mode");

    std::string manifest_path;
    auto* sim = app.add_subcommand("simulate", "run a manifest and write a trajectory");
    sim->add_option("manifest", manifest_path, "manifest JSON path")->required();

    std::string seed_name, seed_out;
    std::size_t seed_bits = 0;
    auto* seed = app.add_subcommand("seed", "write a named seed constant");
    seed->add_option("name", seed_name, "champernowne2 | sqrt2_frac | pi_frac")->required();
    seed->add_option("bits", seed_bits, "bit budget")->required();
    seed->add_option("out", seed_out, "output file")->required();

    std::string traj_path, traj2_path;
    auto* analyze = app.add_subcommand("analyze", "report on a trajectory file");
    analyze->add_option("trajectory", traj_path, "trajectory NDJSON path")->required();
    analyze->add_option("trajectory2", traj2_path, "second trajectory to diff");

    std::size_t retro_dim = 0;
    auto* retro = app.add_subcommand("retro", "demonstrate retrodiction ambiguity");
    retro->add_option("dimension", retro_dim, "state dimension (>= 2)")->required();

    try {
        app.parse(argc, argv);
        if (sim->parsed()) return do_simulate(manifest_path, resolution, exact);
        if (seed->parsed()) {
            if (seed_bits == 0) {
                std::cerr << "error: bit budget must be positive\n";
                return qjump::kExitValidation;
            }
            return do_seed(seed_name, seed_bits, seed_out);
        }
        if (analyze->parsed()) return do_analyze(traj_path, traj2_path);
        if (retro->parsed()) return do_retro(retro_dim);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? qjump::kExitOk : qjump::kExitValidation;
    } catch (const qjump::ExhaustionError& e) {
        std::cerr << "exhaustion: " << e.what() << '\n';
        return qjump::kExitExhaustion;
    } catch (const qjump::Error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return qjump::kExitValidation;
    }
    return qjump::kExitValidation;
}
