#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "qjump/jump_process.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct CliResult {
    int exit_code = -1;
    std::string output; // stdout and stderr combined
};

const fs::path& work_dir() {
    static fs::path dir = [] {
        fs::path d = fs::temp_directory_path() / "qjump_cli_tests";
        fs::remove_all(d);
        fs::create_directories(d);
        return d;
    }();
    return dir;
}

CliResult run_cli(const std::string& args, const std::string& env_prefix = "") {
    fs::path log = work_dir() / "cli_output.txt";
    std::string cmd = env_prefix + " \"" + QJUMP_CLI_PATH + "\" " + args + " > \"" +
                      log.string() + "\" 2>&1";
    int status = std::system(cmd.c_str());
    CliResult res;
    res.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    std::ifstream in(log);
    std::ostringstream buf;
    buf << in.rdbuf();
    res.output = buf.str();
    return res;
}

std::string write_file(const std::string& name, const std::string& content) {
    fs::path p = work_dir() / name;
    std::ofstream out(p);
    out << content;
    return p.string();
}

std::string read_file(const fs::path& p) {
    std::ifstream in(p);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

std::string basic_manifest(const std::string& output_name) {
    json m{{"schema_version", 1},
           {"script", {{"mode", "fixed-distribution"},
                       {"distribution", {"1/2", "3/10", "1/5"}}}},
           {"driver", {{"kind", "preassigned"},
                       {"resolution", 24},
                       {"list", {"1/10", "3/5", "19/20"}}}},
           {"n_jumps", 3},
           {"scalar_mode", "exact"},
           {"output", (work_dir() / output_name).string()}};
    return m.dump(2);
}

} // namespace

TEST_CASE("help and argument validation") {
    CHECK(run_cli("--help").exit_code == 0);
    CHECK(run_cli("").exit_code == 2);
    CHECK(run_cli("frobnicate").exit_code == 2);
    CHECK(run_cli("simulate").exit_code == 2); // missing manifest argument
}

TEST_CASE("seed subcommand writes serialized constants") {
    fs::path out = work_dir() / "seed.txt";
    auto res = run_cli("seed champernowne2 12 \"" + out.string() + "\"");
    CHECK(res.exit_code == 0);
    CHECK(read_file(out) == "12:DCB\n");

    CHECK(run_cli("seed e_frac 8 \"" + out.string() + "\"").exit_code == 2);
    CHECK(run_cli("seed champernowne2 0 \"" + out.string() + "\"").exit_code == 2);
}

TEST_CASE("simulate runs a manifest and reports the outcomes") {
    std::string manifest = write_file("basic.json", basic_manifest("basic.ndjson"));
    auto res = run_cli("simulate \"" + manifest + "\"");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("records: 3") != std::string::npos);
    CHECK(res.output.find("outcomes: 1:1 2:1 3:1") != std::string::npos);
    CHECK(res.output.find("config_digest: ") != std::string::npos);

    std::ifstream traj_in(work_dir() / "basic.ndjson");
    auto traj = qjump::Trajectory::read_ndjson(traj_in);
    REQUIRE(traj.records.size() == 3);
    CHECK(traj.records[0].outcome_basis == 1);
    CHECK(traj.records[1].outcome_basis == 2);
    CHECK(traj.records[2].outcome_basis == 3);

    // Wall-clock data lives only in the sidecar.
    std::string data = read_file(work_dir() / "basic.ndjson");
    CHECK(data.find("written_unix_ms") == std::string::npos);
    auto meta = json::parse(read_file(work_dir() / "basic.ndjson.meta.json"));
    CHECK(meta.at("config_digest") == traj.config_digest);
    CHECK(meta.contains("written_unix_ms"));
}

TEST_CASE("repeated simulate runs are byte-identical") {
    std::string manifest = write_file("repeat.json", basic_manifest("repeat.ndjson"));
    REQUIRE(run_cli("simulate \"" + manifest + "\"").exit_code == 0);
    std::string first = read_file(work_dir() / "repeat.ndjson");
    REQUIRE(run_cli("simulate \"" + manifest + "\"").exit_code == 0);
    CHECK(read_file(work_dir() / "repeat.ndjson") == first);
    CHECK_FALSE(first.empty());
}

TEST_CASE("QJUMP_OUT_DIR redirects the trajectory file") {
    fs::path alt = work_dir() / "alt_out";
    fs::create_directories(alt);
    std::string manifest = write_file("redirect.json", basic_manifest("redirect.ndjson"));
    auto res = run_cli("simulate \"" + manifest + "\"",
                       "QJUMP_OUT_DIR=\"" + alt.string() + "\"");
    CHECK(res.exit_code == 0);
    CHECK(fs::exists(alt / "redirect.ndjson"));
}

TEST_CASE("simulate rejects invalid manifests") {
    std::string bad = write_file("bad.json", R"({"schema_version": 1})");
    CHECK(run_cli("simulate \"" + bad + "\"").exit_code == 2);

    json zero = json::parse(basic_manifest("zero.ndjson"));
    zero["n_jumps"] = 0;
    CHECK(run_cli("simulate \"" + write_file("zero.json", zero.dump()) + "\"").exit_code == 2);

    json unknown = json::parse(basic_manifest("unknown.ndjson"));
    unknown["surprise"] = true;
    CHECK(run_cli("simulate \"" + write_file("unknown.json", unknown.dump()) + "\"").exit_code ==
          2);

    json v2 = json::parse(basic_manifest("v2.ndjson"));
    v2["schema_version"] = 2;
    CHECK(run_cli("simulate \"" + write_file("v2.json", v2.dump()) + "\"").exit_code == 2);

    CHECK(run_cli("simulate \"" + (work_dir() / "missing.json").string() + "\"").exit_code == 2);
}

TEST_CASE("bitshift budget shortfall fails before writing any file") {
    json m{{"schema_version", 1},
           {"script", {{"mode", "fixed-distribution"}, {"distribution", {"1/2", "1/2"}}}},
           {"driver", {{"kind", "bitshift"},
                       {"seed", "champernowne2"},
                       {"seed_budget", 10},
                       {"resolution", 64}}},
           {"n_jumps", 100},
           {"output", (work_dir() / "shortfall.ndjson").string()}};
    auto res = run_cli("simulate \"" + write_file("shortfall.json", m.dump()) + "\"");
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("exhaustion precheck failed") != std::string::npos);
    CHECK_FALSE(fs::exists(work_dir() / "shortfall.ndjson"));
}

TEST_CASE("mid-run exhaustion keeps the partial trajectory and exits 3") {
    json m = json::parse(basic_manifest("partial.ndjson"));
    m["n_jumps"] = "until-exhaustion";
    m["driver"]["list"] = {"1/10", "2/3"}; // budget 24 cannot separate trunc(2/3) from 2/3
    m["script"]["distribution"] = {"2/3", "1/3"};
    auto res = run_cli("simulate \"" + write_file("partial.json", m.dump()) + "\"");
    CHECK(res.exit_code == 3);
    CHECK(res.output.find("exhausted at jump 2") != std::string::npos);
    std::ifstream in(work_dir() / "partial.ndjson");
    auto traj = qjump::Trajectory::read_ndjson(in);
    CHECK(traj.records.size() == 1);
    CHECK(traj.exhausted_at == std::size_t{2});
}

TEST_CASE("--exact rejects float payloads") {
    json m = json::parse(basic_manifest("floats.ndjson"));
    m.erase("scalar_mode");
    m["script"]["distribution"] = {0.5, 0.3, 0.2};
    std::string path = write_file("floats.json", m.dump());
    CHECK(run_cli("simulate \"" + path + "\"").exit_code == 0);
    auto res = run_cli("--exact simulate \"" + path + "\"");
    CHECK(res.exit_code == 2);
    CHECK(res.output.find("--exact") != std::string::npos);
}

TEST_CASE("--resolution overrides the driver resolution") {
    json m{{"schema_version", 1},
           {"script", {{"mode", "fixed-distribution"}, {"distribution", {"1/2", "1/2"}}}},
           {"driver", {{"kind", "stochastic"}, {"entropy_seed", 11}, {"resolution", 16}}},
           {"n_jumps", 2},
           {"output", (work_dir() / "res.ndjson").string()}};
    std::string path = write_file("res.json", m.dump());
    REQUIRE(run_cli("--resolution 24 simulate \"" + path + "\"").exit_code == 0);
    std::ifstream in(work_dir() / "res.ndjson");
    auto traj = qjump::Trajectory::read_ndjson(in);
    REQUIRE(traj.records.size() == 2);
    CHECK(traj.records[0].r.budget() == 24);
}

TEST_CASE("analyze reports on a trajectory and writes a JSON report") {
    std::string manifest = write_file("analyze.json", basic_manifest("analyze.ndjson"));
    REQUIRE(run_cli("simulate \"" + manifest + "\"").exit_code == 0);
    fs::path traj = work_dir() / "analyze.ndjson";
    auto res = run_cli("analyze \"" + traj.string() + "\"");
    CHECK(res.exit_code == 0);
    CHECK(res.output.find("== frequency ==") != std::string::npos);
    CHECK(res.output.find("== uniformity ==") != std::string::npos);
    auto report = json::parse(read_file(traj.string() + ".report.json"));
    CHECK(report.contains("frequency"));
    CHECK(report.at("uniformity").at("n") == 3);

    CHECK(run_cli("analyze \"" + (work_dir() / "nope.ndjson").string() + "\"").exit_code == 2);
}

TEST_CASE("analyze diffs two trajectories") {
    std::string manifest = write_file("diff.json", basic_manifest("diff.ndjson"));
    REQUIRE(run_cli("simulate \"" + manifest + "\"").exit_code == 0);
    fs::path a = work_dir() / "diff.ndjson";
    fs::path b = work_dir() / "diff_copy.ndjson";
    fs::copy_file(a, b, fs::copy_options::overwrite_existing);

    auto same = run_cli("analyze \"" + a.string() + "\" \"" + b.string() + "\"");
    CHECK(same.exit_code == 0);
    CHECK(same.output.find("verdict: true") != std::string::npos);

    // Flip the second record's outcome.
    std::ifstream in(a);
    std::ostringstream tampered;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (lineno == 3) {
            json rec = json::parse(line);
            rec["outcome"] = 1;
            line = rec.dump();
        }
        tampered << line << '\n';
    }
    std::ofstream(b) << tampered.str();
    auto diff = run_cli("analyze \"" + a.string() + "\" \"" + b.string() + "\"");
    CHECK(diff.exit_code == 0);
    CHECK(diff.output.find("verdict: false") != std::string::npos);
    CHECK(diff.output.find("first divergence at j=2") != std::string::npos);
}

TEST_CASE("retro prints a verified ambiguity witness") {
    for (int dim : {2, 6}) {
        auto res = run_cli("retro " + std::to_string(dim));
        CHECK(res.exit_code == 0);
        CHECK(res.output.find("outcome: 1") != std::string::npos);
        CHECK(res.output.find("retrodiction is ambiguous") != std::string::npos);
    }
    CHECK(run_cli("retro 1").exit_code == 2);
}
