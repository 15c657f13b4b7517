#include "qjump/jump_process.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <openssl/evp.h>

#include "qjump/rational.hpp"

namespace qjump {

namespace {

std::string sha256_hex(const std::string& data) {
    unsigned char digest[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, digest, &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw Error("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    static const char* hexdig = "0123456789abcdef";
    std::string out;
    out.reserve(2 * len);
    for (unsigned i = 0; i < len; ++i) {
        out += hexdig[digest[i] >> 4];
        out += hexdig[digest[i] & 0xf];
    }
    return out;
}

const char* mode_name(JumpScript::Mode m) {
    switch (m) {
        case JumpScript::Mode::fixed_state: return "fixed-state";
        case JumpScript::Mode::state_list: return "state-list";
        case JumpScript::Mode::fixed_distribution: return "fixed-distribution";
        case JumpScript::Mode::distribution_list: return "distribution-list";
    }
    throw DomainError("unknown script mode");
}

JumpScript::Mode mode_from_name(const std::string& s) {
    if (s == "fixed-state") return JumpScript::Mode::fixed_state;
    if (s == "state-list") return JumpScript::Mode::state_list;
    if (s == "fixed-distribution") return JumpScript::Mode::fixed_distribution;
    if (s == "distribution-list") return JumpScript::Mode::distribution_list;
    throw SchemaError("unknown script mode '" + s + "'");
}

} // namespace

void JumpScript::validate() const {
    bool uses_states = mode == Mode::fixed_state || mode == Mode::state_list;
    const std::size_t count = uses_states ? states.size() : distributions.size();
    if (count == 0) throw DomainError("script: empty payload");
    if (n_jumps && *n_jumps == 0) throw DomainError("script: n_jumps must be >= 1");
    bool is_list = mode == Mode::state_list || mode == Mode::distribution_list;
    if (is_list && n_jumps && count < *n_jumps)
        throw DomainError("script: list shorter than n_jumps");
    if (!is_list && count != 1)
        throw DomainError("script: fixed mode takes exactly one payload entry");
}

JumpScript JumpScript::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("script: expected a JSON object");
    JumpScript s;
    if (!j.contains("mode")) throw SchemaError("script: missing 'mode'");
    s.mode = mode_from_name(j.at("mode").get<std::string>());
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "mode" && key != "state" && key != "states" && key != "distribution" &&
            key != "distributions")
            throw SchemaError("script: unknown field '" + key + "'");
    }
    switch (s.mode) {
        case Mode::fixed_state:
            if (!j.contains("state")) throw SchemaError("script: fixed-state needs 'state'");
            s.states.push_back(StateVector::from_json(j.at("state")));
            break;
        case Mode::state_list:
            if (!j.contains("states")) throw SchemaError("script: state-list needs 'states'");
            for (const auto& e : j.at("states")) s.states.push_back(StateVector::from_json(e));
            break;
        case Mode::fixed_distribution:
            if (!j.contains("distribution"))
                throw SchemaError("script: fixed-distribution needs 'distribution'");
            s.distributions.push_back(DiscreteDistribution::from_json(j.at("distribution")));
            break;
        case Mode::distribution_list:
            if (!j.contains("distributions"))
                throw SchemaError("script: distribution-list needs 'distributions'");
            for (const auto& e : j.at("distributions"))
                s.distributions.push_back(DiscreteDistribution::from_json(e));
            break;
    }
    return s;
}

nlohmann::json JumpScript::to_json() const {
    nlohmann::json j;
    j["mode"] = mode_name(mode);
    switch (mode) {
        case Mode::fixed_state:
            j["state"] = states.at(0).to_json();
            break;
        case Mode::state_list: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& s : states) arr.push_back(s.to_json());
            j["states"] = arr;
            break;
        }
        case Mode::fixed_distribution:
            j["distribution"] = distributions.at(0).to_json();
            break;
        case Mode::distribution_list: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& d : distributions) arr.push_back(d.to_json());
            j["distributions"] = arr;
            break;
        }
    }
    return j;
}

nlohmann::json RunOptions::to_json() const {
    nlohmann::json j;
    j["ordering"] = canonical ? "canonical" : "basis";
    if (derivative_hints) j["derivative_hints"] = *derivative_hints;
    return j;
}

RunOptions RunOptions::from_json(const nlohmann::json& j) {
    RunOptions opt;
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (key != "ordering" && key != "derivative_hints")
            throw SchemaError("options: unknown field '" + key + "'");
    }
    if (j.contains("ordering")) {
        std::string o = j.at("ordering").get<std::string>();
        if (o == "canonical") opt.canonical = true;
        else if (o == "basis") opt.canonical = false;
        else throw SchemaError("options: ordering must be 'canonical' or 'basis'");
    }
    if (j.contains("derivative_hints"))
        opt.derivative_hints = j.at("derivative_hints").get<std::vector<double>>();
    return opt;
}

std::string config_digest(const JumpScript& script, const DriverConfig& driver,
                          const RunOptions& options) {
    nlohmann::json j;
    j["script"] = script.to_json();
    j["driver"] = driver.to_json();
    j["options"] = options.to_json();
    if (script.n_jumps) j["n_jumps"] = *script.n_jumps;
    else j["n_jumps"] = "until-exhaustion";
    return sha256_hex(j.dump());
}

nlohmann::json JumpRecord::to_json() const {
    nlohmann::json rec;
    rec["type"] = "record";
    rec["j"] = j;
    rec["r"] = r.serialize();
    rec["probs"] = probs.to_json();
    rec["perm"] = permutation;
    rec["outcome"] = outcome_basis;
    rec["outcome_canonical"] = outcome_canonical;
    if (tau) rec["tau"] = rational_to_string(*tau);
    if (m) rec["m"] = m->get_str();
    return rec;
}

JumpRecord JumpRecord::from_json(const nlohmann::json& rec) {
    JumpRecord out{0, UnitReal::from_bit_string("0"), DiscreteDistribution::from_reals({0.5, 0.5}),
                   {}, 0, 0, std::nullopt, std::nullopt};
    out.j = rec.at("j").get<std::size_t>();
    out.r = UnitReal::parse(rec.at("r").get<std::string>());
    out.probs = DiscreteDistribution::from_json(rec.at("probs"));
    out.permutation = rec.at("perm").get<std::vector<int>>();
    out.outcome_basis = rec.at("outcome").get<int>();
    out.outcome_canonical = rec.at("outcome_canonical").get<int>();
    if (rec.contains("tau")) out.tau = rational_from_string(rec.at("tau").get<std::string>());
    if (rec.contains("m")) out.m = mpz_class(rec.at("m").get<std::string>());
    return out;
}

bool JumpRecord::operator==(const JumpRecord& other) const {
    return to_json() == other.to_json();
}

Trajectory run(const JumpScript& script, const DriverConfig& driver,
               const RunOptions& options) {
    script.validate();
    auto drv = make_driver(driver, script.n_jumps);
    Trajectory traj;
    traj.config_digest = config_digest(script, driver, options);
    traj.driver_kind = driver.kind;
    bool uses_states =
        script.mode == JumpScript::Mode::fixed_state || script.mode == JumpScript::Mode::state_list;
    bool is_list = script.mode == JumpScript::Mode::state_list ||
                   script.mode == JumpScript::Mode::distribution_list;
    std::size_t limit;
    if (script.n_jumps) {
        limit = *script.n_jumps;
    } else if (is_list) {
        limit = uses_states ? script.states.size() : script.distributions.size();
    } else if (auto rem = drv->remaining()) {
        limit = *rem;
    } else {
        throw DomainError("run: unbounded script over an inexhaustible driver");
    }
    const std::vector<double>* hints =
        options.derivative_hints ? &*options.derivative_hints : nullptr;
    for (std::size_t j = 1; j <= limit; ++j) {
        DriverOutput out{UnitReal::from_bit_string("0"), std::nullopt, std::nullopt};
        try {
            out = drv->next();
        } catch (const ExhaustionError&) {
            traj.exhausted_at = j;
            break;
        }
        JumpRecord rec{j, out.r, DiscreteDistribution::from_reals({0.5, 0.5}),
                       {}, 0, 0, std::move(out.tau), std::move(out.m)};
        try {
            std::size_t idx = is_list ? j - 1 : 0;
            if (uses_states) {
                ReduceOptions ropt{hints, options.canonical};
                ReductionEvent ev = reduce(script.states[idx], out.r, ropt);
                rec.probs = std::move(ev.probs);
                rec.permutation = std::move(ev.ordering.permutation);
                rec.outcome_canonical = ev.outcome_canonical;
                rec.outcome_basis = ev.outcome_basis;
            } else {
                const DiscreteDistribution& dist = script.distributions[idx];
                OutcomeOrdering ord;
                if (options.canonical) {
                    ord = canonical_order(dist, hints);
                } else {
                    for (std::size_t i = 1; i <= dist.size(); ++i)
                        ord.permutation.push_back(static_cast<int>(i));
                }
                CumulativePartition part = partition(apply_ordering(dist, ord));
                rec.outcome_canonical = select_outcome(part, out.r);
                rec.outcome_basis = ord.permutation[rec.outcome_canonical - 1];
                rec.probs = dist;
                rec.permutation = std::move(ord.permutation);
            }
        } catch (const ExhaustionError&) {
            // r's budget could not separate it from a boundary.
            traj.exhausted_at = j;
            break;
        }
        traj.records.push_back(std::move(rec));
    }
    return traj;
}

bool replay_verify(const Trajectory& traj, const JumpScript& script,
                   const DriverConfig& driver, const RunOptions& options) {
    std::string digest = config_digest(script, driver, options);
    if (digest != traj.config_digest)
        throw DomainError("replay_verify: config digest mismatch, refusing to compare");
    Trajectory again = run(script, driver, options);
    if (again.records.size() != traj.records.size()) return false;
    if (again.exhausted_at != traj.exhausted_at) return false;
    for (std::size_t i = 0; i < traj.records.size(); ++i)
        if (!(again.records[i] == traj.records[i])) return false;
    return true;
}

void Trajectory::write_ndjson(std::ostream& out) const {
    nlohmann::json header;
    header["type"] = "header";
    header["schema_version"] = 1;
    header["config_digest"] = config_digest;
    header["driver_kind"] = to_string(driver_kind);
    out << header.dump() << '\n';
    for (const auto& rec : records) out << rec.to_json().dump() << '\n';
    if (exhausted_at) {
        nlohmann::json marker;
        marker["type"] = "exhaustion";
        marker["at_j"] = *exhausted_at;
        out << marker.dump() << '\n';
    }
}

Trajectory Trajectory::read_ndjson(std::istream& in) {
    Trajectory traj;
    std::string line;
    long lineno = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty()) continue;
        nlohmann::json j;
        try {
            j = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("trajectory: bad JSON: ") + e.what(), lineno);
        }
        try {
            std::string type = j.value("type", "");
            if (type == "header") {
                if (have_header) throw SchemaError("trajectory: duplicate header", lineno);
                have_header = true;
                traj.config_digest = j.at("config_digest").get<std::string>();
                traj.driver_kind = driver_kind_from_string(j.at("driver_kind").get<std::string>());
            } else if (type == "record") {
                if (!have_header) throw SchemaError("trajectory: record before header", lineno);
                JumpRecord rec = JumpRecord::from_json(j);
                std::size_t expected = traj.records.size() + 1;
                if (rec.j != expected)
                    throw SchemaError("trajectory: records not contiguous from 1", lineno);
                traj.records.push_back(std::move(rec));
            } else if (type == "exhaustion") {
                traj.exhausted_at = j.at("at_j").get<std::size_t>();
            } else {
                throw SchemaError("trajectory: unknown line type '" + type + "'", lineno);
            }
        } catch (const nlohmann::json::exception& e) {
            throw SchemaError(std::string("trajectory: ") + e.what(), lineno);
        }
    }
    if (!have_header) throw SchemaError("trajectory: missing header", lineno);
    return traj;
}

void Trajectory::write_csv(std::ostream& out) const {
    out << "j,r,outcome,tau\n";
    for (const auto& rec : records) {
        out << rec.j << ',' << rec.r.serialize() << ',' << rec.outcome_basis << ',';
        if (rec.tau) out << rational_to_string(*rec.tau);
        out << '\n';
    }
}

} // namespace qjump
