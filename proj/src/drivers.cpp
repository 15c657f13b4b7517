#include "qjump/drivers.hpp"

#include <fstream>
#include <random>
#include <set>

#include <nlohmann/json.hpp>

#include "qjump/rational.hpp"

namespace qjump {

std::string to_string(DriverKind kind) {
    switch (kind) {
        case DriverKind::stochastic: return "stochastic";
        case DriverKind::preassigned: return "preassigned";
        case DriverKind::bitshift: return "bitshift";
        case DriverKind::cosmic_time: return "cosmic_time";
    }
    throw DomainError("unknown driver kind");
}

DriverKind driver_kind_from_string(const std::string& s) {
    if (s == "stochastic") return DriverKind::stochastic;
    if (s == "preassigned") return DriverKind::preassigned;
    if (s == "bitshift") return DriverKind::bitshift;
    if (s == "cosmic_time") return DriverKind::cosmic_time;
    throw SchemaError("unknown driver kind '" + s + "'");
}

mpq_class time_unit(const std::string& selector, const mpq_class& lambda_dimensionless) {
    if (selector == "planck") return 1;
    if (selector == "kappa_lambda") {
        if (lambda_dimensionless <= 0)
            throw DomainError("time_unit: multiplier must be positive");
        return lambda_dimensionless;
    }
    throw DomainError("time_unit: unknown selector '" + selector + "'");
}

InstantSource InstantSource::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("instants: cannot open '" + path + "'");
    InstantSource src;
    src.mode = Mode::explicit_list;
    std::string line;
    while (std::getline(in, line)) {
        auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        auto first = line.find_first_not_of(" \t\r");
        if (first == std::string::npos) continue;
        auto last = line.find_last_not_of(" \t\r");
        src.instants.push_back(rational_from_string(line.substr(first, last - first + 1)));
    }
    return src;
}

namespace {

void validate_instants(const std::vector<mpq_class>& instants) {
    for (std::size_t i = 0; i < instants.size(); ++i) {
        if (instants[i] < 0)
            throw DomainError("instants: values must be >= 0");
        if (i > 0 && instants[i] <= instants[i - 1])
            throw DomainError("instants: values must be strictly increasing");
    }
}

class StochasticDriver final : public Driver {
public:
    StochasticDriver(std::uint64_t entropy_seed, std::size_t resolution)
        : Driver(DriverKind::stochastic), rng_(entropy_seed), resolution_(resolution) {
        if (resolution_ == 0)
            throw DomainError("stochastic driver: resolution must be positive");
    }

    DriverOutput next() override {
        std::vector<bool> bits;
        bits.reserve(resolution_);
        while (bits.size() < resolution_) {
            std::uint64_t w = rng_();
            for (int k = 63; k >= 0 && bits.size() < resolution_; --k)
                bits.push_back((w >> k) & 1u);
        }
        ++cursor_;
        return {UnitReal::from_bits(bits), std::nullopt, std::nullopt};
    }

    std::unique_ptr<Driver> clone() const override {
        return std::make_unique<StochasticDriver>(*this);
    }
    std::optional<std::size_t> remaining() const override { return std::nullopt; }

private:
    std::mt19937_64 rng_;
    std::size_t resolution_;
};

class PreassignedDriver final : public Driver {
public:
    explicit PreassignedDriver(std::vector<UnitReal> list)
        : Driver(DriverKind::preassigned), list_(std::move(list)) {}

    DriverOutput next() override {
        if (cursor_ >= list_.size())
            throw ExhaustionError("preassigned driver: list exhausted after " +
                                  std::to_string(list_.size()) + " values");
        return {list_[cursor_++], std::nullopt, std::nullopt};
    }

    std::unique_ptr<Driver> clone() const override {
        return std::make_unique<PreassignedDriver>(*this);
    }
    std::optional<std::size_t> remaining() const override {
        return list_.size() - cursor_;
    }

private:
    std::vector<UnitReal> list_;
};

class BitshiftDriver final : public Driver {
public:
    BitshiftDriver(UnitReal seed, std::size_t resolution,
                   std::optional<std::size_t> n_jumps)
        : Driver(DriverKind::bitshift), seed_(std::move(seed)), resolution_(resolution) {
        if (resolution_ > 0 && seed_.budget() < resolution_)
            throw ExhaustionError("bitshift driver: seed budget below resolution");
        if (n_jumps && *n_jumps > capacity())
            throw ExhaustionError(
                "bitshift driver: seed budget " + std::to_string(seed_.budget()) +
                " cannot supply " + std::to_string(*n_jumps) + " jumps at resolution " +
                std::to_string(resolution_));
    }

    std::size_t capacity() const {
        return resolution_ > 0 ? seed_.budget() - resolution_ : seed_.budget();
    }

    DriverOutput next() override {
        if (cursor_ >= capacity())
            throw ExhaustionError("bitshift driver: seed bit supply exhausted");
        UnitReal tail = seed_.shift_left(cursor_);
        ++cursor_;
        if (resolution_ > 0) tail = tail.truncate(resolution_);
        return {std::move(tail), std::nullopt, std::nullopt};
    }

    std::unique_ptr<Driver> clone() const override {
        return std::make_unique<BitshiftDriver>(*this);
    }
    std::optional<std::size_t> remaining() const override {
        return capacity() - cursor_;
    }

private:
    UnitReal seed_;
    std::size_t resolution_;
};

class CosmicTimeDriver final : public Driver {
public:
    CosmicTimeDriver(InstantSource instants, mpq_class unit_multiplier,
                     std::size_t resolution)
        : Driver(DriverKind::cosmic_time),
          source_(std::move(instants)),
          multiplier_(std::move(unit_multiplier)),
          resolution_(resolution) {
        if (resolution_ == 0)
            throw DomainError("cosmic_time driver: resolution must be positive");
        if (multiplier_ <= 0)
            throw DomainError("cosmic_time driver: unit multiplier must be positive");
        if (source_.mode == InstantSource::Mode::explicit_list) {
            validate_instants(source_.instants);
        } else {
            if (source_.step <= 0)
                throw DomainError("cosmic_time driver: arithmetic step must be positive");
            if (source_.start < 0)
                throw DomainError("cosmic_time driver: arithmetic start must be >= 0");
        }
    }

    DriverOutput next() override {
        mpq_class t;
        if (source_.mode == InstantSource::Mode::explicit_list) {
            if (cursor_ >= source_.instants.size())
                throw ExhaustionError("cosmic_time driver: instant list exhausted");
            t = source_.instants[cursor_];
        } else {
            t = source_.start + mpq_class(static_cast<unsigned long>(cursor_ + 1)) * source_.step;
        }
        ++cursor_;
        mpq_class tau = t / multiplier_;
        mpz_class m;
        mpz_fdiv_q(m.get_mpz_t(), tau.get_num().get_mpz_t(), tau.get_den().get_mpz_t());
        mpq_class frac = tau - mpq_class(m);
        return {UnitReal::from_rational(frac, resolution_), tau, m};
    }

    std::unique_ptr<Driver> clone() const override {
        return std::make_unique<CosmicTimeDriver>(*this);
    }
    std::optional<std::size_t> remaining() const override {
        if (source_.mode == InstantSource::Mode::explicit_list)
            return source_.instants.size() - cursor_;
        return std::nullopt;
    }

private:
    InstantSource source_;
    mpq_class multiplier_;
    std::size_t resolution_;
};

void check_fields(const nlohmann::json& j, const std::set<std::string>& allowed,
                  const std::string& where) {
    for (const auto& [key, value] : j.items()) {
        (void)value;
        if (!allowed.count(key))
            throw SchemaError(where + ": unknown field '" + key + "'");
    }
}

// (sqrt(5) - 1) / 2 as an exact dyadic rational with 128 fraction bits.
mpq_class golden_conjugate_128() {
    mpz_class five = 5;
    mpz_class scaled;
    mpz_mul_2exp(scaled.get_mpz_t(), five.get_mpz_t(), 2 * 128);
    mpz_class root;
    mpz_sqrt(root.get_mpz_t(), scaled.get_mpz_t());
    mpz_class one_shifted;
    mpz_class one = 1;
    mpz_mul_2exp(one_shifted.get_mpz_t(), one.get_mpz_t(), 128);
    mpz_class den;
    mpz_mul_2exp(den.get_mpz_t(), one.get_mpz_t(), 129);
    mpq_class q(root - one_shifted, den);
    q.canonicalize();
    return q;
}

mpq_class parse_step(const nlohmann::json& j) {
    std::string s = j.get<std::string>();
    if (s == "golden") return golden_conjugate_128();
    return rational_from_string(s);
}

UnitReal parse_list_entry(const std::string& s, std::size_t resolution) {
    if (s.find(':') != std::string::npos) return UnitReal::parse(s);
    return UnitReal::from_rational(rational_from_string(s), resolution);
}

} // namespace

DriverConfig DriverConfig::from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SchemaError("driver: expected a JSON object");
    if (!j.contains("kind")) throw SchemaError("driver: missing 'kind'");
    DriverConfig cfg;
    cfg.kind = driver_kind_from_string(j.at("kind").get<std::string>());
    if (j.contains("resolution")) {
        cfg.resolution = j.at("resolution").get<std::size_t>();
    }
    switch (cfg.kind) {
        case DriverKind::stochastic:
            check_fields(j, {"kind", "resolution", "entropy_seed"}, "driver");
            if (!j.contains("entropy_seed"))
                throw SchemaError("driver: stochastic needs 'entropy_seed'");
            cfg.entropy_seed = j.at("entropy_seed").get<std::uint64_t>();
            break;
        case DriverKind::preassigned: {
            check_fields(j, {"kind", "resolution", "list"}, "driver");
            if (!j.contains("list") || !j.at("list").is_array())
                throw SchemaError("driver: preassigned needs a 'list' array");
            for (const auto& e : j.at("list"))
                cfg.list.push_back(parse_list_entry(e.get<std::string>(), cfg.resolution));
            break;
        }
        case DriverKind::bitshift: {
            check_fields(j, {"kind", "resolution", "seed", "seed_budget"}, "driver");
            if (!j.contains("seed")) throw SchemaError("driver: bitshift needs 'seed'");
            std::string s = j.at("seed").get<std::string>();
            if (s.find(':') != std::string::npos) {
                cfg.seed = UnitReal::parse(s);
            } else {
                std::size_t budget = 4096;
                if (j.contains("seed_budget")) budget = j.at("seed_budget").get<std::size_t>();
                cfg.seed = UnitReal::seed_constant(s, budget);
            }
            break;
        }
        case DriverKind::cosmic_time: {
            check_fields(j, {"kind", "resolution", "instants", "unit_multiplier"}, "driver");
            if (!j.contains("instants") || !j.at("instants").is_object())
                throw SchemaError("driver: cosmic_time needs an 'instants' object");
            const auto& src = j.at("instants");
            std::string mode = src.value("mode", "");
            if (mode == "arithmetic") {
                check_fields(src, {"mode", "start", "step"}, "instants");
                cfg.instants.mode = InstantSource::Mode::arithmetic;
                cfg.instants.start = src.contains("start")
                                         ? rational_from_string(src.at("start").get<std::string>())
                                         : mpq_class(0);
                if (!src.contains("step"))
                    throw SchemaError("instants: arithmetic mode needs 'step'");
                cfg.instants.step = parse_step(src.at("step"));
            } else if (mode == "explicit-list") {
                check_fields(src, {"mode", "instants", "file"}, "instants");
                cfg.instants.mode = InstantSource::Mode::explicit_list;
                if (src.contains("file")) {
                    cfg.instants = InstantSource::from_file(src.at("file").get<std::string>());
                } else if (src.contains("instants")) {
                    for (const auto& e : src.at("instants"))
                        cfg.instants.instants.push_back(
                            rational_from_string(e.get<std::string>()));
                } else {
                    throw SchemaError("instants: explicit-list needs 'instants' or 'file'");
                }
            } else {
                throw SchemaError("instants: mode must be 'arithmetic' or 'explicit-list'");
            }
            if (j.contains("unit_multiplier"))
                cfg.unit_multiplier =
                    rational_from_string(j.at("unit_multiplier").get<std::string>());
            break;
        }
    }
    return cfg;
}

nlohmann::json DriverConfig::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["resolution"] = resolution;
    switch (kind) {
        case DriverKind::stochastic:
            j["entropy_seed"] = entropy_seed;
            break;
        case DriverKind::preassigned: {
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& r : list) arr.push_back(r.serialize());
            j["list"] = arr;
            break;
        }
        case DriverKind::bitshift:
            j["seed"] = seed ? seed->serialize() : "";
            break;
        case DriverKind::cosmic_time: {
            nlohmann::json src;
            if (instants.mode == InstantSource::Mode::arithmetic) {
                src["mode"] = "arithmetic";
                src["start"] = rational_to_string(instants.start);
                src["step"] = rational_to_string(instants.step);
            } else {
                src["mode"] = "explicit-list";
                nlohmann::json arr = nlohmann::json::array();
                for (const auto& t : instants.instants) arr.push_back(rational_to_string(t));
                src["instants"] = arr;
            }
            j["instants"] = src;
            j["unit_multiplier"] = rational_to_string(unit_multiplier);
            break;
        }
    }
    return j;
}

std::unique_ptr<Driver> make_driver(const DriverConfig& config,
                                    std::optional<std::size_t> n_jumps) {
    switch (config.kind) {
        case DriverKind::stochastic:
            return std::make_unique<StochasticDriver>(config.entropy_seed, config.resolution);
        case DriverKind::preassigned:
            return std::make_unique<PreassignedDriver>(config.list);
        case DriverKind::bitshift:
            if (!config.seed) throw DomainError("bitshift driver: no seed configured");
            return std::make_unique<BitshiftDriver>(*config.seed, config.resolution, n_jumps);
        case DriverKind::cosmic_time:
            return std::make_unique<CosmicTimeDriver>(config.instants, config.unit_multiplier,
                                                      config.resolution);
    }
    throw DomainError("make_driver: unknown kind");
}

} // namespace qjump
