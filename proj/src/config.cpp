#include "lcdr/config.hpp"

#include <fstream>

#include <json.hpp>

#include "lcdr/errors.hpp"

namespace lcdr {

namespace {

using nlohmann::json;

template <class T>
void maybe(const json& j, const char* key, T& out) {
    if (j.contains(key)) out = j.at(key).get<T>();
}

std::complex<double> complex_from(const json& j) {
    return {j.at("r").get<double>(), j.at("x").get<double>()};
}

json complex_to(const std::complex<double>& z) {
    return {{"r", z.real()}, {"x", z.imag()}};
}

} // namespace

void ExperimentConfig::validate() const {
    relay.validate();
    system.validate();
    generation.validate();
    train.validate();
    attack.validate();
    defense.validate();
    if (pickup_count < 1) throw ConfigError("pickup_count must be >= 1");
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ConfigError("test_fraction must lie in (0, 1)");
    if (out_dir.empty()) throw ConfigError("out_dir must be set");
}

ExperimentConfig default_config() {
    ExperimentConfig cfg;
    cfg.defense.retrain = cfg.train;
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config: " + path.string());
    json j;
    try {
        is >> j;
    } catch (const json::exception& e) {
        throw ConfigError("malformed config json: " + std::string(e.what()));
    }

    ExperimentConfig cfg = default_config();
    try {
        maybe(j, "seed", cfg.seed);
        if (j.contains("out_dir")) cfg.out_dir = j.at("out_dir").get<std::string>();

        if (j.contains("relay")) {
            const json& r = j.at("relay");
            maybe(r, "i_d0_ka", cfg.relay.i_d0);
            maybe(r, "i_b_ka", cfg.relay.i_b);
            maybe(r, "m1", cfg.relay.m1);
            maybe(r, "m2", cfg.relay.m2);
            maybe(r, "pickup_count", cfg.pickup_count);
        }
        if (j.contains("system")) {
            const json& s = j.at("system");
            maybe(s, "nominal_load_current_ka", cfg.system.nominal_load_current);
            if (s.contains("source_impedance_ohm"))
                cfg.system.source_impedance = complex_from(s.at("source_impedance_ohm"));
            if (s.contains("line_impedance_ohm"))
                cfg.system.line_impedance = complex_from(s.at("line_impedance_ohm"));
            maybe(s, "fcl_limit_pu", cfg.system.fcl_limit_pu);
            maybe(s, "dc_decay_time_constant_s", cfg.system.dc_decay_time_constant);
            maybe(s, "sample_rate_hz", cfg.system.sample_rate);
            maybe(s, "base_frequency_hz", cfg.system.base_frequency);
        }
        if (j.contains("generation")) {
            const json& g = j.at("generation");
            if (g.contains("fault_types")) {
                cfg.generation.fault_types.clear();
                for (const auto& t : g.at("fault_types"))
                    cfg.generation.fault_types.push_back(
                        parse_fault_type(t.get<std::string>()));
            }
            maybe(g, "impedances_ohm", cfg.generation.impedances_ohm);
            maybe(g, "locations_frac", cfg.generation.locations_frac);
            maybe(g, "inception_angles_ms", cfg.generation.inception_angles_ms);
            maybe(g, "fault_loads_pu", cfg.generation.fault_loads_pu);
            maybe(g, "fdia_alpha_draws", cfg.generation.fdia_alpha_draws);
            maybe(g, "fdia_onsets", cfg.generation.fdia_onsets);
            maybe(g, "fdia_loads_pu", cfg.generation.fdia_loads_pu);
            if (g.contains("snr_db")) {
                const auto range = g.at("snr_db").get<std::vector<double>>();
                if (range.size() != 2) throw ConfigError("snr_db must be [min, max]");
                cfg.generation.snr_min_db = range[0];
                cfg.generation.snr_max_db = range[1];
            }
            maybe(g, "noise_enabled", cfg.generation.noise_enabled);
            maybe(g, "test_fraction", cfg.test_fraction);
        }
        if (j.contains("train")) {
            const json& t = j.at("train");
            maybe(t, "epochs", cfg.train.epochs);
            maybe(t, "batch_size", cfg.train.batch_size);
            maybe(t, "learning_rate", cfg.train.learning_rate);
            if (t.contains("optimizer")) {
                const std::string opt = t.at("optimizer").get<std::string>();
                if (opt == "adam") cfg.train.optimizer = TrainConfig::Optimizer::Adam;
                else if (opt == "sgd") cfg.train.optimizer = TrainConfig::Optimizer::Sgd;
                else throw ConfigError("optimizer must be adam or sgd");
            }
        }
        if (j.contains("attack")) {
            const json& a = j.at("attack");
            maybe(a, "epsilon", cfg.attack.epsilon);
            maybe(a, "iterations", cfg.attack.max_iterations);
        }
        if (j.contains("defense")) {
            const json& d = j.at("defense");
            maybe(d, "retrain_epochs", cfg.defense.retrain_epochs);
            maybe(d, "epsilons", cfg.defense.epsilons);
        }
    } catch (const json::exception& e) {
        throw ConfigError("config schema error: " + std::string(e.what()));
    }

    cfg.defense.attack.max_iterations = cfg.attack.max_iterations;
    cfg.defense.retrain = cfg.train;
    cfg.validate();
    return cfg;
}

void write_config(const ExperimentConfig& cfg, const std::filesystem::path& path) {
    json j;
    j["seed"] = cfg.seed;
    j["out_dir"] = cfg.out_dir.string();
    j["relay"] = {{"i_d0_ka", cfg.relay.i_d0},
                  {"i_b_ka", cfg.relay.i_b},
                  {"m1", cfg.relay.m1},
                  {"m2", cfg.relay.m2},
                  {"pickup_count", cfg.pickup_count}};
    j["system"] = {{"nominal_load_current_ka", cfg.system.nominal_load_current},
                   {"source_impedance_ohm", complex_to(cfg.system.source_impedance)},
                   {"line_impedance_ohm", complex_to(cfg.system.line_impedance)},
                   {"fcl_limit_pu", cfg.system.fcl_limit_pu},
                   {"dc_decay_time_constant_s", cfg.system.dc_decay_time_constant},
                   {"sample_rate_hz", cfg.system.sample_rate},
                   {"base_frequency_hz", cfg.system.base_frequency}};
    json types = json::array();
    for (FaultType t : cfg.generation.fault_types) types.push_back(to_string(t));
    j["generation"] = {{"fault_types", std::move(types)},
                       {"impedances_ohm", cfg.generation.impedances_ohm},
                       {"locations_frac", cfg.generation.locations_frac},
                       {"inception_angles_ms", cfg.generation.inception_angles_ms},
                       {"fault_loads_pu", cfg.generation.fault_loads_pu},
                       {"fdia_alpha_draws", cfg.generation.fdia_alpha_draws},
                       {"fdia_onsets", cfg.generation.fdia_onsets},
                       {"fdia_loads_pu", cfg.generation.fdia_loads_pu},
                       {"snr_db", {cfg.generation.snr_min_db, cfg.generation.snr_max_db}},
                       {"noise_enabled", cfg.generation.noise_enabled},
                       {"test_fraction", cfg.test_fraction}};
    j["train"] = {{"epochs", cfg.train.epochs},
                  {"batch_size", cfg.train.batch_size},
                  {"learning_rate", cfg.train.learning_rate},
                  {"optimizer",
                   cfg.train.optimizer == TrainConfig::Optimizer::Adam ? "adam" : "sgd"}};
    j["attack"] = {{"epsilon", cfg.attack.epsilon},
                   {"iterations", cfg.attack.max_iterations}};
    j["defense"] = {{"retrain_epochs", cfg.defense.retrain_epochs},
                    {"epsilons", cfg.defense.epsilons}};
    std::ofstream os(path);
    if (!os) throw IoError("cannot write config: " + path.string());
    os << j.dump(2) << "\n";
}

} // namespace lcdr
