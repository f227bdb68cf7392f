#ifndef LCDR_CONFIG_HPP
#define LCDR_CONFIG_HPP

#include <cstdint>
#include <filesystem>

#include "lcdr/attack.hpp"
#include "lcdr/dataset.hpp"
#include "lcdr/defense.hpp"
#include "lcdr/model.hpp"
#include "lcdr/relay.hpp"
#include "lcdr/window.hpp"

namespace lcdr {

/// Whole-experiment configuration. A single global seed fans out to fixed
/// per-stage streams, so a rerun with one seed is byte-reproducible.
struct ExperimentConfig {
    std::uint64_t seed = 42;
    std::filesystem::path out_dir = "out";
    RelaySettings relay;
    int pickup_count = 4;
    SystemModel system;
    GenerationConfig generation;
    double test_fraction = 0.2;
    TrainConfig train;
    AttackConfig attack;
    DefenseConfig defense;

    void validate() const;
};

ExperimentConfig default_config();

/// Reads the JSON schema documented in the README; unset keys keep defaults.
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes the fully expanded configuration (the same schema load_config reads).
void write_config(const ExperimentConfig& cfg, const std::filesystem::path& path);

} // namespace lcdr

#endif
