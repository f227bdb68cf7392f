#ifndef LCDR_DATASET_HPP
#define LCDR_DATASET_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <utility>
#include <vector>

#include "lcdr/relay.hpp"
#include "lcdr/tensor.hpp"
#include "lcdr/window.hpp"

namespace lcdr {

inline constexpr int kLabelFault = 0;
inline constexpr int kLabelFdia = 1;

struct LabeledSample {
    MeasurementWindow window;
    int label = kLabelFault; ///< 0 = fault, 1 = FDIA
    ScenarioSpec scenario;
};

/// Per-sample record of how an adversarial set was produced.
struct AttackProvenance {
    bool attacked = false;
    int iterations = 0;
    double epsilon = 0.0;
};

struct DatasetManifest {
    int format_version = 1;
    std::string channel_layout = "local A,B,C; remote A,B,C";
    double sample_rate = 0.0;
    double base_frequency = 0.0;
    int window_length = 0;
    int trigger_index = 0;
    std::size_t fault_count = 0;
    std::size_t fdia_count = 0;
    std::uint64_t generator_seed = 0;
    /// Present on adversarially rebuilt sets; same length as samples.
    std::optional<std::vector<AttackProvenance>> attack;
};

struct Dataset {
    std::vector<LabeledSample> samples;
    DatasetManifest manifest;

    std::size_t size() const { return samples.size(); }
    void refresh_counts();
};

/// Scenario grid for corpus generation. Fault samples enumerate the
/// Cartesian product; FDIA samples enumerate (alpha draw, onset, load).
struct GenerationConfig {
    std::vector<FaultType> fault_types{kAllFaultTypes.begin(), kAllFaultTypes.end()};
    std::vector<double> impedances_ohm{0.0, 5.0, 20.0, 50.0, 100.0};
    std::vector<double> locations_frac{0.1, 0.3, 0.5, 0.7, 0.9};
    std::vector<int> inception_angles_ms{0, 4, 8, 12};
    std::vector<double> fault_loads_pu{1.0, 0.6};
    std::size_t fdia_alpha_draws = 500;
    std::vector<int> fdia_onsets{33, 37};
    std::vector<double> fdia_loads_pu{1.0, 0.6};
    double snr_min_db = 35.0;
    double snr_max_db = 60.0;
    bool noise_enabled = true;

    std::size_t fault_total() const;
    std::size_t fdia_total() const;
    void validate() const;
};

/// Builds the labeled corpus. Every emitted window is verified against the
/// relay; a scenario that fails to trip raises GenerationError naming it.
Dataset generate_dataset(const GenerationConfig& config, const SystemModel& model,
                         const RelaySettings& settings, std::uint64_t seed,
                         int pickup_count = 4);

/// Deterministic stratified split; per-class test fraction within one sample
/// of the requested fraction.
std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed);

/// Per-channel standardization fitted on training data.
struct Scaler {
    std::array<double, kChannels> mean{};
    std::array<double, kChannels> stddev{};

    Tensor apply(const MeasurementWindow& window) const;
    /// Inverse transform; window metadata is copied from `like`.
    MeasurementWindow invert(const Tensor& x, const MeasurementWindow& like) const;
};

Scaler fit_scaler(const Dataset& train);

/// Directory format: manifest.json + samples.f32 (little-endian float32,
/// row-major [N, 6, T]) + labels.u8 (one byte per sample).
void save_dataset(const Dataset& ds, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

/// One row per sample: label followed by the flattened channels.
void export_csv(const Dataset& ds, const std::filesystem::path& file);

} // namespace lcdr

#endif
