#ifndef LCDR_WINDOW_HPP
#define LCDR_WINDOW_HPP

#include <array>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace lcdr {

inline constexpr int kPhases = 3;
/// Channel layout: rows 0-2 local phases A/B/C, rows 3-5 remote phases A/B/C.
inline constexpr int kChannels = 6;
inline constexpr int kLocalOffset = 0;
inline constexpr int kRemoteOffset = 3;

/// Complex phasor in kA RMS.
using Phasor = std::complex<double>;

/// Per-phase phasors for phases A, B, C.
using PhasorSet = std::array<Phasor, kPhases>;

/// Sampled three-phase currents from both line ends around a trigger instant.
struct MeasurementWindow {
    int length = 0;             ///< samples per channel (T)
    double sample_rate = 0;     ///< Hz
    double base_frequency = 0;  ///< Hz
    int trigger_index = 0;      ///< sample index of event onset
    std::vector<double> samples; ///< row-major [kChannels][length], kA

    double at(int ch, int t) const { return samples[static_cast<std::size_t>(ch) * length + t]; }
    double& at(int ch, int t) { return samples[static_cast<std::size_t>(ch) * length + t]; }

    std::span<const double> row(int ch) const {
        return {samples.data() + static_cast<std::size_t>(ch) * length,
                static_cast<std::size_t>(length)};
    }
    std::span<double> row(int ch) {
        return {samples.data() + static_cast<std::size_t>(ch) * length,
                static_cast<std::size_t>(length)};
    }

    double samples_per_cycle() const { return sample_rate / base_frequency; }

    /// Throws ParameterError on malformed shape or non-finite entries.
    void validate() const;
};

enum class FaultType { AG, BG, CG, AB, BC, CA, ABG, BCG, CAG, ABC, ABCG };

inline constexpr std::array<FaultType, 11> kAllFaultTypes = {
    FaultType::AG,  FaultType::BG,  FaultType::CG, FaultType::AB,
    FaultType::BC,  FaultType::CA,  FaultType::ABG, FaultType::BCG,
    FaultType::CAG, FaultType::ABC, FaultType::ABCG};

FaultType parse_fault_type(const std::string& s);
std::string to_string(FaultType t);

/// Phase participation of a fault type.
struct FaultConnection {
    std::array<bool, kPhases> involved{};
    bool to_ground = false;
    bool phase_pair = false; ///< isolated two-phase loop (AB/BC/CA)
};
FaultConnection fault_connection(FaultType t);

struct FaultSpec {
    FaultType type = FaultType::ABC;
    double location_frac = 0.5;   ///< [0.1, 0.9] measured from the local end
    double impedance_ohm = 0.0;   ///< [0, 100]
    int inception_angle_ms = 0;   ///< {0, 1, ..., 15}
};

struct FdiaSpec {
    std::complex<double> alpha{-1.0, 0.0};
    int onset_index = 0;
};

/// One synthesis scenario. Exactly one of the kind-specific field groups is
/// populated, matching `kind`.
struct ScenarioSpec {
    enum class Kind { Normal, Fault, Fdia };

    Kind kind = Kind::Normal;
    double load_pu = 1.0;              ///< [0.2, 1.0]
    std::optional<double> snr_db;      ///< [35, 60]; disabled when absent
    std::uint64_t seed = 0;
    std::optional<FaultSpec> fault;
    std::optional<FdiaSpec> fdia;

    void validate() const;
};

std::string to_string(ScenarioSpec::Kind k);

/// Analytic stand-in for the protected line and its sources.
struct SystemModel {
    double nominal_load_current = 0.3;              ///< kA RMS at 1.0 pu load
    std::complex<double> source_impedance{2.0, 15.0}; ///< ohm per phase
    std::complex<double> line_impedance{1.0, 4.0};    ///< ohm per phase
    double fcl_limit_pu = 1.5;          ///< fault-current-limiter cap
    double dc_decay_time_constant = 0.020; ///< s
    double sample_rate = 1000.0;        ///< Hz
    double base_frequency = 60.0;       ///< Hz

    void validate() const;

    /// Four power cycles: floor(4 * fs / f0) samples.
    int window_length() const;
    /// Two cycles into the window.
    int trigger_index() const { return window_length() / 2; }
};

} // namespace lcdr

#endif
