#ifndef LCDR_RELAY_HPP
#define LCDR_RELAY_HPP

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "lcdr/window.hpp"

namespace lcdr {

/// Dual-slope percentage-differential operating characteristic constants.
struct RelaySettings {
    double i_d0 = 0.05; ///< kA, minimum pickup
    double i_b = 0.585; ///< kA, slope breakpoint
    double m1 = 0.2;    ///< lower slope
    double m2 = 0.4;    ///< upper slope

    void validate() const;
};

/// Outcome of evaluating the operating characteristic over a window.
struct TripDecision {
    struct TracePoint {
        double i_d;  ///< |i1 + i2|, kA
        double i_r;  ///< |i1| + |i2|, kA
        double i_op; ///< operating threshold, kA
    };

    bool tripped = false;
    std::optional<int> trip_index;  ///< first index completing the pickup run
    int first_evaluated_index = 0;
    std::array<std::vector<TracePoint>, kPhases> per_phase_trace;
};

/// Fundamental-frequency phasor (kA RMS) from the full cycle of samples
/// ending at `end_index`. Rejects constant DC exactly when the cycle length
/// is an integer number of samples.
Phasor estimate_phasor(std::span<const double> channel, int end_index,
                       double samples_per_cycle);

struct DifferentialPair {
    Phasor i_d;  ///< complex differential current, kA
    double i_r;  ///< restraining current, kA
};

/// Per-phase differential and restraining currents: i_d = i1 + i2,
/// i_r = |i1| + |i2|.
std::array<DifferentialPair, kPhases> differential_currents(const PhasorSet& i1,
                                                            const PhasorSet& i2);

/// Dual-slope threshold:
///   i_op = i_d0 + m1*i_r                        for i_r <= i_b
///   i_op = i_d0 + m1*i_b + m2*(i_r - i_b)       for i_r >  i_b
double operating_current(double i_r, const RelaySettings& settings);

/// Evaluates the trip condition |i_d| >= i_op at every index with one full
/// cycle of history, per phase. Trips when the condition holds for
/// `pickup_count` consecutive indices on any phase.
TripDecision trip_check(const MeasurementWindow& window,
                        const RelaySettings& settings, int pickup_count = 4);

} // namespace lcdr

#endif
