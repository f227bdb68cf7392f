#include "lcdr/relay.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "lcdr/errors.hpp"

namespace lcdr {

void RelaySettings::validate() const {
    if (i_d0 <= 0) throw ParameterError("i_d0 must be positive");
    if (i_b <= 0) throw ParameterError("i_b must be positive");
    if (!(m1 > 0 && m1 < m2)) throw ParameterError("slopes must satisfy 0 < m1 < m2");
}

Phasor estimate_phasor(std::span<const double> channel, int end_index,
                       double samples_per_cycle) {
    if (!(samples_per_cycle > 2.0))
        throw ParameterError("samples_per_cycle must exceed 2");
    const int cycle = static_cast<int>(std::llround(samples_per_cycle));
    const int min_end = static_cast<int>(std::ceil(samples_per_cycle));
    if (end_index < min_end || end_index >= static_cast<int>(channel.size()))
        throw ParameterError("phasor window shorter than one full cycle");

    // Correlate one cycle of samples against the fundamental. The positive
    // frequency term is exact even for a fractional cycle length; the
    // residual comes from the negative-frequency image (~2% at 16.67
    // samples per cycle).
    const double w = 2.0 * std::numbers::pi / samples_per_cycle;
    std::complex<double> acc{0.0, 0.0};
    const int start = end_index - cycle + 1;
    for (int n = 0; n < cycle; ++n) {
        const double angle = w * n;
        acc += channel[start + n] * std::complex<double>(std::cos(angle), -std::sin(angle));
    }
    return acc * (std::numbers::sqrt2 / static_cast<double>(cycle));
}

std::array<DifferentialPair, kPhases> differential_currents(const PhasorSet& i1,
                                                            const PhasorSet& i2) {
    std::array<DifferentialPair, kPhases> out;
    for (int p = 0; p < kPhases; ++p) {
        if (!std::isfinite(std::abs(i1[p])) || !std::isfinite(std::abs(i2[p])))
            throw ParameterError("phasor sets must be finite");
        out[p].i_d = i1[p] + i2[p];
        out[p].i_r = std::abs(i1[p]) + std::abs(i2[p]);
    }
    return out;
}

double operating_current(double i_r, const RelaySettings& settings) {
    if (i_r < 0) throw ParameterError("restraining current must be non-negative");
    if (i_r <= settings.i_b) return settings.i_d0 + settings.m1 * i_r;
    return settings.i_d0 + settings.m1 * settings.i_b + settings.m2 * (i_r - settings.i_b);
}

TripDecision trip_check(const MeasurementWindow& window,
                        const RelaySettings& settings, int pickup_count) {
    window.validate();
    settings.validate();
    if (pickup_count < 1) throw ParameterError("pickup_count must be >= 1");

    const double spc = window.samples_per_cycle();
    const int first = static_cast<int>(std::ceil(spc));
    if (first >= window.length)
        throw ParameterError("window shorter than one full cycle");

    TripDecision decision;
    decision.first_evaluated_index = first;
    for (auto& trace : decision.per_phase_trace)
        trace.reserve(window.length - first);

    std::array<int, kPhases> run{};
    for (int e = first; e < window.length; ++e) {
        PhasorSet local, remote;
        for (int p = 0; p < kPhases; ++p) {
            local[p] = estimate_phasor(window.row(kLocalOffset + p), e, spc);
            remote[p] = estimate_phasor(window.row(kRemoteOffset + p), e, spc);
        }
        const auto pairs = differential_currents(local, remote);
        for (int p = 0; p < kPhases; ++p) {
            const double i_d = std::abs(pairs[p].i_d);
            const double i_op = operating_current(pairs[p].i_r, settings);
            decision.per_phase_trace[p].push_back({i_d, pairs[p].i_r, i_op});
            run[p] = (i_d >= i_op) ? run[p] + 1 : 0;
            if (run[p] >= pickup_count && !decision.tripped) {
                decision.tripped = true;
                decision.trip_index = e;
            }
        }
    }
    return decision;
}

} // namespace lcdr
