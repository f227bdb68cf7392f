#ifndef LCDR_WAVEFORM_HPP
#define LCDR_WAVEFORM_HPP

#include <complex>

#include "lcdr/relay.hpp"
#include "lcdr/rng.hpp"
#include "lcdr/window.hpp"

namespace lcdr {

/// Balanced load-flow window: local rows are balanced sinusoids at
/// load_pu * nominal, remote rows are their exact negation. Noise is not
/// applied here; compose with add_noise.
MeasurementWindow synth_normal(const ScenarioSpec& spec, const SystemModel& model);

/// Fault window: load flow up to the trigger, then superimposed two-ended
/// fault current with per-end FCL capping and decaying DC offset. The
/// inception angle shifts the point-on-wave of the whole recording.
MeasurementWindow synth_fault(const ScenarioSpec& spec, const SystemModel& model);

/// Local/remote phasor sets of the pre-event load flow for a scenario
/// (what a normal window contains before sampling).
PhasorSet normal_local_phasors(const ScenarioSpec& spec, const SystemModel& model);
PhasorSet normal_remote_phasors(const ScenarioSpec& spec, const SystemModel& model);

/// True when replacing the remote currents with alpha-scaled copies
/// satisfies the trip characteristic on some phase, assuming the local
/// currents are the exact negation of `remote`.
bool fdia_alpha_trips(const RelaySettings& settings, const PhasorSet& remote,
                      std::complex<double> alpha);

/// Draws a multiplicative FDIA phasor alpha by rejection sampling over the
/// bounded polar region |alpha| <= 5, arg in (-pi, pi], keeping draws whose
/// manipulated remote currents satisfy the relay trip characteristic against
/// the given pre-attack remote phasors. Throws DataError after 10,000
/// rejected draws (degenerate i2, e.g. zero load).
std::complex<double> sample_fdia_alpha(const RelaySettings& settings,
                                       const PhasorSet& remote, Rng& rng);

/// Replaces remote rows from onset_index onward with the alpha-scaled
/// reconstruction of their fundamental component. Local rows and samples
/// before the onset are untouched.
MeasurementWindow apply_fdia(const MeasurementWindow& window,
                             std::complex<double> alpha, int onset_index);

/// Additive white Gaussian noise per channel at the requested SNR (dB
/// relative to each channel's RMS).
MeasurementWindow add_noise(const MeasurementWindow& window, double snr_db,
                            Rng& rng);

} // namespace lcdr

#endif
