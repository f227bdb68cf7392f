#include "lcdr/waveform.hpp"

#include <cmath>
#include <complex>
#include <numbers>

#include "lcdr/errors.hpp"

namespace lcdr {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSqrt2 = std::numbers::sqrt2;

// Lagging power-factor angle of the load current relative to the source EMF.
constexpr double kLoadAngleRad = -0.4363323129985824; // -25 deg

// Equivalent source EMF per kA of nominal load current. Sets the prospective
// fault current level; high-impedance (100 ohm) faults must still clear the
// operating characteristic.
constexpr double kDriveOhmPerKa = 83.0;

// Rejection margin applied when sampling FDIA multipliers, so that windows
// built from accepted draws keep tripping under measurement noise and
// fractional-cycle phasor estimation error.
constexpr double kLocusMarginFactor = 1.10;
constexpr double kLocusMarginKa = 0.005;

constexpr std::uint64_t kPhaseStream = 0x70686173ULL;

double angular_rate(const SystemModel& model) {
    return 2.0 * kPi * model.base_frequency;
}

// Point-on-wave reference for the whole recording. Normal and FDIA windows
// draw it from the scenario seed; fault windows derive it from the inception
// angle so the fault grid stays enumerable.
double reference_phase(const ScenarioSpec& spec, const SystemModel& model) {
    if (spec.kind == ScenarioSpec::Kind::Fault)
        return angular_rate(model) * (spec.fault->inception_angle_ms * 1e-3);
    Rng rng(derive_seed(spec.seed, kPhaseStream));
    return rng.uniform(0.0, 2.0 * kPi);
}

// x[t] = sqrt(2) * Re{ phasor * e^{i w t} }, phasor in kA RMS.
double sample_of(const Phasor& phasor, double w, double t) {
    return kSqrt2 * (phasor * std::polar(1.0, w * t)).real();
}

MeasurementWindow blank_window(const SystemModel& model) {
    MeasurementWindow w;
    w.length = model.window_length();
    w.sample_rate = model.sample_rate;
    w.base_frequency = model.base_frequency;
    w.trigger_index = model.trigger_index();
    w.samples.assign(static_cast<std::size_t>(kChannels) * w.length, 0.0);
    return w;
}

PhasorSet load_phasors(double load_pu, double theta0, const SystemModel& model) {
    PhasorSet set;
    const double mag = load_pu * model.nominal_load_current;
    for (int p = 0; p < kPhases; ++p)
        set[p] = std::polar(mag, theta0 + kLoadAngleRad - 2.0 * kPi * p / 3.0);
    return set;
}

PhasorSet source_emf(double theta0, const SystemModel& model) {
    PhasorSet set;
    const double mag = model.nominal_load_current * kDriveOhmPerKa; // kV phase RMS
    for (int p = 0; p < kPhases; ++p)
        set[p] = std::polar(mag, theta0 - 2.0 * kPi * p / 3.0);
    return set;
}

// Superimposed fault-current contribution from one end, per phase.
PhasorSet fault_contribution(const FaultSpec& fault, const PhasorSet& emf,
                             std::complex<double> path_z) {
    PhasorSet f{};
    const FaultConnection conn = fault_connection(fault.type);
    const std::complex<double> zf(fault.impedance_ohm, 0.0);
    if (conn.phase_pair) {
        int p = -1, q = -1;
        for (int i = 0; i < kPhases; ++i)
            if (conn.involved[i]) (p < 0 ? p : q) = i;
        const std::complex<double> loop = (emf[p] - emf[q]) / (2.0 * path_z + zf);
        f[p] += loop;
        f[q] -= loop;
    } else {
        for (int p = 0; p < kPhases; ++p)
            if (conn.involved[p]) f[p] += emf[p] / (path_z + zf);
    }
    return f;
}

Phasor cap_magnitude(const Phasor& v, double cap) {
    const double mag = std::abs(v);
    if (mag <= cap || mag == 0.0) return v;
    return v * (cap / mag);
}

} // namespace

PhasorSet normal_local_phasors(const ScenarioSpec& spec, const SystemModel& model) {
    return load_phasors(spec.load_pu, reference_phase(spec, model), model);
}

PhasorSet normal_remote_phasors(const ScenarioSpec& spec, const SystemModel& model) {
    PhasorSet set = normal_local_phasors(spec, model);
    for (auto& v : set) v = -v;
    return set;
}

MeasurementWindow synth_normal(const ScenarioSpec& spec, const SystemModel& model) {
    spec.validate();
    model.validate();
    if (spec.kind != ScenarioSpec::Kind::Normal && spec.kind != ScenarioSpec::Kind::Fdia)
        throw ParameterError("synth_normal requires a normal (or fdia base) scenario");

    MeasurementWindow w = blank_window(model);
    const double wrate = angular_rate(model);
    const double ts = 1.0 / model.sample_rate;
    const PhasorSet local = load_phasors(spec.load_pu, reference_phase(spec, model), model);
    for (int p = 0; p < kPhases; ++p) {
        for (int t = 0; t < w.length; ++t) {
            const double v = sample_of(local[p], wrate, t * ts);
            w.at(kLocalOffset + p, t) = v;
            w.at(kRemoteOffset + p, t) = -v;
        }
    }
    return w;
}

MeasurementWindow synth_fault(const ScenarioSpec& spec, const SystemModel& model) {
    spec.validate();
    model.validate();
    if (spec.kind != ScenarioSpec::Kind::Fault)
        throw ParameterError("synth_fault requires a fault scenario");

    const FaultSpec& fault = *spec.fault;
    const double theta0 = reference_phase(spec, model);
    const double wrate = angular_rate(model);
    const double ts = 1.0 / model.sample_rate;
    const double cap = model.fcl_limit_pu * model.nominal_load_current;

    const PhasorSet local_load = load_phasors(spec.load_pu, theta0, model);
    const PhasorSet emf = source_emf(theta0, model);
    const std::complex<double> z_local =
        model.source_impedance + fault.location_frac * model.line_impedance;
    const std::complex<double> z_remote =
        model.source_impedance + (1.0 - fault.location_frac) * model.line_impedance;
    const PhasorSet f_local = fault_contribution(fault, emf, z_local);
    const PhasorSet f_remote = fault_contribution(fault, emf, z_remote);

    MeasurementWindow w = blank_window(model);
    const double t0 = w.trigger_index * ts;
    for (int p = 0; p < kPhases; ++p) {
        const Phasor pre_local = local_load[p];
        const Phasor pre_remote = -local_load[p];
        const Phasor post_local = cap_magnitude(pre_local + f_local[p], cap);
        const Phasor post_remote = cap_magnitude(pre_remote + f_remote[p], cap);
        // DC offsets keep the currents continuous at the inception instant.
        const double dc_local =
            sample_of(pre_local, wrate, t0) - sample_of(post_local, wrate, t0);
        const double dc_remote =
            sample_of(pre_remote, wrate, t0) - sample_of(post_remote, wrate, t0);
        for (int t = 0; t < w.length; ++t) {
            const double time = t * ts;
            if (t < w.trigger_index) {
                w.at(kLocalOffset + p, t) = sample_of(pre_local, wrate, time);
                w.at(kRemoteOffset + p, t) = sample_of(pre_remote, wrate, time);
            } else {
                const double decay = std::exp(-(time - t0) / model.dc_decay_time_constant);
                w.at(kLocalOffset + p, t) =
                    sample_of(post_local, wrate, time) + dc_local * decay;
                w.at(kRemoteOffset + p, t) =
                    sample_of(post_remote, wrate, time) + dc_remote * decay;
            }
        }
    }
    return w;
}

namespace {

bool alpha_trips_with_margin(const RelaySettings& settings, const PhasorSet& remote,
                             std::complex<double> alpha, double factor, double slack) {
    for (int p = 0; p < kPhases; ++p) {
        const Phasor i1 = -remote[p];
        const Phasor i2m = alpha * remote[p];
        const double i_d = std::abs(i1 + i2m);
        const double i_r = std::abs(i1) + std::abs(i2m);
        const double i_op = operating_current(i_r, settings);
        if (i_d >= factor * i_op + slack) return true;
    }
    return false;
}

} // namespace

bool fdia_alpha_trips(const RelaySettings& settings, const PhasorSet& remote,
                      std::complex<double> alpha) {
    return alpha_trips_with_margin(settings, remote, alpha, 1.0, 0.0);
}

std::complex<double> sample_fdia_alpha(const RelaySettings& settings,
                                       const PhasorSet& remote, Rng& rng) {
    settings.validate();
    constexpr int kMaxDraws = 10000;
    for (int i = 0; i < kMaxDraws; ++i) {
        const double mag = rng.uniform(0.0, 5.0);
        const double ang = rng.uniform(-kPi, kPi);
        const std::complex<double> alpha = std::polar(mag, ang);
        if (alpha_trips_with_margin(settings, remote, alpha, kLocusMarginFactor,
                                    kLocusMarginKa))
            return alpha;
    }
    throw DataError("no feasible FDIA multiplier within 10000 draws; "
                    "remote currents too small to reach the trip region");
}

MeasurementWindow apply_fdia(const MeasurementWindow& window,
                             std::complex<double> alpha, int onset_index) {
    window.validate();
    if (onset_index < 0 || onset_index >= window.length)
        throw ParameterError("fdia onset outside window");
    if (alpha == std::complex<double>(1.0, 0.0)) return window;

    MeasurementWindow out = window;
    const double wrate = 2.0 * kPi * window.base_frequency;
    const double ts = 1.0 / window.sample_rate;
    for (int p = 0; p < kPhases; ++p) {
        // Least-squares fit of the fundamental over the clean sinusoid;
        // exact for synth_normal output.
        double scc = 0, scs = 0, sss = 0, sxc = 0, sxs = 0;
        const auto row = window.row(kRemoteOffset + p);
        for (int t = 0; t < window.length; ++t) {
            const double c = std::cos(wrate * t * ts);
            const double s = std::sin(wrate * t * ts);
            scc += c * c;
            scs += c * s;
            sss += s * s;
            sxc += row[t] * c;
            sxs += row[t] * s;
        }
        const double det = scc * sss - scs * scs;
        if (std::abs(det) < 1e-12)
            throw NumericError("fundamental fit is singular");
        const double cc = (sxc * sss - sxs * scs) / det;
        const double ss = (sxs * scc - sxc * scs) / det;
        const std::complex<double> fitted(cc, -ss); // x[t] = Re{fitted e^{iwt}}
        const std::complex<double> manipulated = alpha * fitted;
        for (int t = onset_index; t < window.length; ++t)
            out.at(kRemoteOffset + p, t) =
                (manipulated * std::polar(1.0, wrate * t * ts)).real();
    }
    return out;
}

MeasurementWindow add_noise(const MeasurementWindow& window, double snr_db, Rng& rng) {
    window.validate();
    if (!std::isfinite(snr_db)) throw ParameterError("snr_db must be finite");
    if (snr_db < 35.0 || snr_db > 60.0)
        throw ParameterError("snr_db outside [35, 60]");

    MeasurementWindow out = window;
    const double ratio = std::pow(10.0, -snr_db / 20.0);
    for (int ch = 0; ch < kChannels; ++ch) {
        double ms = 0.0;
        const auto row = window.row(ch);
        for (double v : row) ms += v * v;
        const double rms = std::sqrt(ms / window.length);
        if (rms == 0.0) continue; // silent channel: SNR undefined, leave as is
        const double sigma = rms * ratio;
        for (int t = 0; t < window.length; ++t)
            out.at(ch, t) += rng.normal(0.0, sigma);
    }
    return out;
}

} // namespace lcdr
