#include "lcdr/window.hpp"

#include <cmath>

#include "lcdr/errors.hpp"

namespace lcdr {

void MeasurementWindow::validate() const {
    if (length <= 0) throw ParameterError("window length must be positive");
    if (samples.size() != static_cast<std::size_t>(kChannels) * length)
        throw ParameterError("window sample buffer does not match 6 x T layout");
    if (sample_rate <= 0 || base_frequency <= 0)
        throw ParameterError("window sampling metadata must be positive");
    if (trigger_index < 0 || trigger_index >= length)
        throw ParameterError("trigger index outside window");
    for (double v : samples)
        if (!std::isfinite(v)) throw ParameterError("window contains non-finite sample");
}

FaultType parse_fault_type(const std::string& s) {
    for (FaultType t : kAllFaultTypes)
        if (s == to_string(t)) return t;
    throw ParameterError("unknown fault type: " + s);
}

std::string to_string(FaultType t) {
    switch (t) {
        case FaultType::AG: return "AG";
        case FaultType::BG: return "BG";
        case FaultType::CG: return "CG";
        case FaultType::AB: return "AB";
        case FaultType::BC: return "BC";
        case FaultType::CA: return "CA";
        case FaultType::ABG: return "ABG";
        case FaultType::BCG: return "BCG";
        case FaultType::CAG: return "CAG";
        case FaultType::ABC: return "ABC";
        case FaultType::ABCG: return "ABCG";
    }
    throw ParameterError("unknown fault type enum value");
}

FaultConnection fault_connection(FaultType t) {
    FaultConnection c;
    switch (t) {
        case FaultType::AG: c.involved = {true, false, false}; c.to_ground = true; break;
        case FaultType::BG: c.involved = {false, true, false}; c.to_ground = true; break;
        case FaultType::CG: c.involved = {false, false, true}; c.to_ground = true; break;
        case FaultType::AB: c.involved = {true, true, false}; c.phase_pair = true; break;
        case FaultType::BC: c.involved = {false, true, true}; c.phase_pair = true; break;
        case FaultType::CA: c.involved = {true, false, true}; c.phase_pair = true; break;
        case FaultType::ABG: c.involved = {true, true, false}; c.to_ground = true; break;
        case FaultType::BCG: c.involved = {false, true, true}; c.to_ground = true; break;
        case FaultType::CAG: c.involved = {true, false, true}; c.to_ground = true; break;
        case FaultType::ABC: c.involved = {true, true, true}; break;
        case FaultType::ABCG: c.involved = {true, true, true}; c.to_ground = true; break;
    }
    return c;
}

std::string to_string(ScenarioSpec::Kind k) {
    switch (k) {
        case ScenarioSpec::Kind::Normal: return "normal";
        case ScenarioSpec::Kind::Fault: return "fault";
        case ScenarioSpec::Kind::Fdia: return "fdia";
    }
    throw ParameterError("unknown scenario kind");
}

void ScenarioSpec::validate() const {
    if (!(load_pu >= 0.2 && load_pu <= 1.0))
        throw ParameterError("load_pu outside [0.2, 1.0]");
    if (snr_db) {
        if (!std::isfinite(*snr_db)) throw ParameterError("snr_db must be finite");
        if (*snr_db < 35.0 || *snr_db > 60.0)
            throw ParameterError("snr_db outside [35, 60]");
    }
    switch (kind) {
        case Kind::Normal:
            if (fault || fdia)
                throw ParameterError("normal scenario must not carry fault/fdia fields");
            break;
        case Kind::Fault: {
            if (!fault || fdia)
                throw ParameterError("fault scenario requires exactly the fault field group");
            const FaultSpec& f = *fault;
            if (!(f.location_frac >= 0.1 && f.location_frac <= 0.9))
                throw ParameterError("fault location_frac outside [0.1, 0.9]");
            if (!(f.impedance_ohm >= 0.0 && f.impedance_ohm <= 100.0))
                throw ParameterError("fault impedance_ohm outside [0, 100]");
            if (f.inception_angle_ms < 0 || f.inception_angle_ms > 15)
                throw ParameterError("inception_angle_ms outside {0..15}");
            break;
        }
        case Kind::Fdia: {
            if (!fdia || fault)
                throw ParameterError("fdia scenario requires exactly the fdia field group");
            if (!std::isfinite(fdia->alpha.real()) || !std::isfinite(fdia->alpha.imag()))
                throw ParameterError("fdia alpha must be finite");
            if (fdia->onset_index < 0)
                throw ParameterError("fdia onset_index must be non-negative");
            break;
        }
    }
}

void SystemModel::validate() const {
    if (nominal_load_current <= 0) throw ParameterError("nominal_load_current must be positive");
    if (std::abs(source_impedance) <= 0) throw ParameterError("source_impedance must be nonzero");
    if (std::abs(line_impedance) <= 0) throw ParameterError("line_impedance must be nonzero");
    if (fcl_limit_pu < 1.0) throw ParameterError("fcl_limit_pu must be >= 1");
    if (dc_decay_time_constant <= 0) throw ParameterError("dc_decay_time_constant must be positive");
    if (sample_rate <= 0 || base_frequency <= 0)
        throw ParameterError("sampling parameters must be positive");
}

int SystemModel::window_length() const {
    return static_cast<int>(std::floor(4.0 * sample_rate / base_frequency));
}

} // namespace lcdr
