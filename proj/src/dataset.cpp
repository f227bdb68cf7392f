#include "lcdr/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "lcdr/errors.hpp"
#include "lcdr/rng.hpp"
#include "lcdr/waveform.hpp"

namespace lcdr {

namespace {

using nlohmann::json;

constexpr std::uint64_t kSnrStream = 0x736e72ULL;
constexpr std::uint64_t kNoiseStream = 0x6e6f697365ULL;
constexpr std::uint64_t kAlphaStream = 0x616c706861ULL;
constexpr std::uint64_t kSplitStream = 0x73706c6974ULL;

json scenario_to_json(const ScenarioSpec& s) {
    json j;
    j["kind"] = to_string(s.kind);
    j["load_pu"] = s.load_pu;
    if (s.snr_db) j["snr_db"] = *s.snr_db;
    j["seed"] = s.seed;
    if (s.fault) {
        j["fault"] = {{"type", to_string(s.fault->type)},
                      {"location_frac", s.fault->location_frac},
                      {"impedance_ohm", s.fault->impedance_ohm},
                      {"inception_angle_ms", s.fault->inception_angle_ms}};
    }
    if (s.fdia) {
        j["fdia"] = {{"alpha_re", s.fdia->alpha.real()},
                     {"alpha_im", s.fdia->alpha.imag()},
                     {"onset_index", s.fdia->onset_index}};
    }
    return j;
}

ScenarioSpec scenario_from_json(const json& j) {
    ScenarioSpec s;
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "normal") s.kind = ScenarioSpec::Kind::Normal;
    else if (kind == "fault") s.kind = ScenarioSpec::Kind::Fault;
    else if (kind == "fdia") s.kind = ScenarioSpec::Kind::Fdia;
    else throw IoError("manifest scenario has unknown kind: " + kind);
    s.load_pu = j.at("load_pu").get<double>();
    if (j.contains("snr_db")) s.snr_db = j.at("snr_db").get<double>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("fault")) {
        const json& f = j.at("fault");
        FaultSpec spec;
        spec.type = parse_fault_type(f.at("type").get<std::string>());
        spec.location_frac = f.at("location_frac").get<double>();
        spec.impedance_ohm = f.at("impedance_ohm").get<double>();
        spec.inception_angle_ms = f.at("inception_angle_ms").get<int>();
        s.fault = spec;
    }
    if (j.contains("fdia")) {
        const json& f = j.at("fdia");
        FdiaSpec spec;
        spec.alpha = {f.at("alpha_re").get<double>(), f.at("alpha_im").get<double>()};
        spec.onset_index = f.at("onset_index").get<int>();
        s.fdia = spec;
    }
    return s;
}

std::string scenario_label(const ScenarioSpec& s, std::size_t index) {
    std::ostringstream os;
    os << "sample " << index << " (" << to_string(s.kind) << ", load " << s.load_pu;
    if (s.fault)
        os << ", type " << to_string(s.fault->type) << ", z " << s.fault->impedance_ohm
           << " ohm, loc " << s.fault->location_frac << ", angle "
           << s.fault->inception_angle_ms << " ms";
    if (s.fdia)
        os << ", alpha " << s.fdia->alpha.real() << (s.fdia->alpha.imag() < 0 ? "-" : "+")
           << std::abs(s.fdia->alpha.imag()) << "i, onset " << s.fdia->onset_index;
    os << ")";
    return os.str();
}

} // namespace

void Dataset::refresh_counts() {
    manifest.fault_count = 0;
    manifest.fdia_count = 0;
    for (const auto& s : samples)
        (s.label == kLabelFdia ? manifest.fdia_count : manifest.fault_count) += 1;
}

std::size_t GenerationConfig::fault_total() const {
    return fault_types.size() * impedances_ohm.size() * locations_frac.size() *
           inception_angles_ms.size() * fault_loads_pu.size();
}

std::size_t GenerationConfig::fdia_total() const {
    return fdia_alpha_draws * fdia_onsets.size() * fdia_loads_pu.size();
}

void GenerationConfig::validate() const {
    if (fault_types.empty() || impedances_ohm.empty() || locations_frac.empty() ||
        inception_angles_ms.empty() || fault_loads_pu.empty())
        throw ParameterError("every fault grid dimension needs at least one value");
    if (fdia_alpha_draws < 1 || fdia_onsets.empty() || fdia_loads_pu.empty())
        throw ParameterError("every fdia grid dimension needs at least one value");
    if (!(snr_min_db >= 35.0 && snr_max_db <= 60.0 && snr_min_db <= snr_max_db))
        throw ParameterError("snr range must lie within [35, 60]");
}

Dataset generate_dataset(const GenerationConfig& config, const SystemModel& model,
                         const RelaySettings& settings, std::uint64_t seed,
                         int pickup_count) {
    config.validate();
    model.validate();
    settings.validate();

    Dataset ds;
    ds.manifest.sample_rate = model.sample_rate;
    ds.manifest.base_frequency = model.base_frequency;
    ds.manifest.window_length = model.window_length();
    ds.manifest.trigger_index = model.trigger_index();
    ds.manifest.generator_seed = seed;
    ds.samples.reserve(config.fault_total() + config.fdia_total());

    std::size_t index = 0;
    auto finish_sample = [&](MeasurementWindow window, const ScenarioSpec& spec, int label) {
        if (spec.snr_db) {
            Rng noise_rng(derive_seed(spec.seed, kNoiseStream));
            window = add_noise(window, *spec.snr_db, noise_rng);
        }
        const TripDecision trip = trip_check(window, settings, pickup_count);
        if (!trip.tripped)
            throw GenerationError("generated window does not trip the relay: " +
                                  scenario_label(spec, index));
        ds.samples.push_back({std::move(window), label, spec});
        ++index;
    };

    for (FaultType type : config.fault_types)
        for (double z : config.impedances_ohm)
            for (double loc : config.locations_frac)
                for (int angle : config.inception_angles_ms)
                    for (double load : config.fault_loads_pu) {
                        ScenarioSpec spec;
                        spec.kind = ScenarioSpec::Kind::Fault;
                        spec.load_pu = load;
                        spec.seed = derive_seed(seed, index);
                        spec.fault = FaultSpec{type, loc, z, angle};
                        if (config.noise_enabled) {
                            Rng snr_rng(derive_seed(spec.seed, kSnrStream));
                            spec.snr_db = snr_rng.uniform(config.snr_min_db, config.snr_max_db);
                        }
                        spec.validate();
                        finish_sample(synth_fault(spec, model), spec, kLabelFault);
                    }

    for (std::size_t draw = 0; draw < config.fdia_alpha_draws; ++draw)
        for (int onset : config.fdia_onsets)
            for (double load : config.fdia_loads_pu) {
                ScenarioSpec spec;
                spec.kind = ScenarioSpec::Kind::Fdia;
                spec.load_pu = load;
                spec.seed = derive_seed(seed, index);
                if (config.noise_enabled) {
                    Rng snr_rng(derive_seed(spec.seed, kSnrStream));
                    spec.snr_db = snr_rng.uniform(config.snr_min_db, config.snr_max_db);
                }
                Rng alpha_rng(derive_seed(spec.seed, kAlphaStream));
                const auto alpha =
                    sample_fdia_alpha(settings, normal_remote_phasors(spec, model), alpha_rng);
                spec.fdia = FdiaSpec{alpha, onset};
                spec.validate();
                MeasurementWindow base = synth_normal(spec, model);
                finish_sample(apply_fdia(base, alpha, onset), spec, kLabelFdia);
            }

    ds.refresh_counts();
    return ds;
}

std::pair<Dataset, Dataset> split(const Dataset& ds, double test_fraction,
                                  std::uint64_t seed) {
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        throw ParameterError("test_fraction must lie in (0, 1)");
    std::array<std::vector<std::size_t>, 2> by_class;
    for (std::size_t i = 0; i < ds.size(); ++i)
        by_class[ds.samples[i].label == kLabelFdia ? 1 : 0].push_back(i);
    for (const auto& idx : by_class)
        if (idx.size() < 2)
            throw DataError("stratified split needs at least 2 samples per class");

    Dataset train, test;
    train.manifest = ds.manifest;
    test.manifest = ds.manifest;
    train.manifest.attack.reset();
    test.manifest.attack.reset();

    Rng rng(derive_seed(seed, kSplitStream));
    for (auto& idx : by_class) {
        shuffle(idx, rng);
        const std::size_t n_test =
            static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(idx.size())));
        for (std::size_t k = 0; k < idx.size(); ++k)
            (k < n_test ? test : train).samples.push_back(ds.samples[idx[k]]);
    }
    train.refresh_counts();
    test.refresh_counts();
    return {std::move(train), std::move(test)};
}

Tensor Scaler::apply(const MeasurementWindow& window) const {
    Tensor x({static_cast<std::size_t>(kChannels), static_cast<std::size_t>(window.length)});
    for (int ch = 0; ch < kChannels; ++ch)
        for (int t = 0; t < window.length; ++t)
            x.at(ch, t) = (window.at(ch, t) - mean[ch]) / stddev[ch];
    return x;
}

MeasurementWindow Scaler::invert(const Tensor& x, const MeasurementWindow& like) const {
    if (x.rank() != 2 || x.shape[0] != kChannels ||
        x.shape[1] != static_cast<std::size_t>(like.length))
        throw ParameterError("scaler invert: tensor shape does not match window");
    MeasurementWindow w = like;
    for (int ch = 0; ch < kChannels; ++ch)
        for (int t = 0; t < like.length; ++t)
            w.at(ch, t) = x.at(ch, t) * stddev[ch] + mean[ch];
    return w;
}

Scaler fit_scaler(const Dataset& train) {
    if (train.size() == 0) throw ParameterError("cannot fit scaler on empty dataset");
    Scaler s;
    const std::size_t n_per_channel = train.size() * train.samples.front().window.length;
    for (int ch = 0; ch < kChannels; ++ch) {
        double sum = 0.0;
        for (const auto& sample : train.samples)
            for (double v : sample.window.row(ch)) sum += v;
        const double mean = sum / static_cast<double>(n_per_channel);
        double sq = 0.0;
        for (const auto& sample : train.samples)
            for (double v : sample.window.row(ch)) sq += (v - mean) * (v - mean);
        const double var = sq / static_cast<double>(n_per_channel);
        if (var < 1e-24)
            throw DataError("zero-variance channel " + std::to_string(ch) +
                            "; cannot standardize");
        s.mean[ch] = mean;
        s.stddev[ch] = std::sqrt(var);
    }
    return s;
}

// ------------------------------------------------------------------- io

namespace {

constexpr const char* kManifestFile = "manifest.json";
constexpr const char* kSamplesFile = "samples.f32";
constexpr const char* kLabelsFile = "labels.u8";

static_assert(sizeof(float) == 4);

} // namespace

void save_dataset(const Dataset& ds, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);

    json manifest;
    manifest["format_version"] = ds.manifest.format_version;
    manifest["channel_layout"] = ds.manifest.channel_layout;
    manifest["sample_rate_hz"] = ds.manifest.sample_rate;
    manifest["base_frequency_hz"] = ds.manifest.base_frequency;
    manifest["window_length"] = ds.manifest.window_length;
    manifest["trigger_index"] = ds.manifest.trigger_index;
    manifest["counts"] = {{"fault", ds.manifest.fault_count},
                          {"fdia", ds.manifest.fdia_count}};
    manifest["generator_seed"] = ds.manifest.generator_seed;
    json scenarios = json::array();
    for (const auto& s : ds.samples) scenarios.push_back(scenario_to_json(s.scenario));
    manifest["scenarios"] = std::move(scenarios);
    if (ds.manifest.attack) {
        if (ds.manifest.attack->size() != ds.size())
            throw IoError("attack provenance length does not match sample count");
        json attack = json::array();
        for (const auto& a : *ds.manifest.attack)
            attack.push_back({{"attacked", a.attacked},
                              {"iterations", a.iterations},
                              {"epsilon", a.epsilon}});
        manifest["attack"] = std::move(attack);
    }

    if (ds.manifest.fault_count + ds.manifest.fdia_count != ds.size())
        throw IoError("manifest counts disagree with sample count");

    {
        std::ofstream os(dir / kManifestFile);
        if (!os) throw IoError("cannot write " + (dir / kManifestFile).string());
        os << manifest.dump(2) << "\n";
    }
    {
        std::ofstream os(dir / kSamplesFile, std::ios::binary);
        if (!os) throw IoError("cannot write " + (dir / kSamplesFile).string());
        std::vector<float> buf;
        for (const auto& s : ds.samples) {
            if (s.window.length != ds.manifest.window_length)
                throw IoError("sample window length differs from manifest");
            buf.resize(s.window.samples.size());
            for (std::size_t i = 0; i < buf.size(); ++i)
                buf[i] = static_cast<float>(s.window.samples[i]);
            os.write(reinterpret_cast<const char*>(buf.data()),
                     static_cast<std::streamsize>(buf.size() * sizeof(float)));
        }
    }
    {
        std::ofstream os(dir / kLabelsFile, std::ios::binary);
        if (!os) throw IoError("cannot write " + (dir / kLabelsFile).string());
        for (const auto& s : ds.samples) {
            const char b = static_cast<char>(s.label);
            os.write(&b, 1);
        }
    }
}

Dataset load_dataset(const std::filesystem::path& dir) {
    std::ifstream ms(dir / kManifestFile);
    if (!ms) throw IoError("cannot open " + (dir / kManifestFile).string());
    json manifest;
    try {
        ms >> manifest;
    } catch (const json::exception& e) {
        throw IoError("malformed manifest: " + std::string(e.what()));
    }

    Dataset ds;
    if (manifest.at("format_version").get<int>() != 1)
        throw IoError("unsupported dataset format version");
    ds.manifest.format_version = 1;
    ds.manifest.channel_layout = manifest.at("channel_layout").get<std::string>();
    ds.manifest.sample_rate = manifest.at("sample_rate_hz").get<double>();
    ds.manifest.base_frequency = manifest.at("base_frequency_hz").get<double>();
    ds.manifest.window_length = manifest.at("window_length").get<int>();
    ds.manifest.trigger_index = manifest.at("trigger_index").get<int>();
    ds.manifest.fault_count = manifest.at("counts").at("fault").get<std::size_t>();
    ds.manifest.fdia_count = manifest.at("counts").at("fdia").get<std::size_t>();
    ds.manifest.generator_seed = manifest.at("generator_seed").get<std::uint64_t>();

    const std::size_t n = ds.manifest.fault_count + ds.manifest.fdia_count;
    const json& scenarios = manifest.at("scenarios");
    if (scenarios.size() != n)
        throw IoError("manifest scenario list length disagrees with counts");

    const int t_len = ds.manifest.window_length;
    const std::size_t window_vals = static_cast<std::size_t>(kChannels) * t_len;

    std::ifstream ss(dir / kSamplesFile, std::ios::binary | std::ios::ate);
    if (!ss) throw IoError("cannot open " + (dir / kSamplesFile).string());
    const auto sample_bytes = static_cast<std::size_t>(ss.tellg());
    if (sample_bytes != n * window_vals * sizeof(float))
        throw IoError("samples.f32 size disagrees with manifest counts");
    ss.seekg(0);

    std::ifstream ls(dir / kLabelsFile, std::ios::binary | std::ios::ate);
    if (!ls) throw IoError("cannot open " + (dir / kLabelsFile).string());
    if (static_cast<std::size_t>(ls.tellg()) != n)
        throw IoError("labels.u8 size disagrees with manifest counts");
    ls.seekg(0);

    std::vector<float> buf(window_vals);
    std::size_t fault_seen = 0, fdia_seen = 0;
    ds.samples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        LabeledSample sample;
        sample.window.length = t_len;
        sample.window.sample_rate = ds.manifest.sample_rate;
        sample.window.base_frequency = ds.manifest.base_frequency;
        sample.window.trigger_index = ds.manifest.trigger_index;
        sample.window.samples.resize(window_vals);
        ss.read(reinterpret_cast<char*>(buf.data()),
                static_cast<std::streamsize>(buf.size() * sizeof(float)));
        if (!ss) throw IoError("samples.f32 truncated at sample " + std::to_string(i));
        for (std::size_t k = 0; k < window_vals; ++k)
            sample.window.samples[k] = static_cast<double>(buf[k]);

        char label_byte = 0;
        ls.read(&label_byte, 1);
        if (!ls) throw IoError("labels.u8 truncated");
        sample.label = static_cast<int>(label_byte);
        if (sample.label != kLabelFault && sample.label != kLabelFdia)
            throw IoError("label byte outside {0,1}");

        sample.scenario = scenario_from_json(scenarios[i]);
        const bool is_fdia = sample.scenario.kind == ScenarioSpec::Kind::Fdia;
        if ((sample.label == kLabelFdia) != is_fdia)
            throw IoError("label disagrees with scenario kind at sample " + std::to_string(i));
        (is_fdia ? fdia_seen : fault_seen) += 1;
        ds.samples.push_back(std::move(sample));
    }
    if (fault_seen != ds.manifest.fault_count || fdia_seen != ds.manifest.fdia_count)
        throw IoError("label counts disagree with manifest counts");

    if (manifest.contains("attack")) {
        const json& attack = manifest.at("attack");
        if (attack.size() != n) throw IoError("attack provenance length mismatch");
        std::vector<AttackProvenance> prov;
        prov.reserve(n);
        for (const auto& a : attack)
            prov.push_back({a.at("attacked").get<bool>(), a.at("iterations").get<int>(),
                            a.at("epsilon").get<double>()});
        ds.manifest.attack = std::move(prov);
    }
    return ds;
}

void export_csv(const Dataset& ds, const std::filesystem::path& file) {
    std::ofstream os(file);
    if (!os) throw IoError("cannot write " + file.string());
    os << "label";
    const int t_len = ds.manifest.window_length;
    for (int ch = 0; ch < kChannels; ++ch)
        for (int t = 0; t < t_len; ++t) os << ",ch" << ch << "_t" << t;
    os << "\n";
    char num[64];
    for (const auto& s : ds.samples) {
        os << s.label;
        for (double v : s.window.samples) {
            // round through float32 so the CSV matches the binary format
            const float f = static_cast<float>(v);
            const auto res = std::to_chars(num, num + sizeof(num), f);
            os << ',';
            os.write(num, res.ptr - num);
        }
        os << "\n";
    }
}

} // namespace lcdr
