#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include "lcdr/dataset.hpp"
#include "lcdr/errors.hpp"
#include "lcdr/waveform.hpp"
#include "test_support.hpp"

using namespace lcdr;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir(const char* tag) {
    const fs::path dir = fs::temp_directory_path() / (std::string("lcdr_test_") + tag);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string read_bytes(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    REQUIRE(is);
    return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

/// Label-only dataset with tiny windows; split() never inspects waveforms.
Dataset synthetic_labels(std::size_t faults, std::size_t fdias) {
    Dataset ds;
    ds.manifest.sample_rate = 1000;
    ds.manifest.base_frequency = 60;
    ds.manifest.window_length = 4;
    ds.manifest.trigger_index = 2;
    auto push = [&](int label, std::size_t i) {
        LabeledSample s;
        s.window.length = 4;
        s.window.sample_rate = 1000;
        s.window.base_frequency = 60;
        s.window.trigger_index = 2;
        s.window.samples.assign(kChannels * 4, static_cast<double>(i));
        s.label = label;
        s.scenario.kind = label == kLabelFdia ? ScenarioSpec::Kind::Fdia
                                              : ScenarioSpec::Kind::Fault;
        ds.samples.push_back(std::move(s));
    };
    for (std::size_t i = 0; i < faults; ++i) push(kLabelFault, i);
    for (std::size_t i = 0; i < fdias; ++i) push(kLabelFdia, faults + i);
    ds.refresh_counts();
    return ds;
}

} // namespace

TEST_CASE("grid sizes multiply out, including the default desk scale") {
    GenerationConfig desk;
    CHECK(desk.fault_total() == 11 * 5 * 5 * 4 * 2); // 2200
    CHECK(desk.fault_total() == 2200);
    CHECK(desk.fdia_total() == 500 * 2 * 2); // 2000
    const GenerationConfig g = test::small_grid();
    CHECK(g.fault_total() == 2 * 2 * 2 * 2 * 1);
    CHECK(g.fdia_total() == 8 * 1 * 2);
}

TEST_CASE("generated corpus is labeled, relay-consistent, and deterministic") {
    const SystemModel model;
    const RelaySettings settings;
    const GenerationConfig g = test::small_grid();
    const Dataset a = generate_dataset(g, model, settings, 77);
    REQUIRE(a.size() == g.fault_total() + g.fdia_total());
    CHECK(a.manifest.fault_count == g.fault_total());
    CHECK(a.manifest.fdia_count == g.fdia_total());
    for (const auto& s : a.samples) {
        CHECK((s.label == kLabelFdia) ==
              (s.scenario.kind == ScenarioSpec::Kind::Fdia));
        CHECK(trip_check(s.window, settings).tripped);
    }

    const Dataset b = generate_dataset(g, model, settings, 77);
    REQUIRE(b.size() == a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK(a.samples[i].window.samples == b.samples[i].window.samples);

    const auto dir_a = temp_dir("gen_a");
    const auto dir_b = temp_dir("gen_b");
    save_dataset(a, dir_a);
    save_dataset(b, dir_b);
    CHECK(read_bytes(dir_a / "samples.f32") == read_bytes(dir_b / "samples.f32"));
    CHECK(read_bytes(dir_a / "manifest.json") == read_bytes(dir_b / "manifest.json"));
}

TEST_CASE("empty grid dimensions are rejected") {
    GenerationConfig g = test::small_grid();
    g.impedances_ohm.clear();
    const SystemModel model;
    CHECK_THROWS_AS(generate_dataset(g, model, RelaySettings{}, 1), ParameterError);
}

TEST_CASE("stratified split: desk-scale arithmetic") {
    const Dataset ds = synthetic_labels(2200, 2000);
    const auto [train_set, test_set] = split(ds, 0.2, 5);
    CHECK(test_set.manifest.fault_count == 440);
    CHECK(test_set.manifest.fdia_count == 400);
    CHECK(train_set.manifest.fault_count == 1760);
    CHECK(train_set.manifest.fdia_count == 1600);
}

TEST_CASE("stratified split: full-scale corpus counts") {
    const Dataset ds = synthetic_labels(25560, 23040);
    const auto [train_set, test_set] = split(ds, 0.2, 5);
    CHECK(test_set.manifest.fault_count == 5112);
    CHECK(test_set.manifest.fdia_count == 4608);
}

TEST_CASE("split partitions the multiset exactly") {
    const SystemModel model;
    const Dataset ds = generate_dataset(test::small_grid(), model, RelaySettings{}, 3);
    const auto [train_set, test_set] = split(ds, 0.25, 11);
    CHECK(train_set.size() + test_set.size() == ds.size());

    auto fingerprint = [](const Dataset& d) {
        std::multiset<std::pair<int, std::vector<double>>> out;
        for (const auto& s : d.samples) out.insert({s.label, s.window.samples});
        return out;
    };
    auto all = fingerprint(train_set);
    for (const auto& s : test_set.samples) all.insert({s.label, s.window.samples});
    CHECK(all == fingerprint(ds));

    // per-class fraction within one sample
    CHECK(std::llabs(static_cast<long long>(test_set.manifest.fault_count) -
                     std::llround(0.25 * ds.manifest.fault_count)) <= 1);

    // deterministic in the seed
    const auto [train2, test2] = split(ds, 0.25, 11);
    REQUIRE(train2.size() == train_set.size());
    for (std::size_t i = 0; i < train2.size(); ++i)
        CHECK(train2.samples[i].window.samples == train_set.samples[i].window.samples);
}

TEST_CASE("split rejects classes with fewer than two samples") {
    const Dataset ds = synthetic_labels(10, 1);
    CHECK_THROWS_AS(split(ds, 0.2, 1), DataError);
    CHECK_THROWS_AS(split(synthetic_labels(4, 4), 0.0, 1), ParameterError);
}

TEST_CASE("scaler standardizes, inverts, and rejects degenerate channels") {
    const SystemModel model;
    const Dataset ds = generate_dataset(test::small_grid(), model, RelaySettings{}, 9);
    const Scaler scaler = fit_scaler(ds);

    SUBCASE("scaled moments are 0 and 1") {
        for (int ch = 0; ch < kChannels; ++ch) {
            double sum = 0.0, sq = 0.0;
            std::size_t n = 0;
            for (const auto& s : ds.samples) {
                const Tensor x = scaler.apply(s.window);
                for (std::size_t t = 0; t < x.shape[1]; ++t) {
                    sum += x.at(ch, t);
                    sq += x.at(ch, t) * x.at(ch, t);
                    ++n;
                }
            }
            const double mean = sum / n;
            const double stddev = std::sqrt(sq / n - mean * mean);
            CHECK(std::abs(mean) < 1e-9);
            CHECK(std::abs(stddev - 1.0) < 1e-9);
        }
    }

    SUBCASE("apply then invert is the identity to 1e-12 relative") {
        const auto& w = ds.samples.front().window;
        const MeasurementWindow back = scaler.invert(scaler.apply(w), w);
        for (std::size_t i = 0; i < w.samples.size(); ++i)
            CHECK(back.samples[i] ==
                  doctest::Approx(w.samples[i]).epsilon(1e-12).scale(1.0));
    }

    SUBCASE("constant channel is an error") {
        Dataset degenerate = ds;
        for (auto& s : degenerate.samples)
            for (int t = 0; t < s.window.length; ++t) s.window.at(2, t) = 3.14;
        CHECK_THROWS_AS(fit_scaler(degenerate), DataError);
    }
}

TEST_CASE("dataset save/load round-trips bit-exactly") {
    const SystemModel model;
    const RelaySettings settings;
    const Dataset ds = generate_dataset(test::small_grid(), model, settings, 21);
    const auto dir1 = temp_dir("rt1");
    const auto dir2 = temp_dir("rt2");
    save_dataset(ds, dir1);
    const Dataset loaded = load_dataset(dir1);
    save_dataset(loaded, dir2);
    for (const char* f : {"manifest.json", "samples.f32", "labels.u8"})
        CHECK(read_bytes(dir1 / f) == read_bytes(dir2 / f));

    // loaded windows re-pass the relay check (float32 quantization is far
    // below the trip margins)
    for (const auto& s : loaded.samples)
        CHECK(trip_check(s.window, settings).tripped);
}

TEST_CASE("load rejects truncation and manifest disagreements") {
    const SystemModel model;
    const Dataset ds = generate_dataset(test::small_grid(), model, RelaySettings{}, 2);
    const auto dir = temp_dir("corrupt");
    save_dataset(ds, dir);

    SUBCASE("truncated samples.f32") {
        const auto bytes = read_bytes(dir / "samples.f32");
        std::ofstream os(dir / "samples.f32", std::ios::binary | std::ios::trunc);
        os.write(bytes.data(), static_cast<std::streamsize>(bytes.size() - 7));
        os.close();
        CHECK_THROWS_AS(load_dataset(dir), IoError);
    }
    SUBCASE("manifest count disagreement") {
        auto text = read_bytes(dir / "manifest.json");
        const std::string needle = "\"fault\": " + std::to_string(ds.manifest.fault_count);
        const std::string repl = "\"fault\": " + std::to_string(ds.manifest.fault_count + 1);
        const auto pos = text.find(needle);
        REQUIRE(pos != std::string::npos);
        text.replace(pos, needle.size(), repl);
        std::ofstream(dir / "manifest.json", std::ios::trunc) << text;
        CHECK_THROWS_AS(load_dataset(dir), IoError);
    }
    SUBCASE("missing directory") {
        CHECK_THROWS_AS(load_dataset(dir / "nope"), IoError);
    }
}

TEST_CASE("csv export carries one row per sample with the full channel layout") {
    const SystemModel model;
    const Dataset ds = generate_dataset(test::small_grid(), model, RelaySettings{}, 4);
    const auto dir = temp_dir("csv");
    const auto file = dir / "corpus.csv";
    export_csv(ds, file);

    std::ifstream is(file);
    std::string header;
    std::getline(is, header);
    CHECK(std::count(header.begin(), header.end(), ',') == kChannels * 66);
    CHECK(header.substr(0, 11) == "label,ch0_t");
    std::size_t rows = 0;
    std::string line;
    while (std::getline(is, line))
        if (!line.empty()) ++rows;
    CHECK(rows == ds.size());
}
