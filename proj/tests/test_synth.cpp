#include <doctest.h>

#include <cmath>

#include "memeclf/encoders.hpp"
#include "memeclf/image.hpp"
#include "memeclf/synth.hpp"
#include "helpers.hpp"

using namespace memeclf;

TEST_SUITE("synth") {

TEST_CASE("label counts are exact at the calibrated rates") {
    // 2000 * (0.500, 0.127, 0.281, 0.220, 0.095)
    CHECK(synth_label_counts(2000) == std::array<int, 5>{1000, 254, 562, 440, 190});
    // 32-sample overfit corpus
    CHECK(synth_label_counts(32) == std::array<int, 5>{16, 4, 9, 7, 3});
}

TEST_CASE("generated labels hit the counts and satisfy the hierarchy") {
    const auto labels = synth_labels(2000, 7);
    REQUIRE(labels.size() == 2000);
    std::array<int, kNumTasks> counts{};
    for (const auto& v : labels) {
        CHECK(validate_hierarchy(v));
        for (int t = 0; t < kNumTasks; ++t) counts[static_cast<size_t>(t)] += v.bits[t];
    }
    CHECK(counts == synth_label_counts(2000));
}

TEST_CASE("labels are deterministic in the seed") {
    CHECK(synth_labels(200, 3) == synth_labels(200, 3));
    CHECK(synth_labels(200, 3) != synth_labels(200, 4));
}

TEST_CASE("corpus writes a loadable TSV and images that carry label signal") {
    testutil::TempDir tmp("synth");
    SynthSpec spec;
    spec.count = 12;
    spec.seed = 5;
    const Dataset ds = synthesize_corpus(spec, tmp.path());
    REQUIRE(ds.size() == 12);

    const Dataset loaded = load_main_corpus(tmp.str("corpus.tsv"), true);
    REQUIRE(loaded.size() == 12);
    for (size_t i = 0; i < loaded.size(); ++i) {
        CHECK(loaded.samples[i].id == ds.samples[i].id);
        CHECK(loaded.samples[i].text == ds.samples[i].text);
        CHECK(*loaded.samples[i].labels == *ds.samples[i].labels);
    }

    // Each task's text cue appears iff the label is positive.
    for (const auto& s : ds.samples) {
        for (int t = 0; t < kNumTasks; ++t) {
            const std::string cue = "cue" + task_names()[static_cast<size_t>(t)];
            const bool has_cue = s.text.find(cue) != std::string::npos;
            CHECK(has_cue == (s.labels->bits[t] != 0));
        }
    }

    // Band colors: a positive task band is red-dominant, a negative one
    // green-dominant, at the band's center row.
    for (const auto& s : ds.samples) {
        const ImageTensor img = load_and_resize(s.image_ref, 256);
        for (int t = 0; t < kNumTasks; ++t) {
            const int y = (2 * t + 1) * 256 / (2 * kNumTasks);
            const double r = img.at(y, 128, 0);
            const double g = img.at(y, 128, 1);
            if (s.labels->bits[t])
                CHECK(r > g);
            else
                CHECK(g > r);
        }
    }
}

TEST_CASE("images flag skips PNG output but keeps the TSV") {
    testutil::TempDir tmp("synthnoimg");
    SynthSpec spec;
    spec.count = 8;
    spec.seed = 9;
    spec.images = false;
    const Dataset ds = synthesize_corpus(spec, tmp.path());
    CHECK_FALSE(std::filesystem::exists(ds.samples[0].image_ref));
    CHECK(std::filesystem::exists(tmp.str("corpus.tsv")));
}

TEST_CASE("rerunning the generator is byte-identical") {
    testutil::TempDir a("syntha"), b("synthb");
    SynthSpec spec;
    spec.count = 6;
    spec.seed = 11;
    synthesize_corpus(spec, a.path());
    synthesize_corpus(spec, b.path());
    CHECK(testutil::read_file(a.str("corpus.tsv")) == testutil::read_file(b.str("corpus.tsv")));
    CHECK(testutil::read_file(a.str("meme_0.png")) == testutil::read_file(b.str("meme_0.png")));
}

} // TEST_SUITE
