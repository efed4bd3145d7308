#include "memeclf/synth.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "memeclf/errors.hpp"
#include "memeclf/image.hpp"
#include "memeclf/rng.hpp"

namespace memeclf {

namespace {

// Seeded partial shuffle: returns `take` distinct elements of `pool`.
std::vector<int> sample_without_replacement(std::vector<int> pool, int take, RngStream rng) {
    for (size_t i = pool.size(); i > 1; --i)
        std::swap(pool[i - 1], pool[rng.uniform_int(0, static_cast<int64_t>(i) - 1)]);
    pool.resize(static_cast<size_t>(take));
    return pool;
}

const std::array<std::string, 8>& filler_words() {
    static const std::array<std::string, 8> words = {"panel",  "caption", "photo",   "poster",
                                                     "frame",  "banner",  "sticker", "collage"};
    return words;
}

std::string sample_text(const LabelVector& labels, RngStream& rng) {
    std::string text = filler_words()[static_cast<size_t>(rng.uniform_int(0, 7))];
    for (int t = 0; t < kNumTasks; ++t) {
        text += ' ';
        text += labels.bits[t] ? "cue" : "plain";
        text += task_names()[static_cast<size_t>(t)];
    }
    text += ' ';
    text += filler_words()[static_cast<size_t>(rng.uniform_int(0, 7))];
    return text;
}

// Five horizontal bands, one per task. A positive label turns its band warm
// (high red), a negative one cool (high green); the blue channel varies per
// sample. Bands are tall enough that an 8x8 grid sample lands in every band.
ImageTensor sample_image(const LabelVector& labels, int side, RngStream& rng) {
    ImageTensor img = ImageTensor::filled(side, side, 0.0);
    const double blue = rng.uniform(0.2, 0.8);
    std::array<double, kNumTasks> jitter;
    for (auto& j : jitter) j = rng.uniform(-0.1, 0.1);
    for (int y = 0; y < side; ++y) {
        const int band = std::min(kNumTasks - 1, y * kNumTasks / side);
        const bool pos = labels.bits[band] != 0;
        const double r = std::clamp((pos ? 0.8 : 0.2) + jitter[band], 0.0, 1.0);
        const double g = std::clamp((pos ? 0.2 : 0.8) - jitter[band], 0.0, 1.0);
        for (int x = 0; x < side; ++x) {
            img.at(y, x, 0) = r;
            img.at(y, x, 1) = g;
            img.at(y, x, 2) = blue;
        }
    }
    return img;
}

} // namespace

std::array<int, kNumTasks> synth_label_counts(int n) {
    std::array<int, kNumTasks> counts;
    for (int t = 0; t < kNumTasks; ++t)
        counts[t] = static_cast<int>(std::lround(kSynthRates[t] * n));
    return counts;
}

std::vector<LabelVector> synth_labels(int n, uint64_t seed) {
    if (n < 1) throw ArgumentError("synth: sample count must be >= 1");
    const auto counts = synth_label_counts(n);

    std::vector<int> all(n);
    std::iota(all.begin(), all.end(), 0);
    const std::vector<int> mis = sample_without_replacement(
        all, counts[0], RngKey(seed).with("labels").with(task_names()[0]).stream());

    std::vector<LabelVector> labels(static_cast<size_t>(n));
    for (int i : mis) labels[static_cast<size_t>(i)][Task::misogynous] = 1;
    for (int t = 1; t < kNumTasks; ++t) {
        const std::vector<int> chosen = sample_without_replacement(
            mis, counts[t], RngKey(seed).with("labels").with(task_names()[t]).stream());
        for (int i : chosen) labels[static_cast<size_t>(i)].bits[t] = 1;
    }
    return labels;
}

Dataset synthesize_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir) {
    if (spec.image_side < 8) throw ArgumentError("synth: image side must be >= 8");
    const auto labels = synth_labels(spec.count, spec.seed);
    std::filesystem::create_directories(out_dir);

    // Zero-padded ids keep lexicographic and numeric order identical.
    int digits = 1;
    for (int v = spec.count - 1; v >= 10; v /= 10) ++digits;

    Dataset ds;
    ds.samples.reserve(labels.size());
    for (int i = 0; i < spec.count; ++i) {
        std::string num = std::to_string(i);
        num.insert(0, static_cast<size_t>(digits) - num.size(), '0');

        MemeSample s;
        s.id = spec.id_prefix + num + ".png";
        s.image_ref = (out_dir / s.id).string();
        s.labels = labels[static_cast<size_t>(i)];
        auto text_rng = RngKey(spec.seed).with("text").with(s.id).stream();
        s.text = sample_text(*s.labels, text_rng);
        s.source = SampleSource::main;

        if (spec.images) {
            auto image_rng = RngKey(spec.seed).with("image").with(s.id).stream();
            save_png(sample_image(*s.labels, spec.image_side, image_rng), s.image_ref);
        }
        ds.samples.push_back(std::move(s));
    }

    save_main_corpus(ds, (out_dir / "corpus.tsv").string());
    return ds;
}

} // namespace memeclf
