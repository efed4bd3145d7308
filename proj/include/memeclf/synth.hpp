#ifndef MEMECLF_SYNTH_HPP
#define MEMECLF_SYNTH_HPP

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>

#include "memeclf/dataset.hpp"

namespace memeclf {

// Per-task positive rates the generator is calibrated to. The four
// subcategory positives are drawn from inside the misogynous set, so every
// generated label vector satisfies the hierarchy rule by construction.
inline constexpr std::array<double, kNumTasks> kSynthRates = {0.500, 0.127, 0.281, 0.220,
                                                              0.095};

// Exact positive counts for a corpus of n samples: round(rate * n) per task.
std::array<int, kNumTasks> synth_label_counts(int n);

struct SynthSpec {
    int count = 2000;
    uint64_t seed = 7;
    bool images = true; // write one PNG per sample next to the TSV
    int image_side = 256;
    std::string id_prefix = "meme_";
};

// Generates a labeled corpus: token-string texts that carry each task's
// label as a dedicated word, and procedural band-pattern images whose colors
// encode the labels coarsely enough to survive grid sampling. Writes
// out_dir/corpus.tsv (main-corpus format) plus the images, and returns the
// loaded dataset. Deterministic in (spec, out_dir).
Dataset synthesize_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

// The label portion of the generator, exposed for tests that need calibrated
// label sets without touching the filesystem.
std::vector<LabelVector> synth_labels(int n, uint64_t seed);

} // namespace memeclf

#endif
