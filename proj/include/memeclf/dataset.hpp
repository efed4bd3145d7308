#ifndef MEMECLF_DATASET_HPP
#define MEMECLF_DATASET_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "memeclf/labels.hpp"

namespace memeclf {

enum class SampleSource { main, external };
enum class SplitTag { train, external_train, test };

inline const char* source_name(SampleSource s) {
    return s == SampleSource::main ? "main" : "external";
}

struct MemeSample {
    std::string id;        // unique within a Dataset
    std::string text;      // pre-transcribed meme text, stored verbatim
    std::string image_ref; // path to an RGB image, decoded lazily
    std::optional<LabelVector> labels;
    SampleSource source = SampleSource::main;
};

// Immutable after construction; row order is preserved across loads.
struct Dataset {
    std::vector<MemeSample> samples;
    SplitTag split_tag = SplitTag::train;

    size_t size() const { return samples.size(); }
};

struct LoadReport {
    std::vector<std::string> warnings;
    // external loader only: skipped rows, one line per row with reason
    std::vector<std::string> rejects;
    size_t dropped = 0;
};

// Main corpus TSV: file_name<TAB>text[<TAB>five label columns].
// Column names matched case-insensitively; extra columns warned and ignored.
// Labeled rows failing the hierarchy rule abort the load with row numbers.
Dataset load_main_corpus(const std::string& path, bool labeled, LoadReport* report = nullptr);

// External TSV: file_name<TAB>text<TAB>offense_level. Keeps only rows whose
// offense level is in `accepted` (case-insensitive); kept rows become
// all-negative samples with source=external. Unknown levels are skipped and
// reported, not fatal.
Dataset load_external_negatives(const std::string& path,
                                const std::vector<std::string>& accepted,
                                LoadReport* report = nullptr);

std::vector<std::string> default_accepted_offense_levels();

// Concatenates a then b, prefixing every id with its source tag.
Dataset merge_datasets(const Dataset& a, const Dataset& b);

// Per-task positive rates over labeled samples.
std::array<double, kNumTasks> label_prevalence(const Dataset& ds);

// Serializes in the main-corpus TSV format (labeled iff every sample carries
// labels). Text cells are escaped; loading the result reproduces the input.
void save_main_corpus(const Dataset& ds, const std::string& path);

void write_rejects_report(const LoadReport& report, const std::string& path);

} // namespace memeclf

#endif
