#ifndef MEMECLF_PREDICTIONS_HPP
#define MEMECLF_PREDICTIONS_HPP

#include <string>
#include <vector>

#include "memeclf/labels.hpp"

namespace memeclf {

// N x T probabilities in [0,1], row-aligned with sample ids.
struct PredictionMatrix {
    std::vector<std::string> tasks; // column names, canonical order subset
    std::vector<std::string> ids;
    std::vector<std::vector<double>> values; // ids.size() rows x tasks.size() cols

    size_t rows() const { return ids.size(); }
    size_t cols() const { return tasks.size(); }

    // Stable sort of rows by id; ids are unique so order is total.
    void sort_by_id();
    void validate() const;
};

// TSV with header sample_id<TAB>task..., 6-decimal fixed point.
void save_predictions(const PredictionMatrix& m, const std::string& path);

// Accepts the header format above, or headerless submission rows (tasks then
// inferred from the column count: 1 -> misogynous, 5 -> canonical order).
PredictionMatrix load_predictions(const std::string& path);

// Weighted average alpha*y1 + (1-alpha)*y2 after aligning rows by id.
// Inputs must hold the same task list and the same id set.
PredictionMatrix ensemble(const PredictionMatrix& y1, const PredictionMatrix& y2, double alpha);

// Stage-3 hierarchy correction: rows whose stage-2 misogyny probability is
// below the threshold get all four subcategory columns zeroed; when
// replace_misogynous is set the misogynous column is overwritten with the
// stage-2 probability on every row.
PredictionMatrix hierarchy_postprocess(const PredictionMatrix& subtask_b,
                                       const PredictionMatrix& misogyny,
                                       double threshold = 0.5,
                                       bool replace_misogynous = true);

// 1 iff value >= threshold (boundary inclusive).
PredictionMatrix binarize(const PredictionMatrix& probs, double threshold = 0.5);

// Submission rows: sample_id<TAB>binary labels, no header.
void save_submission(const PredictionMatrix& binary, const std::string& path);

} // namespace memeclf

#endif
