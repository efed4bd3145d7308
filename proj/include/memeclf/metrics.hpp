#ifndef MEMECLF_METRICS_HPP
#define MEMECLF_METRICS_HPP

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "memeclf/labels.hpp"

namespace memeclf {

// Positive-class F1. Convention: F1 := 0 when precision + recall = 0
// (also when the class never occurs in pred or gold).
double f1_binary(const std::vector<int>& pred, const std::vector<int>& gold, int positive_class);

// Mean of the class-0 and class-1 F1 scores.
double macro_f1_binary_task(const std::vector<int>& pred, const std::vector<int>& gold);

struct MultilabelF1 {
    std::array<double, kNumTasks> per_label{};  // positive-class F1 per task
    std::array<long, kNumTasks> support{};      // gold positive counts
    double macro = 0.0;                         // unweighted mean over tasks
    double weighted = 0.0;                      // support-weighted mean
};

// pred/gold: N rows of 5 binary cells in canonical task order.
MultilabelF1 multilabel_f1(const std::vector<std::array<int, kNumTasks>>& pred,
                           const std::vector<std::array<int, kNumTasks>>& gold);

struct ResultEntry {
    std::string method;
    std::optional<double> sub_task_a;
    std::optional<double> sub_task_b;
};

struct ResultsTable {
    std::string text; // aligned plain-text table
    std::string tsv;  // machine-readable variant
};

// Renders entries in the order given; missing scores print as "-".
ResultsTable results_table(const std::vector<ResultEntry>& entries);

} // namespace memeclf

#endif
