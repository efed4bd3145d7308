#ifndef MEMECLF_FOLDS_HPP
#define MEMECLF_FOLDS_HPP

#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "memeclf/dataset.hpp"

namespace memeclf {

struct FoldPlan {
    int k = 0;
    std::map<std::string, int> assignment; // sample id -> fold in [0, k)
    uint64_t seed = 0;

    int fold_of(const std::string& id) const;
};

// Iterative stratification: repeatedly take the label with the fewest
// remaining positives and assign each of its remaining samples to the fold
// with the greatest remaining demand for that label; ties break to the fold
// with the most remaining capacity, then seeded-random. Samples without any
// positive label are placed by capacity at the end. Deterministic given
// (dataset order, k, seed).
FoldPlan stratified_kfold(const Dataset& dataset, int k, uint64_t seed);

struct FoldBalanceReport {
    int k = 0;
    std::vector<std::array<double, kNumTasks>> fold_rates; // k x 5 positive rates
    std::vector<size_t> fold_sizes;
    std::array<double, kNumTasks> global_rates{};
    double max_abs_deviation = 0.0;

    std::string to_tsv() const;
};

FoldBalanceReport fold_balance_report(const FoldPlan& plan, const Dataset& dataset);

// TSV: sample_id<TAB>fold, dataset order. Byte-identical for identical inputs.
void save_fold_plan(const FoldPlan& plan, const Dataset& dataset, const std::string& path);
FoldPlan load_fold_plan(const std::string& path);

} // namespace memeclf

#endif
