#include "memeclf/folds.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "memeclf/rng.hpp"
#include "memeclf/tsv.hpp"

namespace memeclf {

int FoldPlan::fold_of(const std::string& id) const {
    auto it = assignment.find(id);
    if (it == assignment.end())
        throw ArgumentError("fold plan does not cover sample id '" + id + "'");
    return it->second;
}

FoldPlan stratified_kfold(const Dataset& dataset, int k, uint64_t seed) {
    const size_t n = dataset.size();
    if (k < 2) throw ArgumentError("stratified_kfold: k must be >= 2, got " + std::to_string(k));
    if (static_cast<size_t>(k) > n)
        throw ArgumentError("stratified_kfold: k=" + std::to_string(k) +
                            " exceeds dataset size " + std::to_string(n));
    for (const auto& s : dataset.samples)
        if (!s.labels)
            throw ArgumentError("stratified_kfold: sample '" + s.id + "' is unlabeled");

    auto rng = RngKey(seed).with("stratified_kfold").stream();

    std::vector<bool> assigned(n, false);
    std::vector<int> fold_of(n, -1);

    // Remaining per-fold demand for each label, and remaining fold capacity.
    std::array<std::vector<double>, kNumTasks> demand;
    std::array<long, kNumTasks> remaining_positives{};
    for (int t = 0; t < kNumTasks; ++t) {
        long pos = 0;
        for (const auto& s : dataset.samples) pos += s.labels->bits[t];
        remaining_positives[t] = pos;
        demand[t].assign(k, static_cast<double>(pos) / k);
    }
    std::vector<double> capacity(k, static_cast<double>(n) / k);

    auto pick_fold = [&](int label) {
        // argmax demand, tie -> argmax capacity, tie -> seeded-random
        std::vector<int> best;
        double best_demand = -std::numeric_limits<double>::infinity();
        for (int f = 0; f < k; ++f) {
            double d = label >= 0 ? demand[label][f] : 0.0;
            if (d > best_demand) {
                best_demand = d;
                best.assign(1, f);
            } else if (d == best_demand) {
                best.push_back(f);
            }
        }
        if (best.size() > 1) {
            std::vector<int> cap_best;
            double best_cap = -std::numeric_limits<double>::infinity();
            for (int f : best) {
                if (capacity[f] > best_cap) {
                    best_cap = capacity[f];
                    cap_best.assign(1, f);
                } else if (capacity[f] == best_cap) {
                    cap_best.push_back(f);
                }
            }
            best = std::move(cap_best);
        }
        if (best.size() == 1) return best[0];
        return best[static_cast<size_t>(rng.uniform_int(0, static_cast<int64_t>(best.size()) - 1))];
    };

    auto place = [&](size_t i, int f) {
        assigned[i] = true;
        fold_of[i] = f;
        capacity[f] -= 1.0;
        for (int t = 0; t < kNumTasks; ++t) {
            if (dataset.samples[i].labels->bits[t]) {
                demand[t][f] -= 1.0;
                remaining_positives[t] -= 1;
            }
        }
    };

    while (true) {
        // Rarest label with positives still unassigned.
        int label = -1;
        long fewest = std::numeric_limits<long>::max();
        for (int t = 0; t < kNumTasks; ++t) {
            if (remaining_positives[t] > 0 && remaining_positives[t] < fewest) {
                fewest = remaining_positives[t];
                label = t;
            }
        }
        if (label < 0) break;
        for (size_t i = 0; i < n; ++i) {
            if (assigned[i] || !dataset.samples[i].labels->bits[label]) continue;
            place(i, pick_fold(label));
        }
    }
    // All-negative rows: balance by capacity.
    for (size_t i = 0; i < n; ++i) {
        if (!assigned[i]) place(i, pick_fold(-1));
    }

    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    for (size_t i = 0; i < n; ++i) plan.assignment[dataset.samples[i].id] = fold_of[i];
    return plan;
}

FoldBalanceReport fold_balance_report(const FoldPlan& plan, const Dataset& dataset) {
    if (plan.assignment.size() != dataset.size())
        throw ArgumentError("fold_balance_report: plan covers " +
                            std::to_string(plan.assignment.size()) + " ids, dataset has " +
                            std::to_string(dataset.size()));
    FoldBalanceReport rep;
    rep.k = plan.k;
    rep.fold_rates.assign(plan.k, {});
    rep.fold_sizes.assign(plan.k, 0);

    std::vector<std::array<long, kNumTasks>> counts(plan.k, std::array<long, kNumTasks>{});
    std::array<long, kNumTasks> global_counts{};
    for (const auto& s : dataset.samples) {
        if (!s.labels)
            throw ArgumentError("fold_balance_report: sample '" + s.id + "' is unlabeled");
        int f = plan.fold_of(s.id);
        if (f < 0 || f >= plan.k)
            throw ArgumentError("fold_balance_report: fold index out of range for '" + s.id + "'");
        rep.fold_sizes[f]++;
        for (int t = 0; t < kNumTasks; ++t) {
            counts[f][t] += s.labels->bits[t];
            global_counts[t] += s.labels->bits[t];
        }
    }
    for (int t = 0; t < kNumTasks; ++t)
        rep.global_rates[t] = static_cast<double>(global_counts[t]) / dataset.size();
    for (int f = 0; f < plan.k; ++f) {
        for (int t = 0; t < kNumTasks; ++t) {
            double rate = rep.fold_sizes[f] ? static_cast<double>(counts[f][t]) / rep.fold_sizes[f] : 0.0;
            rep.fold_rates[f][t] = rate;
            rep.max_abs_deviation = std::max(rep.max_abs_deviation,
                                             std::abs(rate - rep.global_rates[t]));
        }
    }
    return rep;
}

std::string FoldBalanceReport::to_tsv() const {
    std::string out = "fold\tsize";
    for (const auto& t : task_names()) out += "\t" + t;
    out += "\n";
    char buf[64];
    for (int f = 0; f < k; ++f) {
        out += std::to_string(f) + "\t" + std::to_string(fold_sizes[f]);
        for (int t = 0; t < kNumTasks; ++t) {
            std::snprintf(buf, sizeof(buf), "\t%.6f", fold_rates[f][t]);
            out += buf;
        }
        out += "\n";
    }
    out += "global\t";
    size_t total = 0;
    for (auto s : fold_sizes) total += s;
    out += std::to_string(total);
    for (int t = 0; t < kNumTasks; ++t) {
        std::snprintf(buf, sizeof(buf), "\t%.6f", global_rates[t]);
        out += buf;
    }
    out += "\n";
    std::snprintf(buf, sizeof(buf), "%.6f", max_abs_deviation);
    out += "max_abs_deviation\t" + std::string(buf) + "\n";
    return out;
}

void save_fold_plan(const FoldPlan& plan, const Dataset& dataset, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "sample_id\tfold\n";
    for (const auto& s : dataset.samples)
        out << s.id << '\t' << plan.fold_of(s.id) << '\n';
}

FoldPlan load_fold_plan(const std::string& path) {
    auto lines = tsv::read_lines(path);
    if (lines.empty() || tsv::split_line(lines[0]) != std::vector<std::string>{"sample_id", "fold"})
        throw DataError(path + ": expected fold plan header 'sample_id\\tfold'");
    FoldPlan plan;
    int max_fold = -1;
    for (size_t row = 1; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        auto cells = tsv::split_line(lines[row]);
        if (cells.size() != 2)
            throw DataError(path + ": row " + std::to_string(row) + ": expected 2 cells");
        int fold;
        try {
            fold = std::stoi(cells[1]);
        } catch (const std::exception&) {
            throw DataError(path + ": row " + std::to_string(row) + ": bad fold index '" +
                            cells[1] + "'");
        }
        if (fold < 0)
            throw DataError(path + ": row " + std::to_string(row) + ": negative fold index");
        if (!plan.assignment.emplace(cells[0], fold).second)
            throw DataError(path + ": duplicate sample id '" + cells[0] + "'");
        max_fold = std::max(max_fold, fold);
    }
    plan.k = max_fold + 1;
    return plan;
}

} // namespace memeclf
