#include "memeclf/predictions.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <unordered_set>

#include "memeclf/errors.hpp"
#include "memeclf/tsv.hpp"

namespace memeclf {

void PredictionMatrix::sort_by_id() {
    std::vector<size_t> order(ids.size());
    std::iota(order.begin(), order.end(), size_t{0});
    std::sort(order.begin(), order.end(),
              [this](size_t a, size_t b) { return ids[a] < ids[b]; });
    std::vector<std::string> new_ids(ids.size());
    std::vector<std::vector<double>> new_values(values.size());
    for (size_t i = 0; i < order.size(); ++i) {
        new_ids[i] = std::move(ids[order[i]]);
        new_values[i] = std::move(values[order[i]]);
    }
    ids = std::move(new_ids);
    values = std::move(new_values);
}

void PredictionMatrix::validate() const {
    if (values.size() != ids.size())
        throw DataError("prediction matrix: " + std::to_string(ids.size()) + " ids but " +
                        std::to_string(values.size()) + " rows");
    std::unordered_set<std::string> seen;
    for (size_t i = 0; i < ids.size(); ++i) {
        if (!seen.insert(ids[i]).second)
            throw DataError("prediction matrix: duplicate id '" + ids[i] + "'");
        if (values[i].size() != tasks.size())
            throw DataError("prediction matrix: row '" + ids[i] + "' has " +
                            std::to_string(values[i].size()) + " cells, expected " +
                            std::to_string(tasks.size()));
        for (double v : values[i])
            if (!std::isfinite(v) || v < 0.0 || v > 1.0)
                throw DataError("prediction matrix: row '" + ids[i] +
                                "' has value outside [0,1]");
    }
}

void save_predictions(const PredictionMatrix& m, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    out << "sample_id";
    for (const auto& t : m.tasks) out << '\t' << t;
    out << '\n';
    char buf[32];
    for (size_t i = 0; i < m.rows(); ++i) {
        out << m.ids[i];
        for (double v : m.values[i]) {
            std::snprintf(buf, sizeof(buf), "%.6f", v);
            out << '\t' << buf;
        }
        out << '\n';
    }
}

PredictionMatrix load_predictions(const std::string& path) {
    auto lines = tsv::read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty prediction file");

    PredictionMatrix m;
    size_t first_row = 0;
    auto head = tsv::split_line(lines[0]);
    if (!head.empty() && head[0] == "sample_id") {
        m.tasks.assign(head.begin() + 1, head.end());
        first_row = 1;
    } else {
        // headerless submission: infer tasks from the column count
        size_t cols = head.size() >= 1 ? head.size() - 1 : 0;
        if (cols == 1) {
            m.tasks = {task_name(Task::misogynous)};
        } else if (cols == kNumTasks) {
            m.tasks.assign(task_names().begin(), task_names().end());
        } else {
            throw DataError(path + ": headerless file must have 1 or " +
                            std::to_string(kNumTasks) + " value columns, found " +
                            std::to_string(cols));
        }
    }
    if (m.tasks.empty()) throw DataError(path + ": no task columns");

    for (size_t row = first_row; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        auto cells = tsv::split_line(lines[row]);
        if (cells.size() != m.tasks.size() + 1)
            throw DataError(path + ": row " + std::to_string(row) + ": expected " +
                            std::to_string(m.tasks.size() + 1) + " cells, got " +
                            std::to_string(cells.size()));
        m.ids.push_back(cells[0]);
        std::vector<double> vals(m.tasks.size());
        for (size_t c = 0; c < m.tasks.size(); ++c) {
            try {
                size_t pos = 0;
                vals[c] = std::stod(cells[c + 1], &pos);
                if (pos != cells[c + 1].size()) throw std::invalid_argument("trailing");
            } catch (const std::exception&) {
                throw DataError(path + ": row " + std::to_string(row) + ": bad value '" +
                                cells[c + 1] + "'");
            }
        }
        m.values.push_back(std::move(vals));
    }
    m.validate();
    return m;
}

namespace {

// Sorts copies of both matrices by id and verifies the id sequences match;
// names the first offending id otherwise.
void align_pair(PredictionMatrix& a, PredictionMatrix& b, const std::string& what) {
    if (a.rows() != b.rows())
        throw AlignmentError(what + ": row counts differ (" + std::to_string(a.rows()) +
                             " vs " + std::to_string(b.rows()) + ")");
    a.sort_by_id();
    b.sort_by_id();
    for (size_t i = 0; i < a.rows(); ++i) {
        if (a.ids[i] != b.ids[i])
            throw AlignmentError(what + ": id mismatch at sorted row " + std::to_string(i) +
                                 ": '" + a.ids[i] + "' vs '" + b.ids[i] + "'");
    }
}

} // namespace

PredictionMatrix ensemble(const PredictionMatrix& y1, const PredictionMatrix& y2, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0))
        throw ArgumentError("ensemble: alpha must be in [0,1], got " + std::to_string(alpha));
    if (y1.tasks != y2.tasks)
        throw AlignmentError("ensemble: task columns differ");
    PredictionMatrix a = y1, b = y2;
    align_pair(a, b, "ensemble");
    PredictionMatrix out = a;
    for (size_t i = 0; i < out.rows(); ++i)
        for (size_t c = 0; c < out.cols(); ++c)
            out.values[i][c] = alpha * a.values[i][c] + (1.0 - alpha) * b.values[i][c];
    return out;
}

PredictionMatrix hierarchy_postprocess(const PredictionMatrix& subtask_b,
                                       const PredictionMatrix& misogyny,
                                       double threshold,
                                       bool replace_misogynous) {
    if (subtask_b.tasks.size() != kNumTasks ||
        !std::equal(subtask_b.tasks.begin(), subtask_b.tasks.end(), task_names().begin()))
        throw ArgumentError("hierarchy_postprocess: first input must have the five canonical task columns");
    if (misogyny.tasks != std::vector<std::string>{task_name(Task::misogynous)})
        throw ArgumentError("hierarchy_postprocess: second input must have a single misogynous column");

    PredictionMatrix b = subtask_b, mis = misogyny;
    align_pair(b, mis, "hierarchy_postprocess");

    for (size_t i = 0; i < b.rows(); ++i) {
        double p_mis = mis.values[i][0];
        if (p_mis < threshold) {
            for (int t = 1; t < kNumTasks; ++t) b.values[i][t] = 0.0;
        }
        if (replace_misogynous) b.values[i][0] = p_mis;
    }
    return b;
}

PredictionMatrix binarize(const PredictionMatrix& probs, double threshold) {
    PredictionMatrix out = probs;
    for (auto& row : out.values)
        for (auto& v : row) v = v >= threshold ? 1.0 : 0.0;
    return out;
}

void save_submission(const PredictionMatrix& binary, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    for (size_t i = 0; i < binary.rows(); ++i) {
        out << binary.ids[i];
        for (double v : binary.values[i]) out << '\t' << (v >= 0.5 ? 1 : 0);
        out << '\n';
    }
}

} // namespace memeclf
