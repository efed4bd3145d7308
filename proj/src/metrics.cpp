#include "memeclf/metrics.hpp"

#include <cstdio>

#include "memeclf/errors.hpp"

namespace memeclf {

double f1_binary(const std::vector<int>& pred, const std::vector<int>& gold, int positive_class) {
    if (pred.size() != gold.size())
        throw ArgumentError("f1_binary: pred length " + std::to_string(pred.size()) +
                            " != gold length " + std::to_string(gold.size()));
    long tp = 0, fp = 0, fn = 0;
    for (size_t i = 0; i < pred.size(); ++i) {
        bool p = pred[i] == positive_class;
        bool g = gold[i] == positive_class;
        if (p && g) ++tp;
        else if (p && !g) ++fp;
        else if (!p && g) ++fn;
    }
    double precision = (tp + fp) ? static_cast<double>(tp) / (tp + fp) : 0.0;
    double recall = (tp + fn) ? static_cast<double>(tp) / (tp + fn) : 0.0;
    if (precision + recall == 0.0) return 0.0;
    return 2.0 * precision * recall / (precision + recall);
}

double macro_f1_binary_task(const std::vector<int>& pred, const std::vector<int>& gold) {
    return 0.5 * (f1_binary(pred, gold, 0) + f1_binary(pred, gold, 1));
}

MultilabelF1 multilabel_f1(const std::vector<std::array<int, kNumTasks>>& pred,
                           const std::vector<std::array<int, kNumTasks>>& gold) {
    if (pred.size() != gold.size())
        throw ArgumentError("multilabel_f1: pred rows " + std::to_string(pred.size()) +
                            " != gold rows " + std::to_string(gold.size()));
    MultilabelF1 out;
    long total_support = 0;
    for (int t = 0; t < kNumTasks; ++t) {
        std::vector<int> p(pred.size()), g(gold.size());
        for (size_t i = 0; i < pred.size(); ++i) {
            p[i] = pred[i][t];
            g[i] = gold[i][t];
            out.support[t] += gold[i][t];
        }
        out.per_label[t] = f1_binary(p, g, 1);
        out.macro += out.per_label[t];
        out.weighted += out.per_label[t] * out.support[t];
        total_support += out.support[t];
    }
    out.macro /= kNumTasks;
    out.weighted = total_support ? out.weighted / total_support : 0.0;
    return out;
}

namespace {

std::string fmt_score(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", *v);
    return buf;
}

} // namespace

ResultsTable results_table(const std::vector<ResultEntry>& entries) {
    size_t method_width = std::string("Method").size();
    for (const auto& e : entries) method_width = std::max(method_width, e.method.size());

    ResultsTable table;
    auto pad = [](const std::string& s, size_t w) {
        return s + std::string(w > s.size() ? w - s.size() : 0, ' ');
    };
    table.text = pad("Method", method_width) + "  Sub-task A  Sub-task B\n";
    table.tsv = "method\tsub_task_a\tsub_task_b\n";
    for (const auto& e : entries) {
        std::string a = fmt_score(e.sub_task_a);
        std::string b = fmt_score(e.sub_task_b);
        table.text += pad(e.method, method_width) + "  " + pad(a, 10) + "  " + b + "\n";
        table.tsv += e.method + "\t" + a + "\t" + b + "\n";
    }
    table.text += "\nF1 := 0 when precision + recall = 0.\n";
    return table;
}

} // namespace memeclf
