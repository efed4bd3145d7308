#include "memeclf/dataset.hpp"

#include <filesystem>
#include <fstream>
#include <unordered_map>
#include <unordered_set>

#include "memeclf/tsv.hpp"

namespace memeclf {

namespace {

// file_name doubles as the image reference; images live next to the TSV.
std::string resolve_image_ref(const std::string& corpus_path, const std::string& file_name) {
    auto dir = std::filesystem::path(corpus_path).parent_path();
    return (dir / file_name).string();
}

// Maps lowercased header names to column indices. Throws naming the first
// canonical column that is absent.
std::unordered_map<std::string, size_t> index_header(const std::vector<std::string>& header,
                                                     const std::vector<std::string>& required,
                                                     const std::string& path,
                                                     LoadReport* report) {
    std::unordered_map<std::string, size_t> index;
    for (size_t i = 0; i < header.size(); ++i) {
        std::string name = tsv::lower(header[i]);
        if (index.count(name)) throw DataError(path + ": duplicate column '" + name + "'");
        index[name] = i;
    }
    for (const auto& col : required) {
        if (!index.count(col))
            throw DataError(path + ": missing required column '" + col + "'");
    }
    if (report) {
        std::unordered_set<std::string> wanted(required.begin(), required.end());
        for (const auto& [name, _] : index) {
            if (!wanted.count(name))
                report->warnings.push_back(path + ": ignoring extra column '" + name + "'");
        }
    }
    return index;
}

uint8_t parse_label_cell(const std::string& cell, const std::string& path, size_t row,
                         const std::string& column) {
    if (cell == "0") return 0;
    if (cell == "1") return 1;
    throw DataError(path + ": row " + std::to_string(row) + ": column '" + column +
                    "': expected 0 or 1, got '" + cell + "'");
}

void check_unique_ids(const Dataset& ds, const std::string& context) {
    std::unordered_set<std::string> seen;
    for (const auto& s : ds.samples) {
        if (!seen.insert(s.id).second)
            throw DataError(context + ": duplicate id '" + s.id + "'");
    }
}

} // namespace

Dataset load_main_corpus(const std::string& path, bool labeled, LoadReport* report) {
    auto lines = tsv::read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file, expected a header row");

    std::vector<std::string> required = {"file_name", "text"};
    if (labeled)
        for (const auto& t : task_names()) required.push_back(t);
    auto index = index_header(tsv::split_line(lines[0]), required, path, report);

    Dataset ds;
    ds.split_tag = SplitTag::train;
    ds.samples.reserve(lines.size() - 1);
    std::vector<std::string> hierarchy_violations;

    for (size_t row = 1; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        auto cells = tsv::split_line(lines[row]);
        if (cells.size() < index.size())
            throw DataError(path + ": row " + std::to_string(row) + ": expected at least " +
                            std::to_string(index.size()) + " cells, got " +
                            std::to_string(cells.size()));
        MemeSample s;
        s.id = cells[index.at("file_name")];
        s.text = tsv::unescape(cells[index.at("text")]);
        s.image_ref = resolve_image_ref(path, s.id);
        s.source = SampleSource::main;
        if (labeled) {
            LabelVector v;
            for (int t = 0; t < kNumTasks; ++t) {
                const std::string& col = task_names()[t];
                v.bits[t] = parse_label_cell(cells[index.at(col)], path, row, col);
            }
            if (!validate_hierarchy(v))
                hierarchy_violations.push_back(std::to_string(row));
            s.labels = v;
        }
        ds.samples.push_back(std::move(s));
    }

    if (!hierarchy_violations.empty()) {
        std::string rows;
        for (size_t i = 0; i < hierarchy_violations.size(); ++i)
            rows += (i ? ", " : "") + hierarchy_violations[i];
        throw DataError(path + ": hierarchy violation (subcategory positive without misogynous) at row(s) " + rows);
    }
    check_unique_ids(ds, path);
    return ds;
}

std::vector<std::string> default_accepted_offense_levels() {
    return {"not_offensive", "not offensive", "not-offensive",
            "slight",        "slight_offensive", "slight offensive", "slightly_offensive"};
}

Dataset load_external_negatives(const std::string& path,
                                const std::vector<std::string>& accepted,
                                LoadReport* report) {
    auto lines = tsv::read_lines(path);
    if (lines.empty()) throw DataError(path + ": empty file, expected a header row");

    auto index = index_header(tsv::split_line(lines[0]),
                              {"file_name", "text", "offense_level"}, path, report);

    std::unordered_set<std::string> accept;
    for (const auto& a : accepted) accept.insert(tsv::lower(a));

    Dataset ds;
    ds.split_tag = SplitTag::external_train;
    for (size_t row = 1; row < lines.size(); ++row) {
        if (lines[row].empty()) continue;
        auto cells = tsv::split_line(lines[row]);
        if (cells.size() < index.size())
            throw DataError(path + ": row " + std::to_string(row) + ": expected at least " +
                            std::to_string(index.size()) + " cells, got " +
                            std::to_string(cells.size()));
        std::string level = tsv::lower(cells[index.at("offense_level")]);
        if (!accept.count(level)) {
            if (report) {
                report->rejects.push_back("row " + std::to_string(row) + ": offense_level '" +
                                          level + "' not in accepted set");
                report->dropped++;
            }
            continue;
        }
        MemeSample s;
        s.id = cells[index.at("file_name")];
        s.text = tsv::unescape(cells[index.at("text")]);
        s.image_ref = resolve_image_ref(path, s.id);
        s.labels = LabelVector{}; // all-zero by construction
        s.source = SampleSource::external;
        ds.samples.push_back(std::move(s));
    }
    check_unique_ids(ds, path);
    if (ds.samples.empty() && report)
        report->warnings.push_back(path + ": no rows matched the accepted offense levels");
    return ds;
}

Dataset merge_datasets(const Dataset& a, const Dataset& b) {
    Dataset out;
    out.split_tag = a.split_tag;
    out.samples.reserve(a.size() + b.size());
    auto append = [&out](const Dataset& ds) {
        for (const auto& s : ds.samples) {
            MemeSample m = s;
            m.id = std::string(source_name(s.source)) + ":" + s.id;
            out.samples.push_back(std::move(m));
        }
    };
    append(a);
    append(b);
    check_unique_ids(out, "merge_datasets");
    return out;
}

std::array<double, kNumTasks> label_prevalence(const Dataset& ds) {
    std::array<double, kNumTasks> rates{};
    size_t labeled = 0;
    for (const auto& s : ds.samples) {
        if (!s.labels) continue;
        ++labeled;
        for (int t = 0; t < kNumTasks; ++t) rates[t] += s.labels->bits[t];
    }
    if (labeled)
        for (auto& r : rates) r /= static_cast<double>(labeled);
    return rates;
}

void save_main_corpus(const Dataset& ds, const std::string& path) {
    bool labeled = !ds.samples.empty();
    for (const auto& s : ds.samples)
        if (!s.labels) labeled = false;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    std::vector<std::string> header = {"file_name", "text"};
    if (labeled)
        for (const auto& t : task_names()) header.push_back(t);
    out << tsv::join_line(header) << '\n';
    for (const auto& s : ds.samples) {
        std::vector<std::string> cells = {s.id, tsv::escape(s.text)};
        if (labeled)
            for (int t = 0; t < kNumTasks; ++t)
                cells.push_back(s.labels->bits[t] ? "1" : "0");
        out << tsv::join_line(cells) << '\n';
    }
}

void write_rejects_report(const LoadReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path);
    for (const auto& r : report.rejects) out << r << '\n';
}

} // namespace memeclf
