#include "memeclf/tensor_store.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "memeclf/errors.hpp"

namespace memeclf {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

void append_le_double(std::string& out, double v) {
    uint64_t bits;
    std::memcpy(&bits, &v, sizeof(bits));
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
}

double read_le_double(const char* p) {
    uint64_t bits = 0;
    for (int i = 0; i < 8; ++i)
        bits |= static_cast<uint64_t>(static_cast<unsigned char>(p[i])) << (8 * i);
    double v;
    std::memcpy(&v, &bits, sizeof(v));
    return v;
}

} // namespace

void TensorStore::put(const std::string& name, const Eigen::MatrixXd& tensor) {
    if (name.empty()) throw ArgumentError("tensor name must be non-empty");
    tensors_[name] = tensor;
}

const Eigen::MatrixXd& TensorStore::get(const std::string& name) const {
    auto it = tensors_.find(name);
    if (it == tensors_.end()) throw DataError("checkpoint is missing tensor: " + name);
    return it->second;
}

std::vector<std::string> TensorStore::names() const {
    std::vector<std::string> out;
    out.reserve(tensors_.size());
    for (const auto& [name, _] : tensors_) out.push_back(name);
    return out;
}

void TensorStore::save(const fs::path& dir) const {
    fs::create_directories(dir);

    std::string blob;
    json index = json::array();
    for (const auto& [name, t] : tensors_) { // map order = sorted names, stable
        index.push_back({{"name", name},
                         {"rows", t.rows()},
                         {"cols", t.cols()},
                         {"byte_offset", blob.size()}});
        for (Eigen::Index r = 0; r < t.rows(); ++r)
            for (Eigen::Index c = 0; c < t.cols(); ++c) append_le_double(blob, t(r, c));
    }

    {
        std::ofstream bin(dir / "tensors.bin", std::ios::binary | std::ios::trunc);
        if (!bin) throw DataError("cannot write " + (dir / "tensors.bin").string());
        bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
    }

    json doc = {{"format_version", kFormatVersion},
                {"blob", "tensors.bin"},
                {"tensors", index},
                {"meta", meta_}};
    std::ofstream out(dir / "checkpoint.json", std::ios::trunc);
    if (!out) throw DataError("cannot write " + (dir / "checkpoint.json").string());
    out << doc.dump(2) << "\n";
}

TensorStore TensorStore::load(const fs::path& dir) {
    const fs::path json_path = dir / "checkpoint.json";
    std::ifstream in(json_path);
    if (!in) throw DataError("cannot open checkpoint: " + json_path.string());
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw DataError("malformed checkpoint " + json_path.string() + ": " + e.what());
    }

    if (!doc.contains("format_version") || doc["format_version"].get<int>() != kFormatVersion)
        throw DataError("unsupported checkpoint format_version in " + json_path.string());

    const fs::path bin_path = dir / doc.value("blob", "tensors.bin");
    std::ifstream bin(bin_path, std::ios::binary);
    if (!bin) throw DataError("cannot open checkpoint blob: " + bin_path.string());
    std::string blob((std::istreambuf_iterator<char>(bin)), std::istreambuf_iterator<char>());

    TensorStore store;
    store.meta_ = doc.value("meta", json::object());
    for (const auto& entry : doc.at("tensors")) {
        const std::string name = entry.at("name").get<std::string>();
        const Eigen::Index rows = entry.at("rows").get<Eigen::Index>();
        const Eigen::Index cols = entry.at("cols").get<Eigen::Index>();
        const size_t offset = entry.at("byte_offset").get<size_t>();
        const size_t bytes = static_cast<size_t>(rows) * static_cast<size_t>(cols) * 8;
        if (rows < 0 || cols < 0 || offset + bytes > blob.size())
            throw DataError("checkpoint blob truncated for tensor: " + name);
        Eigen::MatrixXd t(rows, cols);
        const char* p = blob.data() + offset;
        for (Eigen::Index r = 0; r < rows; ++r)
            for (Eigen::Index c = 0; c < cols; ++c, p += 8) t(r, c) = read_le_double(p);
        store.tensors_[name] = std::move(t);
    }
    return store;
}

} // namespace memeclf
