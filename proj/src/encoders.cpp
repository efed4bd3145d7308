#include "memeclf/encoders.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>

#include "memeclf/errors.hpp"
#include "memeclf/rng.hpp"
#include "memeclf/tensor_store.hpp"

namespace memeclf {

std::vector<int> HashTokenizer::tokenize(const std::string& text, int max_len) const {
    if (max_len < 2) throw ArgumentError("tokenize: max_len must fit the begin/end markers");
    std::vector<int> ids;
    ids.push_back(kBos);
    std::string word;
    auto flush = [&] {
        if (word.empty()) return;
        if (static_cast<int>(ids.size()) < max_len - 1)
            ids.push_back(2 + static_cast<int>(fnv1a64(word) % kBuckets));
        word.clear();
    };
    for (unsigned char c : text) {
        if (std::isalnum(c))
            word.push_back(static_cast<char>(std::tolower(c)));
        else
            flush();
    }
    flush();
    ids.push_back(kEos);
    return ids;
}

std::vector<int> inject_task_token(std::vector<int> ids, int task, int max_len) {
    if (task < 0 || task >= HashTokenizer::kNumTaskIds)
        throw ArgumentError("inject_task_token: task index out of range");
    if (ids.size() < 2 || ids.front() != HashTokenizer::kBos || ids.back() != HashTokenizer::kEos)
        throw ArgumentError("inject_task_token: expected a tokenized sequence");
    ids.insert(ids.begin() + 1, HashTokenizer::kTaskBase + task);
    if (static_cast<int>(ids.size()) > max_len) ids.erase(ids.end() - 2);
    return ids;
}

TextTableEncoder::TextTableEncoder(std::string id, Eigen::MatrixXd table)
    : id_(std::move(id)), table_(std::move(table)) {
    if (table_.rows() != HashTokenizer::kVocab || table_.cols() < 1)
        throw ConfigError("text encoder '" + id_ + "': table must be " +
                          std::to_string(HashTokenizer::kVocab) + " x dim");
}

TextTableEncoder TextTableEncoder::toy(std::string id, int dim, uint64_t seed) {
    if (dim < 1) throw ConfigError("text encoder '" + id + "': dim must be >= 1");
    Eigen::MatrixXd table(HashTokenizer::kVocab, dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(dim));
    for (int r = 0; r < HashTokenizer::kVocab; ++r) {
        auto rng = RngKey(seed).with("text_embed").with(static_cast<uint64_t>(r)).stream();
        for (int c = 0; c < dim; ++c) table(r, c) = rng.uniform(-scale, scale);
    }
    return TextTableEncoder(std::move(id), std::move(table));
}

TextTableEncoder TextTableEncoder::from_checkpoint(std::string id,
                                                   const std::filesystem::path& dir) {
    TensorStore store = TensorStore::load(dir);
    return TextTableEncoder(std::move(id), store.get("table"));
}

TextEncoding TextTableEncoder::encode(const std::string& text, int max_len) const {
    const std::vector<int> ids = tokenizer_.tokenize(text, max_len);
    TextEncoding enc;
    enc.token_embeddings.resize(static_cast<Eigen::Index>(ids.size()), table_.cols());
    for (size_t i = 0; i < ids.size(); ++i)
        enc.token_embeddings.row(static_cast<Eigen::Index>(i)) = table_.row(ids[i]);
    enc.attention_mask.assign(ids.size(), true);
    enc.pooled = enc.token_embeddings.colwise().mean();
    return enc;
}

GridImageEncoder::GridImageEncoder(std::string id, Eigen::MatrixXd weight, Eigen::VectorXd bias,
                                   int grid, double mean, double stddev)
    : id_(std::move(id)),
      weight_(std::move(weight)),
      bias_(std::move(bias)),
      grid_(grid),
      mean_(mean),
      stddev_(stddev) {
    if (grid_ < 1) throw ConfigError("image encoder '" + id_ + "': grid must be >= 1");
    if (stddev_ <= 0.0) throw ConfigError("image encoder '" + id_ + "': std must be > 0");
    if (weight_.cols() != static_cast<Eigen::Index>(grid_) * grid_ * 3)
        throw ConfigError("image encoder '" + id_ + "': weight cols must equal grid*grid*3");
    if (bias_.size() != weight_.rows())
        throw ConfigError("image encoder '" + id_ + "': bias size must equal weight rows");
}

GridImageEncoder GridImageEncoder::toy(std::string id, int dim, uint64_t seed, int grid) {
    if (dim < 1) throw ConfigError("image encoder '" + id + "': dim must be >= 1");
    const int in = grid * grid * 3;
    Eigen::MatrixXd weight(dim, in);
    Eigen::VectorXd bias(dim);
    const double scale = 1.0 / std::sqrt(static_cast<double>(in));
    for (int r = 0; r < dim; ++r) {
        auto rng = RngKey(seed).with("image_weight").with(static_cast<uint64_t>(r)).stream();
        for (int c = 0; c < in; ++c) weight(r, c) = rng.uniform(-scale, scale);
        bias(r) = rng.uniform(-0.1, 0.1);
    }
    return GridImageEncoder(std::move(id), std::move(weight), std::move(bias), grid, 0.5, 0.5);
}

GridImageEncoder GridImageEncoder::from_checkpoint(std::string id,
                                                   const std::filesystem::path& dir) {
    TensorStore store = TensorStore::load(dir);
    const auto& meta = store.meta();
    const int grid = meta.value("grid", 8);
    const double mean = meta.value("mean", 0.5);
    const double stddev = meta.value("std", 0.5);
    Eigen::VectorXd bias = store.get("bias");
    return GridImageEncoder(std::move(id), store.get("weight"), std::move(bias), grid, mean,
                            stddev);
}

Eigen::RowVectorXd GridImageEncoder::flatten(const ImageTensor& img) const {
    if (img.height < grid_ || img.width < grid_)
        throw ArgumentError("image encoder '" + id_ + "': input smaller than sampling grid");
    Eigen::RowVectorXd flat(input_dim());
    int at = 0;
    for (int gy = 0; gy < grid_; ++gy) {
        // Pixel centers of a uniform grid over the image.
        const int y = static_cast<int>((gy + 0.5) * img.height / grid_);
        for (int gx = 0; gx < grid_; ++gx) {
            const int x = static_cast<int>((gx + 0.5) * img.width / grid_);
            for (int c = 0; c < 3; ++c) flat(at++) = (img.at(y, x, c) - mean_) / stddev_;
        }
    }
    return flat;
}

ImageFeature GridImageEncoder::encode(const ImageTensor& img) const {
    Eigen::VectorXd pre = weight_ * flatten(img).transpose() + bias_;
    return ImageFeature{id_, pre.array().tanh()};
}

void EncoderRegistry::add_text(std::shared_ptr<TextTableEncoder> enc) {
    if (!enc) throw ArgumentError("add_text: null encoder");
    text_[enc->id()] = std::move(enc);
}

void EncoderRegistry::add_image(std::shared_ptr<GridImageEncoder> enc) {
    if (!enc) throw ArgumentError("add_image: null encoder");
    image_[enc->id()] = std::move(enc);
}

const TextTableEncoder& EncoderRegistry::text(const std::string& id) const {
    auto it = text_.find(id);
    if (it == text_.end()) throw ConfigError("unknown text encoder id: " + id);
    return *it->second;
}

const GridImageEncoder& EncoderRegistry::image(const std::string& id) const {
    auto it = image_.find(id);
    if (it == image_.end()) throw ConfigError("unknown image backbone id: " + id);
    return *it->second;
}

TextEncoding EncoderRegistry::encode_text(const std::string& id, const std::string& text) const {
    return this->text(id).encode(text);
}

ImageFeature EncoderRegistry::encode_image(const ImageTensor& img, const std::string& id) const {
    return image(id).encode(img);
}

std::vector<ImageFeature> EncoderRegistry::multi_backbone_features(
    const ImageTensor& img, const std::vector<std::string>& ids) const {
    for (const auto& id : ids)
        if (!has_image(id)) throw ConfigError("unknown image backbone id: " + id);
    std::vector<ImageFeature> out;
    out.reserve(ids.size());
    for (const auto& id : ids) out.push_back(image(id).encode(img));
    return out;
}

const std::vector<std::string>& pretrained_backbone_ids() {
    static const std::vector<std::string> ids = {"resnet18", "resnet152", "efficientnet_b2",
                                                 "efficientnet_b4", "efficientnet_b7"};
    return ids;
}

} // namespace memeclf
