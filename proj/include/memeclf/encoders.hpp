#ifndef MEMECLF_ENCODERS_HPP
#define MEMECLF_ENCODERS_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "memeclf/image.hpp"

namespace memeclf {

struct TextEncoding {
    Eigen::MatrixXd token_embeddings; // T x D
    Eigen::VectorXd pooled;           // D, mean of unmasked rows
    std::vector<bool> attention_mask; // true = real token; length T
};

struct ImageFeature {
    std::string backbone_id;
    Eigen::VectorXd vector;
};

// Word-hash tokenizer shared by every text path. Ids 0 and 1 are the
// begin/end markers; words hash into kBuckets slots starting at 2. Five ids
// past the hash range are reserved task markers used by the flattened
// single-task reformulation (never produced by tokenize itself). Sequences
// are capped at kMaxLen tokens including the two markers.
class HashTokenizer {
public:
    static constexpr int kBos = 0;
    static constexpr int kEos = 1;
    static constexpr int kBuckets = 4096;
    static constexpr int kTaskBase = kBuckets + 2;
    static constexpr int kNumTaskIds = 5;
    static constexpr int kVocab = kTaskBase + kNumTaskIds;
    static constexpr int kMaxLen = 64;

    std::vector<int> tokenize(const std::string& text, int max_len = kMaxLen) const;
};

// Inserts the reserved marker for task index `task` right after the begin
// marker, dropping the last word token if the sequence would exceed max_len.
std::vector<int> inject_task_token(std::vector<int> ids, int task, int max_len = HashTokenizer::kMaxLen);

// Embedding-table text encoder: gather rows by token id, pool by mean. The
// toy variant fills the table from a seeded stream; the checkpoint variant
// loads it from a tensor container.
class TextTableEncoder {
public:
    TextTableEncoder(std::string id, Eigen::MatrixXd table); // table: kVocab x dim
    static TextTableEncoder toy(std::string id, int dim, uint64_t seed);
    static TextTableEncoder from_checkpoint(std::string id, const std::filesystem::path& dir);

    TextEncoding encode(const std::string& text, int max_len = HashTokenizer::kMaxLen) const;

    int dim() const { return static_cast<int>(table_.cols()); }
    const std::string& id() const { return id_; }
    const Eigen::MatrixXd& table() const { return table_; }
    const HashTokenizer& tokenizer() const { return tokenizer_; }

private:
    std::string id_;
    Eigen::MatrixXd table_;
    HashTokenizer tokenizer_;
};

// Image encoder: normalize per channel, sample a fixed grid of pixels,
// flatten, apply one linear map + tanh. The grid sample is a fixed function
// of the input; only the linear map carries weights, so models that train
// the image side can lift `weight`/`bias` into their parameter set and
// reproduce encode() as flatten() -> affine -> tanh.
class GridImageEncoder {
public:
    GridImageEncoder(std::string id, Eigen::MatrixXd weight, Eigen::VectorXd bias, int grid,
                     double mean, double stddev);
    static GridImageEncoder toy(std::string id, int dim, uint64_t seed, int grid = 8);
    static GridImageEncoder from_checkpoint(std::string id, const std::filesystem::path& dir);

    ImageFeature encode(const ImageTensor& img) const;
    // Normalized grid sample as a flat row of grid*grid*3 values.
    Eigen::RowVectorXd flatten(const ImageTensor& img) const;

    int dim() const { return static_cast<int>(weight_.rows()); }
    int input_dim() const { return static_cast<int>(weight_.cols()); }
    const std::string& id() const { return id_; }
    const Eigen::MatrixXd& weight() const { return weight_; } // dim x (grid*grid*3)
    const Eigen::VectorXd& bias() const { return bias_; }
    int grid() const { return grid_; }
    double norm_mean() const { return mean_; }
    double norm_std() const { return stddev_; }

private:
    std::string id_;
    Eigen::MatrixXd weight_;
    Eigen::VectorXd bias_;
    int grid_;
    double mean_, stddev_;
};

// String-keyed lookup of constructed encoders; unknown ids are config errors.
class EncoderRegistry {
public:
    void add_text(std::shared_ptr<TextTableEncoder> enc);
    void add_image(std::shared_ptr<GridImageEncoder> enc);

    const TextTableEncoder& text(const std::string& id) const;
    const GridImageEncoder& image(const std::string& id) const;
    bool has_text(const std::string& id) const { return text_.count(id) != 0; }
    bool has_image(const std::string& id) const { return image_.count(id) != 0; }

    TextEncoding encode_text(const std::string& id, const std::string& text) const;
    ImageFeature encode_image(const ImageTensor& img, const std::string& id) const;
    // Validates every id before encoding anything; order of results = order
    // of ids, duplicates allowed.
    std::vector<ImageFeature> multi_backbone_features(const ImageTensor& img,
                                                      const std::vector<std::string>& ids) const;

private:
    std::map<std::string, std::shared_ptr<TextTableEncoder>> text_;
    std::map<std::string, std::shared_ptr<GridImageEncoder>> image_;
};

// Backbone ids that name large pretrained models. Using one requires a
// checkpoint file; there is no seeded fallback for them.
const std::vector<std::string>& pretrained_backbone_ids();

} // namespace memeclf

#endif
