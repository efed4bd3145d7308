#ifndef MEMECLF_MODELS_HPP
#define MEMECLF_MODELS_HPP

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memeclf/autodiff.hpp"
#include "memeclf/encoders.hpp"
#include "memeclf/labels.hpp"
#include "memeclf/tensor_store.hpp"

namespace memeclf {

enum class Arch { double_tower, single_flow };

std::string arch_name(Arch arch);
Arch parse_arch(const std::string& name); // ConfigError on unknown name

// Which logits a model produces. Tasks must appear in canonical label order;
// hidden_dims sizes the double-tower fusion MLP.
struct HeadConfig {
    std::vector<Task> tasks;
    std::vector<int> hidden_dims{256, 64};

    static HeadConfig multitask();          // all five tasks
    static HeadConfig single(Task task);    // one task
    void validate() const;
    std::vector<std::string> names() const; // task names, head order
    int width() const { return static_cast<int>(tasks.size()); }
};

// Modality features for one sample, precomputed outside the model so the
// trainer controls augmentation and caching. `image_flat` carries normalized
// grid rows for backbones the model trains through; `image_feature` carries
// frozen feature vectors.
struct ModelInput {
    std::vector<int> token_ids;
    std::map<std::string, Eigen::RowVectorXd> image_flat;
    std::map<std::string, Eigen::RowVectorXd> image_feature;
};

struct InputSpec {
    std::vector<std::string> flat_backbones;
    std::vector<std::string> feature_backbones;
};

ModelInput prepare_input(const EncoderRegistry& reg, const InputSpec& spec,
                         const std::string& text, const ImageTensor& img);

// Common surface the trainer drives. Parameters are persistent autodiff
// leaves; forward() rebuilds the graph on the caller's tape each call.
class FusionModel {
public:
    virtual ~FusionModel() = default;

    // Returns the batch logit node (B x |tasks|). When `train` is true,
    // dropout draws masks from `dropout_rng` (must be non-null if any
    // dropout probability is positive).
    virtual nn::NodePtr forward(nn::Tape& tape, const std::vector<ModelInput>& batch, bool train,
                                RngStream* dropout_rng) = 0;
    virtual InputSpec input_spec() const = 0;
    virtual Arch arch() const = 0;
    virtual nlohmann::json geometry() const = 0;

    const HeadConfig& heads() const { return heads_; }
    const std::vector<nn::NodePtr>& parameters() const { return params_; }
    const std::map<std::string, std::vector<nn::NodePtr>>& parameter_groups() const {
        return groups_;
    }
    const std::map<std::string, double>& group_learning_rates() const { return group_lr_; }
    nn::NodePtr param(const std::string& name) const; // ArgumentError if absent

    // Evaluation-mode forward on a throwaway tape.
    Eigen::MatrixXd predict_logits(const std::vector<ModelInput>& batch);
    Eigen::MatrixXd predict_probs(const std::vector<ModelInput>& batch);

    std::vector<Eigen::MatrixXd> snapshot() const;
    void restore(const std::vector<Eigen::MatrixXd>& snap);
    void zero_grads();

    void save(const std::filesystem::path& dir) const;
    void load_weights(const TensorStore& store); // strict by-name, shape-checked

protected:
    explicit FusionModel(HeadConfig heads);
    nn::NodePtr add_param(const std::string& group, const std::string& name,
                          Eigen::MatrixXd value);
    void set_group_lr(const std::string& group, double lr);

private:
    HeadConfig heads_;
    std::vector<nn::NodePtr> params_;
    std::map<std::string, std::vector<nn::NodePtr>> groups_;
    std::map<std::string, double> group_lr_;
};

// Two parallel unimodal towers fused by an MLP on the concatenated pooled
// text vector and image feature. Tower weights start from the registered
// encoders and train in their own rate groups.
struct DoubleTowerOptions {
    std::string text_encoder = "toy_text";
    std::string image_backbone = "toy_image";
    double dropout = 0.2;
    double lr_text = 5e-5;
    double lr_image = 1e-4;
    double lr_fusion = 1e-3;
};

class DoubleTower final : public FusionModel {
public:
    DoubleTower(const EncoderRegistry& reg, DoubleTowerOptions opt, HeadConfig heads,
                uint64_t seed);

    nn::NodePtr forward(nn::Tape& tape, const std::vector<ModelInput>& batch, bool train,
                        RngStream* dropout_rng) override;
    InputSpec input_spec() const override;
    Arch arch() const override { return Arch::double_tower; }
    nlohmann::json geometry() const override;

private:
    DoubleTowerOptions opt_;
    int text_dim_ = 0;
    int image_in_dim_ = 0;
    nn::NodePtr table_, img_w_, img_b_;
    std::vector<nn::NodePtr> mlp_w_, mlp_b_; // hidden layers then head
};

// One transformer over [CLS, text tokens, one projected visual token per
// backbone]; segment 0 = text, 1 = image; classification from position 0.
struct SingleFlowOptions {
    std::vector<std::string> backbones{"toy_image"};
    int layers = 2;
    int heads = 4;
    int width = 128;
    int ffn = 256;
    int max_seq = 1 + HashTokenizer::kMaxLen + 8;
    double dropout = 0.1;
    bool train_backbones = false;
    double lr = 5e-5;
};

class SingleFlow final : public FusionModel {
public:
    SingleFlow(const EncoderRegistry& reg, SingleFlowOptions opt, HeadConfig heads,
               uint64_t seed);

    nn::NodePtr forward(nn::Tape& tape, const std::vector<ModelInput>& batch, bool train,
                        RngStream* dropout_rng) override;
    InputSpec input_spec() const override;
    Arch arch() const override { return Arch::single_flow; }
    nlohmann::json geometry() const override;

private:
    nn::NodePtr encode_sequence(nn::Tape& tape, const ModelInput& input, bool train,
                                RngStream* dropout_rng); // 1 x width, position-0 output

    SingleFlowOptions opt_;
    nn::NodePtr table_, cls_, segment_, position_, vis_position_;
    std::map<std::string, nn::NodePtr> proj_w_, proj_b_;
    std::map<std::string, nn::NodePtr> backbone_w_, backbone_b_; // train_backbones only
    struct Layer {
        nn::NodePtr qw, qb, kw, kb, vw, vb, ow, ob;
        nn::NodePtr ln1_g, ln1_b, ln2_g, ln2_b;
        nn::NodePtr ffn_in_w, ffn_in_b, ffn_out_w, ffn_out_b;
    };
    std::vector<Layer> layers_;
    nn::NodePtr head_w_, head_b_;
};

// Rebuilds a model from a checkpoint directory written by FusionModel::save.
std::unique_ptr<FusionModel> load_model(const EncoderRegistry& reg,
                                        const std::filesystem::path& dir);

} // namespace memeclf

#endif
