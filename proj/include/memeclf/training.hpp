#ifndef MEMECLF_TRAINING_HPP
#define MEMECLF_TRAINING_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "memeclf/dataset.hpp"
#include "memeclf/folds.hpp"
#include "memeclf/models.hpp"
#include "memeclf/predictions.hpp"

namespace memeclf {

// Linear warmup over the first ceil(warmup_fraction * total_steps) steps,
// then linear decay to zero at total_steps.
double lr_schedule(int step, int total_steps, double base_lr, double warmup_fraction = 0.10);

// Mean over tasks of binary cross-entropy on sigmoid(logit), computed with
// the overflow-stable formulation.
double multitask_bce_loss(const Eigen::RowVectorXd& logits, const LabelVector& labels,
                          const std::vector<Task>& tasks);

struct EarlyStopDecision {
    bool stop = false;
    int best_epoch = 0;
};

// Stop once the best score has gone `patience` consecutive epochs without a
// strict improvement. best_epoch is the earliest index of the maximum.
EarlyStopDecision early_stop(const std::vector<double>& history, int patience);

struct TrainingConfig {
    int epochs = 10;
    int batch_size = 64;
    double warmup_fraction = 0.10;
    int early_stop_patience = 3;
    int k_folds = 5;
    uint64_t seed = 42;
    double weight_decay = 0.01;
    double clip_norm = 1.0; // <= 0 disables clipping
    bool tta = true;        // five-crop averaging on test predictions
    int tta_crop = 224;
    bool augment = true;    // random resized crop + flips during training
    bool flatten_subtask_b = false; // stage-1 single-logit reformulation

    void validate() const;
};

// Whether weight decay applies to a parameter of this name.
bool weight_decay_applies(const std::string& param_name);

double grad_global_norm(const std::vector<nn::NodePtr>& params);
// Scales all gradients so their global norm is at most max_norm; returns the
// pre-clip norm. No-op when max_norm <= 0.
double clip_gradients(const std::vector<nn::NodePtr>& params, double max_norm);

// Decoupled-weight-decay Adam over a model's parameters, with per-group base
// learning rates taken from the model. step(lr_scale) applies one update at
// lr = lr_scale * base_lr per group; the caller supplies the schedule value.
class AdamW {
public:
    explicit AdamW(const FusionModel& model, double weight_decay, double beta1 = 0.9,
                   double beta2 = 0.999, double eps = 1e-8);

    void step(double lr_scale);
    int steps_taken() const { return t_; }

private:
    struct Slot {
        nn::NodePtr p;
        Eigen::MatrixXd m, v;
        double base_lr;
        bool decay;
    };
    std::vector<Slot> slots_;
    double wd_, beta1_, beta2_, eps_;
    int t_ = 0;
};

struct TrainerOptions {
    TrainingConfig train;
    Arch arch = Arch::double_tower;
    DoubleTowerOptions dt;
    SingleFlowOptions sf;
    std::vector<int> hidden_dims{256, 64}; // double-tower fusion MLP
    const EncoderRegistry* registry = nullptr;
    std::filesystem::path run_dir; // when set, fold checkpoints are saved here
};

struct StageResult {
    PredictionMatrix oof;  // one row per training sample, from its held-out fold model
    PredictionMatrix test; // fold-mean over the k models; empty ids when no test set
    nlohmann::json log;    // per-fold histories and decisions, for the manifest
};

// Stage 1: multi-task training on the main corpus only.
StageResult train_stage1(const Dataset& train, const Dataset& test, const FoldPlan& plan,
                         const TrainerOptions& opt);

// Stage 2: misogynous-only training; every external row joins every fold's
// training side and never its validation side.
StageResult train_stage2(const Dataset& train, const Dataset& external, const Dataset& test,
                         const FoldPlan& plan, const TrainerOptions& opt);

struct Stage2FoldAssembly {
    std::vector<std::string> train_ids; // k-1 main folds, then all external rows
    std::vector<std::string> val_ids;   // held-out main fold only
};

Stage2FoldAssembly assemble_stage2_fold(const Dataset& main, const Dataset& external,
                                        const FoldPlan& plan, int fold);

// Prediction over a dataset with an existing model, rows sorted by id.
// When `flattened` is set the model must have one logit; the five task
// columns come from one pass per injected task marker.
PredictionMatrix predict_dataset(FusionModel& model, const Dataset& ds,
                                 const EncoderRegistry& reg, bool tta, int tta_crop,
                                 int batch_size, bool flattened = false);

} // namespace memeclf

#endif
