#include "memeclf/training.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "memeclf/errors.hpp"
#include "memeclf/image.hpp"
#include "memeclf/metrics.hpp"

namespace memeclf {

using nn::NodePtr;
using nlohmann::json;

double lr_schedule(int step, int total_steps, double base_lr, double warmup_fraction) {
    if (total_steps <= 0) throw ArgumentError("lr_schedule: total_steps must be positive");
    if (step < 0 || step > total_steps)
        throw ArgumentError("lr_schedule: step must be in [0, total_steps]");
    if (warmup_fraction <= 0.0 || warmup_fraction >= 1.0)
        throw ArgumentError("lr_schedule: warmup fraction must be in (0, 1)");
    const int warmup = static_cast<int>(std::ceil(warmup_fraction * total_steps));
    if (step >= total_steps) return 0.0;
    if (step <= warmup) return base_lr * static_cast<double>(step) / warmup;
    return base_lr * static_cast<double>(total_steps - step) / (total_steps - warmup);
}

double multitask_bce_loss(const Eigen::RowVectorXd& logits, const LabelVector& labels,
                          const std::vector<Task>& tasks) {
    if (tasks.empty()) throw ArgumentError("multitask_bce_loss: empty task list");
    if (logits.size() != static_cast<Eigen::Index>(tasks.size()))
        throw ArgumentError("multitask_bce_loss: logit width " + std::to_string(logits.size()) +
                            " does not match task count " + std::to_string(tasks.size()));
    double total = 0.0;
    for (size_t i = 0; i < tasks.size(); ++i) {
        const double z = logits(static_cast<Eigen::Index>(i));
        const double y = labels[tasks[i]];
        total += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    }
    return total / static_cast<double>(tasks.size());
}

EarlyStopDecision early_stop(const std::vector<double>& history, int patience) {
    if (history.empty()) throw ArgumentError("early_stop: empty history");
    if (patience < 1) throw ArgumentError("early_stop: patience must be >= 1");
    int best = 0;
    for (int i = 1; i < static_cast<int>(history.size()); ++i)
        if (history[i] > history[best]) best = i;
    EarlyStopDecision d;
    d.best_epoch = best;
    d.stop = static_cast<int>(history.size()) - 1 - best >= patience;
    return d;
}

void TrainingConfig::validate() const {
    if (epochs < 1) throw ConfigError("train.epochs must be >= 1");
    if (batch_size < 1) throw ConfigError("train.batch_size must be >= 1");
    if (warmup_fraction <= 0.0 || warmup_fraction >= 1.0)
        throw ConfigError("train.warmup_fraction must be in (0, 1)");
    if (early_stop_patience < 1 || early_stop_patience >= epochs)
        throw ConfigError("train.early_stop_patience must be in [1, epochs)");
    if (k_folds < 2) throw ConfigError("split.k must be >= 2");
    if (weight_decay < 0.0) throw ConfigError("train.weight_decay must be >= 0");
    if (tta_crop < 1) throw ConfigError("train.tta_crop must be >= 1");
}

bool weight_decay_applies(const std::string& param_name) {
    return !(param_name.ends_with(".bias") || param_name.ends_with(".beta"));
}

double grad_global_norm(const std::vector<NodePtr>& params) {
    double sq = 0.0;
    for (const auto& p : params)
        if (p->grad.size() != 0) sq += p->grad.squaredNorm();
    return std::sqrt(sq);
}

double clip_gradients(const std::vector<NodePtr>& params, double max_norm) {
    const double norm = grad_global_norm(params);
    if (max_norm > 0.0 && norm > max_norm) {
        const double scale = max_norm / norm;
        for (const auto& p : params)
            if (p->grad.size() != 0) p->grad *= scale;
    }
    return norm;
}

AdamW::AdamW(const FusionModel& model, double weight_decay, double beta1, double beta2,
             double eps)
    : wd_(weight_decay), beta1_(beta1), beta2_(beta2), eps_(eps) {
    const auto& rates = model.group_learning_rates();
    for (const auto& [group, params] : model.parameter_groups()) {
        auto it = rates.find(group);
        if (it == rates.end())
            throw ArgumentError("optimizer: no learning rate for parameter group " + group);
        for (const auto& p : params) {
            Slot s;
            s.p = p;
            s.m = Eigen::MatrixXd::Zero(p->value.rows(), p->value.cols());
            s.v = s.m;
            s.base_lr = it->second;
            s.decay = weight_decay_applies(p->name);
            slots_.push_back(std::move(s));
        }
    }
}

void AdamW::step(double lr_scale) {
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    for (auto& s : slots_) {
        if (s.p->grad.size() == 0) continue; // parameter untouched this step
        const double lr = lr_scale * s.base_lr;
        s.m = beta1_ * s.m + (1.0 - beta1_) * s.p->grad;
        s.v = beta2_ * s.v + (1.0 - beta2_) * s.p->grad.cwiseProduct(s.p->grad);
        const Eigen::MatrixXd update =
            ((s.m / bc1).array() / ((s.v / bc2).array().sqrt() + eps_)).matrix();
        s.p->value -= lr * update;
        if (s.decay && wd_ > 0.0) s.p->value -= lr * wd_ * s.p->value;
    }
}

Stage2FoldAssembly assemble_stage2_fold(const Dataset& main, const Dataset& external,
                                        const FoldPlan& plan, int fold) {
    if (fold < 0 || fold >= plan.k) throw ArgumentError("fold index out of range");
    std::set<std::string> main_ids;
    Stage2FoldAssembly out;
    for (const auto& s : main.samples) {
        main_ids.insert(s.id);
        (plan.fold_of(s.id) == fold ? out.val_ids : out.train_ids).push_back(s.id);
    }
    for (const auto& s : external.samples) {
        if (!s.labels || !s.labels->all_zero())
            throw ArgumentError("stage 2: external sample with a positive label: " + s.id);
        if (main_ids.count(s.id))
            throw DataError("external sample id collides with main corpus id: " + s.id);
        out.train_ids.push_back(s.id);
    }
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Decoded 256x256 images, cached as 8-bit to bound memory. Quantization is
// lossless for freshly decoded files and immaterial after resizing.
class ImageStore {
public:
    explicit ImageStore(int side) : side_(side) {}

    ImageTensor get(const MemeSample& s) {
        auto it = cache_.find(s.image_ref);
        if (it == cache_.end()) {
            ImageTensor img;
            try {
                img = load_and_resize(s.image_ref, side_);
            } catch (const DataError& e) {
                throw DataError(std::string(e.what()) + " (sample " + s.id + ")");
            }
            Packed p;
            p.h = img.height;
            p.w = img.width;
            p.data.resize(img.data.size());
            for (size_t i = 0; i < img.data.size(); ++i)
                p.data[i] = static_cast<uint8_t>(std::lround(img.data[i] * 255.0));
            it = cache_.emplace(s.image_ref, std::move(p)).first;
        }
        const Packed& p = it->second;
        ImageTensor img;
        img.height = p.h;
        img.width = p.w;
        img.data.resize(p.data.size());
        for (size_t i = 0; i < p.data.size(); ++i) img.data[i] = p.data[i] / 255.0;
        return img;
    }

private:
    struct Packed {
        int h = 0, w = 0;
        std::vector<uint8_t> data;
    };
    int side_;
    std::map<std::string, Packed> cache_;
};

ModelInput make_input(const EncoderRegistry& reg, const InputSpec& spec,
                      const std::vector<int>& token_ids, const ImageTensor& img, int task) {
    ModelInput in;
    in.token_ids = task >= 0 ? inject_task_token(token_ids, task) : token_ids;
    for (const auto& id : spec.flat_backbones) in.image_flat[id] = reg.image(id).flatten(img);
    for (const auto& id : spec.feature_backbones)
        in.image_feature[id] = reg.image(id).encode(img).vector.transpose();
    return in;
}

class Predictor {
public:
    Predictor(FusionModel& model, const EncoderRegistry& reg, ImageStore& images,
              std::map<std::string, std::vector<int>>& tokens, int batch_size, bool flattened)
        : model_(model),
          reg_(reg),
          images_(images),
          tokens_(tokens),
          batch_(batch_size),
          flattened_(flattened) {
        if (flattened_ && model_.heads().width() != 1)
            throw ArgumentError("flattened prediction requires a single-logit model");
    }

    int width() const { return flattened_ ? kNumTasks : model_.heads().width(); }

    // rows x width probabilities; five-crop averaged when tta is set.
    Eigen::MatrixXd probs(const std::vector<const MemeSample*>& rows, bool tta, int crop) {
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), width());
        const int tasks = flattened_ ? kNumTasks : 1;
        for (int task = 0; task < tasks; ++task) {
            const int inject = flattened_ ? task : -1;
            Eigen::MatrixXd cols = tta ? probs_tta(rows, crop, inject) : probs_plain(rows, inject);
            if (flattened_)
                out.col(task) = cols.col(0);
            else
                out = cols;
        }
        return out;
    }

private:
    const std::vector<int>& token_ids(const MemeSample& s) {
        auto it = tokens_.find(s.id);
        if (it == tokens_.end())
            it = tokens_.emplace(s.id, HashTokenizer().tokenize(s.text)).first;
        return it->second;
    }

    Eigen::MatrixXd probs_plain(const std::vector<const MemeSample*>& rows, int task) {
        const InputSpec spec = model_.input_spec();
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), model_.heads().width());
        for (size_t at = 0; at < rows.size(); at += batch_) {
            const size_t n = std::min(static_cast<size_t>(batch_), rows.size() - at);
            std::vector<ModelInput> inputs;
            inputs.reserve(n);
            for (size_t i = 0; i < n; ++i) {
                const MemeSample& s = *rows[at + i];
                inputs.push_back(make_input(reg_, spec, token_ids(s), images_.get(s), task));
            }
            out.middleRows(static_cast<Eigen::Index>(at), static_cast<Eigen::Index>(n)) =
                model_.predict_probs(inputs);
        }
        return out;
    }

    Eigen::MatrixXd probs_tta(const std::vector<const MemeSample*>& rows, int crop, int task) {
        const InputSpec spec = model_.input_spec();
        const int W = model_.heads().width();
        Eigen::MatrixXd out(static_cast<Eigen::Index>(rows.size()), W);
        // Keep forward batches near batch_ inputs: group whole samples, five
        // crops each.
        const size_t group = std::max<size_t>(1, static_cast<size_t>(batch_) / 5);
        for (size_t at = 0; at < rows.size(); at += group) {
            const size_t n = std::min(group, rows.size() - at);
            std::vector<ModelInput> inputs;
            inputs.reserve(n * 5);
            for (size_t i = 0; i < n; ++i) {
                const MemeSample& s = *rows[at + i];
                const auto crops = five_crop(images_.get(s), crop);
                for (const auto& c : crops)
                    inputs.push_back(make_input(reg_, spec, token_ids(s), c, task));
            }
            const Eigen::MatrixXd probs = model_.predict_probs(inputs);
            for (size_t i = 0; i < n; ++i)
                out.row(static_cast<Eigen::Index>(at + i)) =
                    probs.middleRows(static_cast<Eigen::Index>(5 * i), 5).colwise().mean();
        }
        return out;
    }

    FusionModel& model_;
    const EncoderRegistry& reg_;
    ImageStore& images_;
    std::map<std::string, std::vector<int>>& tokens_;
    size_t batch_;
    bool flattened_;
};

struct TrainInstance {
    const MemeSample* sample;
    int task = -1; // canonical task index in flattened mode, else -1
};

// Shared stage driver. Stage 1 passes external = nullptr; stage 2 passes the
// all-negative external set and a single-task head.
struct StageDriver {
    int stage;
    const Dataset& train_main;
    const Dataset* external;
    const Dataset& test;
    const FoldPlan& plan;
    const TrainerOptions& opt;

    StageResult run() {
        const TrainingConfig& tc = opt.train;
        tc.validate();
        if (!opt.registry) throw ArgumentError("trainer: encoder registry is required");
        if (train_main.size() == 0) throw ArgumentError("trainer: empty training set");
        for (const auto& s : train_main.samples) {
            if (!s.labels) throw ArgumentError("trainer: unlabeled training sample: " + s.id);
            plan.fold_of(s.id); // fold plan must cover the whole dataset
        }

        const bool flattened = stage == 1 && tc.flatten_subtask_b;
        const std::vector<std::string> out_tasks =
            stage == 2 ? std::vector<std::string>{task_name(Task::misogynous)}
                       : std::vector<std::string>(task_names().begin(), task_names().end());

        StageResult result;
        result.oof.tasks = out_tasks;
        result.test.tasks = out_tasks;

        ImageStore images(256);
        std::map<std::string, std::vector<int>> tokens;

        Eigen::MatrixXd oof(static_cast<Eigen::Index>(train_main.size()),
                            static_cast<Eigen::Index>(out_tasks.size()));
        Eigen::MatrixXd test_sum = Eigen::MatrixXd::Zero(
            static_cast<Eigen::Index>(test.size()), static_cast<Eigen::Index>(out_tasks.size()));
        std::map<std::string, const MemeSample*> by_id;
        for (const auto& s : train_main.samples) by_id[s.id] = &s;
        if (external)
            for (const auto& s : external->samples) by_id.emplace(s.id, &s);

        json folds_log = json::array();
        for (int fold = 0; fold < plan.k; ++fold) {
            // Assemble this fold's sides.
            std::vector<const MemeSample*> train_rows, val_rows;
            std::vector<size_t> val_positions;
            if (stage == 2) {
                const auto asm2 =
                    assemble_stage2_fold(train_main, external ? *external : Dataset{}, plan, fold);
                for (const auto& id : asm2.train_ids) train_rows.push_back(by_id.at(id));
                for (const auto& id : asm2.val_ids) val_rows.push_back(by_id.at(id));
            } else {
                for (const auto& s : train_main.samples)
                    (plan.fold_of(s.id) == fold ? val_rows : train_rows).push_back(&s);
            }
            for (size_t i = 0; i < train_main.size(); ++i)
                if (plan.fold_of(train_main.samples[i].id) == fold) val_positions.push_back(i);

            std::vector<TrainInstance> instances;
            for (const auto* s : train_rows) {
                if (flattened)
                    for (int t = 0; t < kNumTasks; ++t) instances.push_back({s, t});
                else
                    instances.push_back({s, -1});
            }

            auto model = build_model(fold, flattened);
            const InputSpec spec = model->input_spec();
            AdamW optimizer(*model, tc.weight_decay);
            Predictor predictor(*model, *opt.registry, images, tokens, tc.batch_size, flattened);

            const int batches_per_epoch =
                static_cast<int>((instances.size() + tc.batch_size - 1) / tc.batch_size);
            const int total_steps = tc.epochs * batches_per_epoch;

            std::vector<double> val_history, loss_history;
            std::vector<Eigen::MatrixXd> best_weights = model->snapshot();
            double best_score = -1.0;
            int best_epoch = 0, global_step = 0, epochs_run = 0;

            for (int epoch = 0; epoch < tc.epochs; ++epoch) {
                epochs_run = epoch + 1;
                shuffle_instances(instances, fold, epoch);
                double loss_sum = 0.0;
                size_t loss_count = 0;

                for (size_t at = 0, batch_idx = 0; at < instances.size();
                     at += tc.batch_size, ++batch_idx) {
                    const size_t n =
                        std::min(static_cast<size_t>(tc.batch_size), instances.size() - at);
                    std::vector<ModelInput> inputs;
                    inputs.reserve(n);
                    Eigen::MatrixXd targets(static_cast<Eigen::Index>(n),
                                            model->heads().width());
                    for (size_t i = 0; i < n; ++i) {
                        const TrainInstance& inst = instances[at + i];
                        ImageTensor img = images.get(*inst.sample);
                        if (tc.augment) {
                            auto rng = RngKey(tc.seed)
                                           .with("augment")
                                           .with(arch_name(opt.arch))
                                           .with(static_cast<uint64_t>(stage))
                                           .with(static_cast<uint64_t>(fold))
                                           .with(static_cast<uint64_t>(epoch))
                                           .with(inst.sample->id)
                                           .stream();
                            img = train_augment(img, rng);
                        }
                        inputs.push_back(
                            make_input(*opt.registry, spec, token_ids(tokens, *inst.sample), img,
                                       inst.task));
                        fill_targets(targets, static_cast<Eigen::Index>(i), inst, *model);
                    }

                    auto dropout_rng = RngKey(tc.seed)
                                           .with("dropout")
                                           .with(arch_name(opt.arch))
                                           .with(static_cast<uint64_t>(stage))
                                           .with(static_cast<uint64_t>(fold))
                                           .with(static_cast<uint64_t>(epoch))
                                           .with(static_cast<uint64_t>(batch_idx))
                                           .stream();
                    nn::Tape tape;
                    NodePtr logits = model->forward(tape, inputs, true, &dropout_rng);
                    NodePtr loss = tape.bce_with_logits(logits, targets);
                    model->zero_grads();
                    tape.backward(loss);
                    clip_gradients(model->parameters(), tc.clip_norm);
                    ++global_step;
                    optimizer.step(
                        lr_schedule(global_step, total_steps, 1.0, tc.warmup_fraction));
                    loss_sum += loss->value(0, 0) * static_cast<double>(n);
                    loss_count += n;
                }
                loss_history.push_back(loss_count ? loss_sum / loss_count : 0.0);

                const double score = val_rows.empty()
                                         ? 0.0
                                         : val_score(predictor.probs(val_rows, false, 0), val_rows);
                val_history.push_back(score);
                if (score > best_score) {
                    best_score = score;
                    best_epoch = epoch;
                    best_weights = model->snapshot();
                }
                if (early_stop(val_history, tc.early_stop_patience).stop) break;
            }
            model->restore(best_weights);

            // Out-of-fold rows come from the restored best weights, plain
            // full-size inputs; test rows get the configured crop averaging.
            if (!val_rows.empty()) {
                const Eigen::MatrixXd val_probs = predictor.probs(val_rows, false, 0);
                for (size_t i = 0; i < val_positions.size(); ++i)
                    oof.row(static_cast<Eigen::Index>(val_positions[i])) = val_probs.row(
                        static_cast<Eigen::Index>(i));
            }
            if (test.size() > 0) {
                std::vector<const MemeSample*> test_rows;
                for (const auto& s : test.samples) test_rows.push_back(&s);
                test_sum += predictor.probs(test_rows, tc.tta, tc.tta_crop);
            }
            if (!opt.run_dir.empty())
                model->save(opt.run_dir / ("fold" + std::to_string(fold)));

            folds_log.push_back({{"fold", fold},
                                 {"epochs_run", epochs_run},
                                 {"best_epoch", best_epoch},
                                 {"best_val_macro_f1", best_score},
                                 {"val_macro_f1", val_history},
                                 {"train_loss", loss_history},
                                 {"train_rows", train_rows.size()},
                                 {"val_rows", val_rows.size()},
                                 {"total_steps", total_steps}});
        }

        for (size_t i = 0; i < train_main.size(); ++i) {
            result.oof.ids.push_back(train_main.samples[i].id);
            const Eigen::RowVectorXd r = oof.row(static_cast<Eigen::Index>(i));
            result.oof.values.emplace_back(r.data(), r.data() + r.size());
        }
        if (test.size() > 0) {
            test_sum /= static_cast<double>(plan.k);
            for (size_t i = 0; i < test.size(); ++i) {
                result.test.ids.push_back(test.samples[i].id);
                const Eigen::RowVectorXd r = test_sum.row(static_cast<Eigen::Index>(i));
                result.test.values.emplace_back(r.data(), r.data() + r.size());
            }
        }
        result.oof.sort_by_id();
        result.test.sort_by_id();
        result.oof.validate();
        if (test.size() > 0) result.test.validate();

        result.log = {{"stage", stage},
                      {"arch", arch_name(opt.arch)},
                      {"flattened", flattened},
                      {"k", plan.k},
                      {"folds", folds_log}};
        return result;
    }

private:
    static const std::vector<int>& token_ids(std::map<std::string, std::vector<int>>& tokens,
                                             const MemeSample& s) {
        auto it = tokens.find(s.id);
        if (it == tokens.end()) it = tokens.emplace(s.id, HashTokenizer().tokenize(s.text)).first;
        return it->second;
    }

    std::unique_ptr<FusionModel> build_model(int fold, bool flattened) const {
        HeadConfig heads = (stage == 2 || flattened) ? HeadConfig::single(Task::misogynous)
                                                     : HeadConfig::multitask();
        heads.hidden_dims = opt.hidden_dims;
        const uint64_t seed = RngKey(opt.train.seed)
                                  .with("model")
                                  .with(arch_name(opt.arch))
                                  .with(static_cast<uint64_t>(stage))
                                  .with(static_cast<uint64_t>(fold))
                                  .value();
        if (opt.arch == Arch::double_tower)
            return std::make_unique<DoubleTower>(*opt.registry, opt.dt, heads, seed);
        return std::make_unique<SingleFlow>(*opt.registry, opt.sf, heads, seed);
    }

    void shuffle_instances(std::vector<TrainInstance>& instances, int fold, int epoch) const {
        auto rng = RngKey(opt.train.seed)
                       .with("shuffle")
                       .with(arch_name(opt.arch))
                       .with(static_cast<uint64_t>(stage))
                       .with(static_cast<uint64_t>(fold))
                       .with(static_cast<uint64_t>(epoch))
                       .stream();
        for (size_t i = instances.size(); i > 1; --i)
            std::swap(instances[i - 1],
                      instances[rng.uniform_int(0, static_cast<int64_t>(i) - 1)]);
    }

    void fill_targets(Eigen::MatrixXd& targets, Eigen::Index row, const TrainInstance& inst,
                      const FusionModel& model) const {
        const LabelVector& labels = *inst.sample->labels;
        if (inst.task >= 0) {
            targets(row, 0) = labels.bits[inst.task];
            return;
        }
        const auto& tasks = model.heads().tasks;
        for (size_t t = 0; t < tasks.size(); ++t)
            targets(row, static_cast<Eigen::Index>(t)) = labels[tasks[t]];
    }

    // Validation macro-F1 at threshold 0.5: multilabel over the five tasks
    // for stage 1, two-class binary macro for stage 2.
    double val_score(const Eigen::MatrixXd& probs, const std::vector<const MemeSample*>& rows) const {
        if (probs.cols() == kNumTasks) {
            std::vector<std::array<int, kNumTasks>> pred(rows.size()), gold(rows.size());
            for (size_t i = 0; i < rows.size(); ++i) {
                for (int t = 0; t < kNumTasks; ++t) {
                    pred[i][t] = probs(static_cast<Eigen::Index>(i), t) >= 0.5 ? 1 : 0;
                    gold[i][t] = rows[i]->labels->bits[t];
                }
            }
            return multilabel_f1(pred, gold).macro;
        }
        std::vector<int> pred(rows.size()), gold(rows.size());
        for (size_t i = 0; i < rows.size(); ++i) {
            pred[i] = probs(static_cast<Eigen::Index>(i), 0) >= 0.5 ? 1 : 0;
            gold[i] = (*rows[i]->labels)[Task::misogynous];
        }
        return macro_f1_binary_task(pred, gold);
    }
};

} // namespace

StageResult train_stage1(const Dataset& train, const Dataset& test, const FoldPlan& plan,
                         const TrainerOptions& opt) {
    StageDriver driver{1, train, nullptr, test, plan, opt};
    return driver.run();
}

StageResult train_stage2(const Dataset& train, const Dataset& external, const Dataset& test,
                         const FoldPlan& plan, const TrainerOptions& opt) {
    StageDriver driver{2, train, &external, test, plan, opt};
    return driver.run();
}

PredictionMatrix predict_dataset(FusionModel& model, const Dataset& ds,
                                 const EncoderRegistry& reg, bool tta, int tta_crop,
                                 int batch_size, bool flattened) {
    if (batch_size < 1) throw ArgumentError("predict: batch size must be >= 1");
    ImageStore images(256);
    std::map<std::string, std::vector<int>> tokens;
    Predictor predictor(model, reg, images, tokens, batch_size, flattened);

    std::vector<const MemeSample*> rows;
    rows.reserve(ds.size());
    for (const auto& s : ds.samples) rows.push_back(&s);

    PredictionMatrix out;
    out.tasks = flattened ? std::vector<std::string>(task_names().begin(), task_names().end())
                          : model.heads().names();
    if (!rows.empty()) {
        const Eigen::MatrixXd probs = predictor.probs(rows, tta, tta_crop);
        for (size_t i = 0; i < rows.size(); ++i) {
            out.ids.push_back(rows[i]->id);
            const Eigen::RowVectorXd r = probs.row(static_cast<Eigen::Index>(i));
            out.values.emplace_back(r.data(), r.data() + r.size());
        }
    }
    out.sort_by_id();
    out.validate();
    return out;
}

} // namespace memeclf
