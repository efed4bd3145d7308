#include "memeclf/models.hpp"

#include <algorithm>
#include <cmath>

#include "memeclf/errors.hpp"
#include "memeclf/rng.hpp"

namespace memeclf {

using nn::NodePtr;
using nlohmann::json;

std::string arch_name(Arch arch) {
    return arch == Arch::double_tower ? "double_tower" : "single_flow";
}

Arch parse_arch(const std::string& name) {
    if (name == "double_tower") return Arch::double_tower;
    if (name == "single_flow") return Arch::single_flow;
    throw ConfigError("unknown architecture: " + name +
                      " (expected double_tower or single_flow)");
}

HeadConfig HeadConfig::multitask() {
    HeadConfig h;
    h.tasks = all_tasks();
    return h;
}

HeadConfig HeadConfig::single(Task task) {
    HeadConfig h;
    h.tasks = {task};
    return h;
}

void HeadConfig::validate() const {
    if (tasks.empty()) throw ConfigError("head config: task list must be non-empty");
    for (size_t i = 1; i < tasks.size(); ++i)
        if (static_cast<int>(tasks[i]) <= static_cast<int>(tasks[i - 1]))
            throw ConfigError("head config: tasks must follow the canonical label order");
    for (int d : hidden_dims)
        if (d < 1) throw ConfigError("head config: hidden dims must be >= 1");
}

std::vector<std::string> HeadConfig::names() const {
    std::vector<std::string> out;
    out.reserve(tasks.size());
    for (Task t : tasks) out.push_back(task_name(t));
    return out;
}

ModelInput prepare_input(const EncoderRegistry& reg, const InputSpec& spec,
                         const std::string& text, const ImageTensor& img) {
    ModelInput in;
    in.token_ids = HashTokenizer().tokenize(text);
    for (const auto& id : spec.flat_backbones) in.image_flat[id] = reg.image(id).flatten(img);
    for (const auto& id : spec.feature_backbones)
        in.image_feature[id] = reg.image(id).encode(img).vector.transpose();
    return in;
}

// ---------------------------------------------------------------------------
// FusionModel shared plumbing

namespace {

Eigen::MatrixXd xavier(Eigen::Index rows, Eigen::Index cols, RngStream rng) {
    const double limit = std::sqrt(6.0 / static_cast<double>(rows + cols));
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.uniform(-limit, limit);
    return m;
}

Eigen::MatrixXd small_normal(Eigen::Index rows, Eigen::Index cols, RngStream rng,
                             double stddev = 0.02) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = rng.normal(0.0, stddev);
    return m;
}

RngStream init_stream(uint64_t seed, const std::string& name) {
    return RngKey(seed).with("init").with(name).stream();
}

std::vector<Task> tasks_from_names(const std::vector<std::string>& names) {
    std::vector<Task> out;
    for (const auto& n : names) {
        bool found = false;
        for (Task t : all_tasks()) {
            if (task_name(t) == n) {
                out.push_back(t);
                found = true;
                break;
            }
        }
        if (!found) throw DataError("checkpoint names unknown task: " + n);
    }
    return out;
}

} // namespace

FusionModel::FusionModel(HeadConfig heads) : heads_(std::move(heads)) { heads_.validate(); }

NodePtr FusionModel::add_param(const std::string& group, const std::string& name,
                               Eigen::MatrixXd value) {
    for (const auto& p : params_)
        if (p->name == name) throw ArgumentError("duplicate parameter name: " + name);
    NodePtr p = nn::parameter(std::move(value), name);
    params_.push_back(p);
    groups_[group].push_back(p);
    return p;
}

void FusionModel::set_group_lr(const std::string& group, double lr) {
    if (lr <= 0.0) throw ConfigError("learning rate for group '" + group + "' must be > 0");
    group_lr_[group] = lr;
}

NodePtr FusionModel::param(const std::string& name) const {
    for (const auto& p : params_)
        if (p->name == name) return p;
    throw ArgumentError("no parameter named: " + name);
}

Eigen::MatrixXd FusionModel::predict_logits(const std::vector<ModelInput>& batch) {
    nn::Tape tape;
    return forward(tape, batch, false, nullptr)->value;
}

Eigen::MatrixXd FusionModel::predict_probs(const std::vector<ModelInput>& batch) {
    return nn::sigmoid_values(predict_logits(batch));
}

std::vector<Eigen::MatrixXd> FusionModel::snapshot() const {
    std::vector<Eigen::MatrixXd> snap;
    snap.reserve(params_.size());
    for (const auto& p : params_) snap.push_back(p->value);
    return snap;
}

void FusionModel::restore(const std::vector<Eigen::MatrixXd>& snap) {
    if (snap.size() != params_.size())
        throw ArgumentError("snapshot size does not match parameter count");
    for (size_t i = 0; i < snap.size(); ++i) params_[i]->value = snap[i];
}

void FusionModel::zero_grads() {
    for (const auto& p : params_) p->zero_grad();
}

void FusionModel::save(const std::filesystem::path& dir) const {
    TensorStore store;
    for (const auto& p : params_) store.put(p->name, p->value);
    store.meta() = geometry();
    store.save(dir);
}

void FusionModel::load_weights(const TensorStore& store) {
    if (store.size() != params_.size()) {
        for (const auto& name : store.names()) {
            bool known = false;
            for (const auto& p : params_) known = known || p->name == name;
            if (!known) throw DataError("checkpoint has unexpected tensor: " + name);
        }
        throw DataError("checkpoint tensor count does not match model");
    }
    for (const auto& p : params_) {
        const Eigen::MatrixXd& t = store.get(p->name);
        if (t.rows() != p->value.rows() || t.cols() != p->value.cols())
            throw DataError("checkpoint tensor '" + p->name + "' has shape " +
                            std::to_string(t.rows()) + "x" + std::to_string(t.cols()) +
                            ", model expects " + std::to_string(p->value.rows()) + "x" +
                            std::to_string(p->value.cols()));
        p->value = t;
    }
}

// ---------------------------------------------------------------------------
// Double tower

DoubleTower::DoubleTower(const EncoderRegistry& reg, DoubleTowerOptions opt, HeadConfig heads,
                         uint64_t seed)
    : FusionModel(std::move(heads)), opt_(std::move(opt)) {
    if (opt_.dropout < 0.0 || opt_.dropout >= 1.0)
        throw ConfigError("double tower: dropout must be in [0, 1)");

    const TextTableEncoder& text_enc = reg.text(opt_.text_encoder);
    const GridImageEncoder& image_enc = reg.image(opt_.image_backbone);
    text_dim_ = text_enc.dim();
    image_in_dim_ = image_enc.input_dim();

    table_ = add_param("text", "text.table", text_enc.table());
    img_w_ = add_param("image", "image.weight", image_enc.weight());
    img_b_ = add_param("image", "image.bias", image_enc.bias().transpose());

    int in = text_dim_ + image_enc.dim();
    const auto& hidden = this->heads().hidden_dims;
    for (size_t i = 0; i < hidden.size(); ++i) {
        const std::string base = "fusion.l" + std::to_string(i + 1);
        mlp_w_.push_back(add_param("fusion", base + ".weight",
                                   xavier(hidden[i], in, init_stream(seed, base + ".weight"))));
        mlp_b_.push_back(add_param("fusion", base + ".bias", Eigen::MatrixXd::Zero(1, hidden[i])));
        in = hidden[i];
    }
    mlp_w_.push_back(add_param("fusion", "fusion.head.weight",
                               xavier(this->heads().width(), in,
                                      init_stream(seed, "fusion.head.weight"))));
    mlp_b_.push_back(
        add_param("fusion", "fusion.head.bias", Eigen::MatrixXd::Zero(1, this->heads().width())));

    set_group_lr("text", opt_.lr_text);
    set_group_lr("image", opt_.lr_image);
    set_group_lr("fusion", opt_.lr_fusion);
}

InputSpec DoubleTower::input_spec() const { return InputSpec{{opt_.image_backbone}, {}}; }

NodePtr DoubleTower::forward(nn::Tape& tape, const std::vector<ModelInput>& batch, bool train,
                             RngStream* dropout_rng) {
    if (batch.empty()) throw ArgumentError("forward: empty batch");
    const bool use_dropout = train && opt_.dropout > 0.0;
    if (use_dropout && dropout_rng == nullptr)
        throw ArgumentError("forward: training with dropout requires an rng stream");

    const Eigen::Index B = static_cast<Eigen::Index>(batch.size());

    // Text tower: one gather over all samples' tokens, then per-sample mean
    // pooling expressed as a constant averaging matrix.
    std::vector<int> ids_all;
    for (const auto& in : batch) {
        if (in.token_ids.empty()) throw ArgumentError("forward: sample with no tokens");
        ids_all.insert(ids_all.end(), in.token_ids.begin(), in.token_ids.end());
    }
    Eigen::MatrixXd pool = Eigen::MatrixXd::Zero(B, static_cast<Eigen::Index>(ids_all.size()));
    Eigen::Index at = 0;
    for (Eigen::Index i = 0; i < B; ++i) {
        const auto n = static_cast<Eigen::Index>(batch[i].token_ids.size());
        pool.block(i, at, 1, n).setConstant(1.0 / static_cast<double>(n));
        at += n;
    }
    NodePtr pooled = tape.matmul(nn::constant(std::move(pool)),
                                 tape.gather_rows(table_, std::move(ids_all)));

    // Image tower: affine + tanh over the precomputed grid rows.
    Eigen::MatrixXd flats(B, image_in_dim_);
    for (Eigen::Index i = 0; i < B; ++i) {
        auto it = batch[i].image_flat.find(opt_.image_backbone);
        if (it == batch[i].image_flat.end())
            throw ArgumentError("forward: input missing image data for backbone " +
                                opt_.image_backbone);
        if (it->second.size() != image_in_dim_)
            throw ArgumentError("forward: image row has wrong width for backbone " +
                                opt_.image_backbone);
        flats.row(i) = it->second;
    }
    NodePtr feat = tape.tanh_(
        tape.add_rowvec(tape.matmul_t(nn::constant(std::move(flats)), img_w_), img_b_));

    NodePtr h = tape.concat_cols({pooled, feat});
    for (size_t i = 0; i + 1 < mlp_w_.size(); ++i) {
        h = tape.tanh_(tape.add_rowvec(tape.matmul_t(h, mlp_w_[i]), mlp_b_[i]));
        if (use_dropout) h = tape.dropout(h, opt_.dropout, *dropout_rng);
    }
    return tape.add_rowvec(tape.matmul_t(h, mlp_w_.back()), mlp_b_.back());
}

json DoubleTower::geometry() const {
    return json{{"arch", arch_name(arch())},
                {"tasks", heads().names()},
                {"hidden_dims", heads().hidden_dims},
                {"text_encoder", opt_.text_encoder},
                {"image_backbone", opt_.image_backbone},
                {"dropout", opt_.dropout},
                {"lr_text", opt_.lr_text},
                {"lr_image", opt_.lr_image},
                {"lr_fusion", opt_.lr_fusion}};
}

// ---------------------------------------------------------------------------
// Single flow

SingleFlow::SingleFlow(const EncoderRegistry& reg, SingleFlowOptions opt, HeadConfig heads,
                       uint64_t seed)
    : FusionModel(std::move(heads)), opt_(std::move(opt)) {
    if (opt_.backbones.empty()) throw ConfigError("single flow: needs at least one backbone");
    for (size_t i = 0; i < opt_.backbones.size(); ++i)
        for (size_t j = i + 1; j < opt_.backbones.size(); ++j)
            if (opt_.backbones[i] == opt_.backbones[j])
                throw ConfigError("single flow: duplicate backbone id " + opt_.backbones[i]);
    if (opt_.layers < 1 || opt_.heads < 1 || opt_.width < 1 || opt_.ffn < 1)
        throw ConfigError("single flow: layers/heads/width/ffn must be >= 1");
    if (opt_.width % opt_.heads != 0)
        throw ConfigError("single flow: width must be divisible by head count");
    if (opt_.dropout < 0.0 || opt_.dropout >= 1.0)
        throw ConfigError("single flow: dropout must be in [0, 1)");
    const int min_seq = 1 + 2 + static_cast<int>(opt_.backbones.size());
    if (opt_.max_seq < min_seq)
        throw ConfigError("single flow: max_seq must be at least " + std::to_string(min_seq));

    const int W = opt_.width;
    table_ = add_param("all", "embed.table",
                       small_normal(HashTokenizer::kVocab, W, init_stream(seed, "embed.table")));
    cls_ = add_param("all", "embed.cls", small_normal(1, W, init_stream(seed, "embed.cls")));
    segment_ =
        add_param("all", "embed.segment", small_normal(2, W, init_stream(seed, "embed.segment")));
    position_ = add_param("all", "embed.position",
                          small_normal(HashTokenizer::kMaxLen + 1, W,
                                       init_stream(seed, "embed.position")));
    vis_position_ = add_param("all", "embed.vis_position",
                              small_normal(1, W, init_stream(seed, "embed.vis_position")));

    for (const auto& b : opt_.backbones) {
        const GridImageEncoder& enc = reg.image(b);
        proj_w_[b] = add_param("all", "proj." + b + ".weight",
                               xavier(W, enc.dim(), init_stream(seed, "proj." + b + ".weight")));
        proj_b_[b] = add_param("all", "proj." + b + ".bias", Eigen::MatrixXd::Zero(1, W));
        if (opt_.train_backbones) {
            backbone_w_[b] = add_param("all", "backbone." + b + ".weight", enc.weight());
            backbone_b_[b] =
                add_param("all", "backbone." + b + ".bias", enc.bias().transpose());
        }
    }

    for (int l = 0; l < opt_.layers; ++l) {
        const std::string base = "layer" + std::to_string(l);
        Layer layer;
        auto lin = [&](const std::string& tag, int rows, int cols) {
            return add_param("all", base + "." + tag + ".weight",
                             xavier(rows, cols, init_stream(seed, base + "." + tag + ".weight")));
        };
        auto bias = [&](const std::string& tag, int cols) {
            return add_param("all", base + "." + tag + ".bias", Eigen::MatrixXd::Zero(1, cols));
        };
        layer.qw = lin("attn.q", W, W);
        layer.qb = bias("attn.q", W);
        layer.kw = lin("attn.k", W, W);
        layer.kb = bias("attn.k", W);
        layer.vw = lin("attn.v", W, W);
        layer.vb = bias("attn.v", W);
        layer.ow = lin("attn.out", W, W);
        layer.ob = bias("attn.out", W);
        layer.ln1_g = add_param("all", base + ".ln1.gamma", Eigen::MatrixXd::Ones(1, W));
        layer.ln1_b = add_param("all", base + ".ln1.beta", Eigen::MatrixXd::Zero(1, W));
        layer.ffn_in_w = lin("ffn.in", opt_.ffn, W);
        layer.ffn_in_b = bias("ffn.in", opt_.ffn);
        layer.ffn_out_w = lin("ffn.out", W, opt_.ffn);
        layer.ffn_out_b = bias("ffn.out", W);
        layer.ln2_g = add_param("all", base + ".ln2.gamma", Eigen::MatrixXd::Ones(1, W));
        layer.ln2_b = add_param("all", base + ".ln2.beta", Eigen::MatrixXd::Zero(1, W));
        layers_.push_back(std::move(layer));
    }

    head_w_ = add_param("all", "head.weight",
                        xavier(this->heads().width(), W, init_stream(seed, "head.weight")));
    head_b_ = add_param("all", "head.bias", Eigen::MatrixXd::Zero(1, this->heads().width()));

    set_group_lr("all", opt_.lr);
}

InputSpec SingleFlow::input_spec() const {
    if (opt_.train_backbones) return InputSpec{opt_.backbones, {}};
    return InputSpec{{}, opt_.backbones};
}

NodePtr SingleFlow::encode_sequence(nn::Tape& tape, const ModelInput& input, bool train,
                                    RngStream* dropout_rng) {
    const auto& ids = input.token_ids;
    if (ids.empty()) throw ArgumentError("forward: sample with no tokens");
    const int T = static_cast<int>(ids.size());
    if (T > HashTokenizer::kMaxLen)
        throw ArgumentError("forward: token sequence longer than the position table");
    const int L = 1 + T + static_cast<int>(opt_.backbones.size());
    if (L > opt_.max_seq)
        throw ArgumentError("forward: sequence length " + std::to_string(L) +
                            " exceeds model maximum " + std::to_string(opt_.max_seq));
    const bool use_dropout = train && opt_.dropout > 0.0;
    if (use_dropout && dropout_rng == nullptr)
        throw ArgumentError("forward: training with dropout requires an rng stream");

    NodePtr seg_text = tape.slice_rows(segment_, 0, 1);
    NodePtr seg_image = tape.slice_rows(segment_, 1, 1);

    NodePtr cls = tape.add(tape.add(cls_, tape.slice_rows(position_, 0, 1)), seg_text);

    std::vector<int> pos_ids(T);
    for (int i = 0; i < T; ++i) pos_ids[i] = i + 1;
    NodePtr text = tape.add(tape.gather_rows(table_, ids), tape.gather_rows(position_, pos_ids));
    text = tape.add_rowvec(text, seg_text);

    std::vector<NodePtr> rows{cls, text};
    for (const auto& b : opt_.backbones) {
        NodePtr feat;
        if (opt_.train_backbones) {
            auto it = input.image_flat.find(b);
            if (it == input.image_flat.end())
                throw ArgumentError("forward: input missing image data for backbone " + b);
            feat = tape.tanh_(tape.add_rowvec(
                tape.matmul_t(nn::constant(it->second), backbone_w_.at(b)), backbone_b_.at(b)));
        } else {
            auto it = input.image_feature.find(b);
            if (it == input.image_feature.end())
                throw ArgumentError("forward: input missing image feature for backbone " + b);
            feat = nn::constant(it->second);
        }
        NodePtr tok = tape.add_rowvec(tape.matmul_t(feat, proj_w_.at(b)), proj_b_.at(b));
        rows.push_back(tape.add(tape.add(tok, vis_position_), seg_image));
    }
    NodePtr S = tape.concat_rows(rows);

    const int dh = opt_.width / opt_.heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (const auto& l : layers_) {
        NodePtr Q = tape.add_rowvec(tape.matmul_t(S, l.qw), l.qb);
        NodePtr K = tape.add_rowvec(tape.matmul_t(S, l.kw), l.kb);
        NodePtr V = tape.add_rowvec(tape.matmul_t(S, l.vw), l.vb);
        std::vector<NodePtr> ctx;
        for (int h = 0; h < opt_.heads; ++h) {
            NodePtr Qh = tape.slice_cols(Q, h * dh, dh);
            NodePtr Kh = tape.slice_cols(K, h * dh, dh);
            NodePtr Vh = tape.slice_cols(V, h * dh, dh);
            NodePtr probs = tape.softmax_rows(tape.scale(tape.matmul_t(Qh, Kh), scale));
            ctx.push_back(tape.matmul(probs, Vh));
        }
        NodePtr attn = tape.add_rowvec(tape.matmul_t(tape.concat_cols(ctx), l.ow), l.ob);
        if (use_dropout) attn = tape.dropout(attn, opt_.dropout, *dropout_rng);
        S = tape.layer_norm(tape.add(S, attn), l.ln1_g, l.ln1_b);

        NodePtr mid = tape.gelu_(tape.add_rowvec(tape.matmul_t(S, l.ffn_in_w), l.ffn_in_b));
        NodePtr out = tape.add_rowvec(tape.matmul_t(mid, l.ffn_out_w), l.ffn_out_b);
        if (use_dropout) out = tape.dropout(out, opt_.dropout, *dropout_rng);
        S = tape.layer_norm(tape.add(S, out), l.ln2_g, l.ln2_b);
    }
    return tape.slice_rows(S, 0, 1);
}

NodePtr SingleFlow::forward(nn::Tape& tape, const std::vector<ModelInput>& batch, bool train,
                            RngStream* dropout_rng) {
    if (batch.empty()) throw ArgumentError("forward: empty batch");
    std::vector<NodePtr> outs;
    outs.reserve(batch.size());
    for (const auto& input : batch) outs.push_back(encode_sequence(tape, input, train, dropout_rng));
    NodePtr pooled = outs.size() == 1 ? outs[0] : tape.concat_rows(outs);
    return tape.add_rowvec(tape.matmul_t(pooled, head_w_), head_b_);
}

json SingleFlow::geometry() const {
    return json{{"arch", arch_name(arch())},
                {"tasks", heads().names()},
                {"hidden_dims", heads().hidden_dims},
                {"backbones", opt_.backbones},
                {"layers", opt_.layers},
                {"heads", opt_.heads},
                {"width", opt_.width},
                {"ffn", opt_.ffn},
                {"max_seq", opt_.max_seq},
                {"dropout", opt_.dropout},
                {"train_backbones", opt_.train_backbones},
                {"lr", opt_.lr}};
}

// ---------------------------------------------------------------------------

std::unique_ptr<FusionModel> load_model(const EncoderRegistry& reg,
                                        const std::filesystem::path& dir) {
    TensorStore store = TensorStore::load(dir);
    const json& meta = store.meta();
    if (!meta.contains("arch")) throw DataError("checkpoint meta is missing 'arch'");

    HeadConfig heads;
    heads.tasks = tasks_from_names(meta.at("tasks").get<std::vector<std::string>>());
    heads.hidden_dims = meta.value("hidden_dims", std::vector<int>{256, 64});

    std::unique_ptr<FusionModel> model;
    const Arch arch = parse_arch(meta.at("arch").get<std::string>());
    if (arch == Arch::double_tower) {
        DoubleTowerOptions opt;
        opt.text_encoder = meta.at("text_encoder").get<std::string>();
        opt.image_backbone = meta.at("image_backbone").get<std::string>();
        opt.dropout = meta.value("dropout", opt.dropout);
        opt.lr_text = meta.value("lr_text", opt.lr_text);
        opt.lr_image = meta.value("lr_image", opt.lr_image);
        opt.lr_fusion = meta.value("lr_fusion", opt.lr_fusion);
        model = std::make_unique<DoubleTower>(reg, opt, heads, 0);
    } else {
        SingleFlowOptions opt;
        opt.backbones = meta.at("backbones").get<std::vector<std::string>>();
        opt.layers = meta.value("layers", opt.layers);
        opt.heads = meta.value("heads", opt.heads);
        opt.width = meta.value("width", opt.width);
        opt.ffn = meta.value("ffn", opt.ffn);
        opt.max_seq = meta.value("max_seq", opt.max_seq);
        opt.dropout = meta.value("dropout", opt.dropout);
        opt.train_backbones = meta.value("train_backbones", opt.train_backbones);
        opt.lr = meta.value("lr", opt.lr);
        model = std::make_unique<SingleFlow>(reg, opt, heads, 0);
    }
    model->load_weights(store);
    return model;
}

} // namespace memeclf
