#include <doctest.h>

#include <cmath>
#include <memory>

#include "memeclf/errors.hpp"
#include "memeclf/models.hpp"
#include "memeclf/rng.hpp"
#include "helpers.hpp"

using namespace memeclf;
using nn::NodePtr;

namespace {

// Small-but-not-flat test image.
ImageTensor patterned_image(int side = 16) {
    ImageTensor img = ImageTensor::filled(side, side, 0.5);
    for (int y = 0; y < side; ++y)
        for (int x = 0; x < side; ++x) {
            img.at(y, x, 0) = static_cast<double>(y) / side;
            img.at(y, x, 2) = static_cast<double>(x) / side;
        }
    return img;
}

EncoderRegistry small_registry() {
    EncoderRegistry reg;
    reg.add_text(std::make_shared<TextTableEncoder>(TextTableEncoder::toy("t", 4, 11)));
    reg.add_image(std::make_shared<GridImageEncoder>(GridImageEncoder::toy("g", 3, 12, 2)));
    reg.add_image(std::make_shared<GridImageEncoder>(GridImageEncoder::toy("g2", 3, 13, 2)));
    return reg;
}

Eigen::MatrixXd affine_ref(const Eigen::MatrixXd& x, const Eigen::MatrixXd& w,
                           const Eigen::MatrixXd& b) {
    Eigen::MatrixXd y = x * w.transpose();
    y.rowwise() += b.row(0);
    return y;
}

Eigen::MatrixXd layer_norm_ref(const Eigen::MatrixXd& x, const Eigen::MatrixXd& g,
                               const Eigen::MatrixXd& b) {
    const double eps = 1e-5;
    Eigen::MatrixXd y(x.rows(), x.cols());
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double mu = x.row(r).mean();
        const Eigen::RowVectorXd centered = x.row(r).array() - mu;
        const double var = centered.squaredNorm() / static_cast<double>(x.cols());
        y.row(r) = ((centered / std::sqrt(var + eps)).array() * g.row(0).array()).matrix() +
                   b.row(0);
    }
    return y;
}

Eigen::MatrixXd softmax_rows_ref(Eigen::MatrixXd x) {
    for (Eigen::Index r = 0; r < x.rows(); ++r) {
        const double m = x.row(r).maxCoeff();
        x.row(r) = (x.row(r).array() - m).exp();
        x.row(r) /= x.row(r).sum();
    }
    return x;
}

Eigen::MatrixXd gelu_ref(const Eigen::MatrixXd& x) {
    return x.unaryExpr(
        [](double t) { return 0.5 * t * (1.0 + std::erf(t / std::sqrt(2.0))); });
}

// Independent plain-Eigen replay of the two-tower forward pass for one sample.
Eigen::RowVectorXd double_tower_ref(FusionModel& m, const HashTokenizer& tok,
                                    const std::string& text, const Eigen::RowVectorXd& flat) {
    auto P = [&](const std::string& n) -> const Eigen::MatrixXd& { return m.param(n)->value; };
    const auto ids = tok.tokenize(text);
    Eigen::RowVectorXd pooled = Eigen::RowVectorXd::Zero(P("text.table").cols());
    for (int id : ids) pooled += P("text.table").row(id);
    pooled /= static_cast<double>(ids.size());

    Eigen::MatrixXd feat = affine_ref(flat, P("image.weight"), P("image.bias"));
    feat = feat.array().tanh();

    Eigen::MatrixXd h(1, pooled.size() + feat.cols());
    h << pooled, feat;
    const size_t hidden = m.heads().hidden_dims.size();
    for (size_t i = 0; i < hidden; ++i) {
        const std::string base = "fusion.l" + std::to_string(i + 1);
        h = affine_ref(h, P(base + ".weight"), P(base + ".bias")).array().tanh();
    }
    return affine_ref(h, P("fusion.head.weight"), P("fusion.head.bias")).row(0);
}

// Independent replay of the transformer forward pass for one sample.
Eigen::RowVectorXd single_flow_ref(FusionModel& m, const std::vector<std::string>& backbones,
                                   int layers, int heads, const ModelInput& in) {
    auto P = [&](const std::string& n) -> const Eigen::MatrixXd& { return m.param(n)->value; };
    const int W = static_cast<int>(P("embed.cls").cols());
    const int T = static_cast<int>(in.token_ids.size());
    const int L = 1 + T + static_cast<int>(backbones.size());

    Eigen::MatrixXd S(L, W);
    S.row(0) = P("embed.cls").row(0) + P("embed.position").row(0) + P("embed.segment").row(0);
    for (int i = 0; i < T; ++i)
        S.row(1 + i) = P("embed.table").row(in.token_ids[static_cast<size_t>(i)]) +
                       P("embed.position").row(i + 1) + P("embed.segment").row(0);
    int at = 1 + T;
    for (const auto& b : backbones) {
        const Eigen::RowVectorXd& feat = in.image_feature.at(b);
        const Eigen::MatrixXd tok =
            affine_ref(feat, P("proj." + b + ".weight"), P("proj." + b + ".bias"));
        S.row(at++) = tok.row(0) + P("embed.vis_position").row(0) + P("embed.segment").row(1);
    }

    const int dh = W / heads;
    const double scale = 1.0 / std::sqrt(static_cast<double>(dh));
    for (int l = 0; l < layers; ++l) {
        const std::string base = "layer" + std::to_string(l);
        const Eigen::MatrixXd Q =
            affine_ref(S, P(base + ".attn.q.weight"), P(base + ".attn.q.bias"));
        const Eigen::MatrixXd K =
            affine_ref(S, P(base + ".attn.k.weight"), P(base + ".attn.k.bias"));
        const Eigen::MatrixXd V =
            affine_ref(S, P(base + ".attn.v.weight"), P(base + ".attn.v.bias"));
        Eigen::MatrixXd ctx(L, W);
        for (int h = 0; h < heads; ++h) {
            const Eigen::MatrixXd Qh = Q.middleCols(h * dh, dh);
            const Eigen::MatrixXd Kh = K.middleCols(h * dh, dh);
            const Eigen::MatrixXd Vh = V.middleCols(h * dh, dh);
            ctx.middleCols(h * dh, dh) =
                softmax_rows_ref(Qh * Kh.transpose() * scale) * Vh;
        }
        const Eigen::MatrixXd attn =
            affine_ref(ctx, P(base + ".attn.out.weight"), P(base + ".attn.out.bias"));
        S = layer_norm_ref(S + attn, P(base + ".ln1.gamma"), P(base + ".ln1.beta"));
        const Eigen::MatrixXd mid =
            gelu_ref(affine_ref(S, P(base + ".ffn.in.weight"), P(base + ".ffn.in.bias")));
        const Eigen::MatrixXd out =
            affine_ref(mid, P(base + ".ffn.out.weight"), P(base + ".ffn.out.bias"));
        S = layer_norm_ref(S + out, P(base + ".ln2.gamma"), P(base + ".ln2.beta"));
    }
    return affine_ref(S.row(0), P("head.weight"), P("head.bias")).row(0);
}

} // namespace

TEST_SUITE("models") {

TEST_CASE("head config enforces canonical order and sane shapes") {
    CHECK(HeadConfig::multitask().names() ==
          std::vector<std::string>{"misogynous", "shaming", "stereotype", "objectification",
                                   "violence"});
    CHECK(HeadConfig::multitask().width() == 5);
    CHECK(HeadConfig::single(Task::shaming).width() == 1);
    CHECK(HeadConfig::single(Task::shaming).names() == std::vector<std::string>{"shaming"});

    HeadConfig empty;
    CHECK_THROWS_AS(empty.validate(), ConfigError);
    HeadConfig reversed;
    reversed.tasks = {Task::shaming, Task::misogynous};
    CHECK_THROWS_AS(reversed.validate(), ConfigError);
    HeadConfig bad_dim = HeadConfig::multitask();
    bad_dim.hidden_dims = {0};
    CHECK_THROWS_AS(bad_dim.validate(), ConfigError);
}

TEST_CASE("architecture names round-trip and reject strangers") {
    CHECK(parse_arch("double_tower") == Arch::double_tower);
    CHECK(parse_arch("single_flow") == Arch::single_flow);
    CHECK(arch_name(Arch::double_tower) == "double_tower");
    CHECK(arch_name(Arch::single_flow) == "single_flow");
    CHECK_THROWS_AS(parse_arch("triple_tower"), ConfigError);
}

TEST_CASE("two-tower forward matches an independent replay") {
    EncoderRegistry reg = small_registry();
    DoubleTowerOptions opt;
    opt.text_encoder = "t";
    opt.image_backbone = "g";
    HeadConfig heads = HeadConfig::multitask();
    heads.hidden_dims = {5, 4};
    DoubleTower model(reg, opt, heads, 21);

    const ImageTensor img = patterned_image();
    const std::vector<std::string> texts = {"some plain words", "another short caption here"};
    std::vector<ModelInput> batch;
    for (const auto& t : texts) batch.push_back(prepare_input(reg, model.input_spec(), t, img));

    const Eigen::MatrixXd logits = model.predict_logits(batch);
    REQUIRE(logits.rows() == 2);
    REQUIRE(logits.cols() == 5);
    for (int i = 0; i < 2; ++i) {
        const Eigen::RowVectorXd want = double_tower_ref(
            model, HashTokenizer(), texts[static_cast<size_t>(i)], batch[static_cast<size_t>(i)].image_flat.at("g"));
        CHECK((logits.row(i) - want).cwiseAbs().maxCoeff() < 1e-12);
    }

    SUBCASE("batched rows equal single-sample predictions") {
        for (size_t i = 0; i < batch.size(); ++i) {
            const Eigen::MatrixXd one = model.predict_logits({batch[i]});
            CHECK((logits.row(static_cast<Eigen::Index>(i)) - one.row(0)).cwiseAbs().maxCoeff() <
                  1e-12);
        }
    }
    SUBCASE("probabilities are the sigmoid of the logits") {
        const Eigen::MatrixXd probs = model.predict_probs(batch);
        CHECK((probs - nn::sigmoid_values(logits)).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("two-tower weights start from the registered encoders") {
    EncoderRegistry reg = small_registry();
    DoubleTowerOptions opt;
    opt.text_encoder = "t";
    opt.image_backbone = "g";
    DoubleTower model(reg, opt, HeadConfig::multitask(), 1);
    CHECK(model.param("text.table")->value == reg.text("t").table());
    CHECK(model.param("image.weight")->value == reg.image("g").weight());
    CHECK(model.param("image.bias")->value == reg.image("g").bias().transpose());
}

TEST_CASE("two-tower parameter groups partition the parameters with their rates") {
    EncoderRegistry reg = small_registry();
    DoubleTowerOptions opt;
    opt.text_encoder = "t";
    opt.image_backbone = "g";
    HeadConfig heads = HeadConfig::multitask();
    heads.hidden_dims = {6, 3};
    DoubleTower model(reg, opt, heads, 2);

    const auto& groups = model.parameter_groups();
    REQUIRE(groups.size() == 3);
    CHECK(groups.at("text").size() == 1);
    CHECK(groups.at("image").size() == 2);
    CHECK(groups.at("fusion").size() == 6); // two hidden + head, weight and bias each
    size_t total = 0;
    for (const auto& [name, params] : groups) total += params.size();
    CHECK(total == model.parameters().size());

    const auto& lr = model.group_learning_rates();
    CHECK(lr.at("text") == 5e-5);
    CHECK(lr.at("image") == 1e-4);
    CHECK(lr.at("fusion") == 1e-3);
}

TEST_CASE("transformer forward matches an independent replay") {
    EncoderRegistry reg = small_registry();
    SingleFlowOptions opt;
    opt.backbones = {"g", "g2"};
    opt.layers = 2;
    opt.heads = 2;
    opt.width = 8;
    opt.ffn = 12;
    SingleFlow model(reg, opt, HeadConfig::multitask(), 33);

    const ImageTensor img = patterned_image();
    const ModelInput in = prepare_input(reg, model.input_spec(), "caption words go here", img);
    const Eigen::MatrixXd logits = model.predict_logits({in});
    REQUIRE(logits.rows() == 1);
    REQUIRE(logits.cols() == 5);
    const Eigen::RowVectorXd want = single_flow_ref(model, opt.backbones, 2, 2, in);
    CHECK((logits.row(0) - want).cwiseAbs().maxCoeff() < 1e-12);

    SUBCASE("batched rows equal single-sample predictions") {
        const ModelInput other = prepare_input(reg, model.input_spec(), "different text", img);
        const Eigen::MatrixXd both = model.predict_logits({in, other});
        CHECK((both.row(0) - logits.row(0)).cwiseAbs().maxCoeff() < 1e-12);
        CHECK((both.row(1) - model.predict_logits({other}).row(0)).cwiseAbs().maxCoeff() <
              1e-12);
    }
}

TEST_CASE("transformer has one parameter group at one rate") {
    EncoderRegistry reg = small_registry();
    SingleFlowOptions opt;
    opt.backbones = {"g"};
    opt.width = 8;
    opt.heads = 2;
    opt.ffn = 8;
    SingleFlow model(reg, opt, HeadConfig::multitask(), 3);
    REQUIRE(model.parameter_groups().size() == 1);
    CHECK(model.parameter_groups().at("all").size() == model.parameters().size());
    CHECK(model.group_learning_rates().at("all") == 5e-5);
}

TEST_CASE("identical visual tokens may swap places without changing the output") {
    // both visual rows share one position embedding and the image segment,
    // so once the per-backbone projections agree the transformer cannot tell
    // which backbone produced which feature
    EncoderRegistry reg = small_registry();
    SingleFlowOptions opt;
    opt.backbones = {"g", "g2"};
    opt.width = 8;
    opt.heads = 2;
    opt.ffn = 12;
    SingleFlow model(reg, opt, HeadConfig::multitask(), 55);
    model.param("proj.g2.weight")->value = model.param("proj.g.weight")->value;
    model.param("proj.g2.bias")->value = model.param("proj.g.bias")->value;

    const ImageTensor img = patterned_image();
    ModelInput in = prepare_input(reg, model.input_spec(), "swap test", img);
    REQUIRE(in.image_feature.at("g") != in.image_feature.at("g2"));
    ModelInput swapped = in;
    std::swap(swapped.image_feature.at("g"), swapped.image_feature.at("g2"));

    const Eigen::MatrixXd a = model.predict_logits({in});
    const Eigen::MatrixXd b = model.predict_logits({swapped});
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("same seed builds the same model, different seed does not") {
    EncoderRegistry reg = small_registry();
    SingleFlowOptions opt;
    opt.backbones = {"g"};
    opt.width = 8;
    opt.heads = 2;
    opt.ffn = 8;
    SingleFlow m1(reg, opt, HeadConfig::multitask(), 77);
    SingleFlow m2(reg, opt, HeadConfig::multitask(), 77);
    SingleFlow m3(reg, opt, HeadConfig::multitask(), 78);
    REQUIRE(m1.parameters().size() == m2.parameters().size());
    bool all_equal_77 = true, all_equal_78 = true;
    for (size_t i = 0; i < m1.parameters().size(); ++i) {
        all_equal_77 = all_equal_77 && m1.parameters()[i]->value == m2.parameters()[i]->value;
        all_equal_78 = all_equal_78 && m1.parameters()[i]->value == m3.parameters()[i]->value;
    }
    CHECK(all_equal_77);
    CHECK_FALSE(all_equal_78);
}

TEST_CASE("every parameter receives a gradient after one training step") {
    EncoderRegistry reg = small_registry();
    const ImageTensor img = patterned_image();
    const Eigen::MatrixXd targets = Eigen::MatrixXd::Zero(1, 5);

    auto check_no_orphans = [&](FusionModel& model) {
        const ModelInput in = prepare_input(reg, model.input_spec(), "gradient flow", img);
        model.zero_grads();
        nn::Tape tape;
        NodePtr out = model.forward(tape, {in}, true, nullptr);
        tape.backward(tape.bce_with_logits(out, targets));
        for (const auto& p : model.parameters()) {
            INFO("parameter ", p->name);
            CHECK(p->grad.rows() == p->value.rows());
            CHECK(p->grad.cols() == p->value.cols());
        }
    };

    SUBCASE("two towers") {
        DoubleTowerOptions opt;
        opt.text_encoder = "t";
        opt.image_backbone = "g";
        opt.dropout = 0.0;
        HeadConfig heads = HeadConfig::multitask();
        heads.hidden_dims = {5};
        DoubleTower model(reg, opt, heads, 8);
        check_no_orphans(model);
    }
    SUBCASE("transformer") {
        SingleFlowOptions opt;
        opt.backbones = {"g"};
        opt.width = 8;
        opt.heads = 2;
        opt.ffn = 8;
        opt.dropout = 0.0;
        SingleFlow model(reg, opt, HeadConfig::multitask(), 9);
        check_no_orphans(model);
    }
}

TEST_CASE("training with dropout demands an rng stream") {
    EncoderRegistry reg = small_registry();
    const ImageTensor img = patterned_image();

    DoubleTowerOptions dopt;
    dopt.text_encoder = "t";
    dopt.image_backbone = "g";
    dopt.dropout = 0.2;
    DoubleTower dt(reg, dopt, HeadConfig::multitask(), 1);
    const ModelInput din = prepare_input(reg, dt.input_spec(), "x", img);
    nn::Tape t1;
    CHECK_THROWS_AS(dt.forward(t1, {din}, true, nullptr), ArgumentError);
    nn::Tape t2;
    CHECK_NOTHROW(dt.forward(t2, {din}, false, nullptr)); // eval mode never needs one

    SingleFlowOptions sopt;
    sopt.backbones = {"g"};
    sopt.width = 8;
    sopt.heads = 2;
    sopt.ffn = 8;
    sopt.dropout = 0.1;
    SingleFlow sf(reg, sopt, HeadConfig::multitask(), 1);
    const ModelInput sin = prepare_input(reg, sf.input_spec(), "x", img);
    nn::Tape t3;
    CHECK_THROWS_AS(sf.forward(t3, {sin}, true, nullptr), ArgumentError);
}

TEST_CASE("checkpoint save and load reproduce the model exactly") {
    testutil::TempDir tmp("model_ckpt");
    EncoderRegistry reg = small_registry();
    const ImageTensor img = patterned_image();

    SUBCASE("two towers") {
        DoubleTowerOptions opt;
        opt.text_encoder = "t";
        opt.image_backbone = "g";
        HeadConfig heads = HeadConfig::multitask();
        heads.hidden_dims = {5, 4};
        DoubleTower model(reg, opt, heads, 91);
        const ModelInput in = prepare_input(reg, model.input_spec(), "round trip", img);
        const Eigen::MatrixXd before = model.predict_logits({in});

        model.save(tmp.path());
        auto back = load_model(reg, tmp.path());
        CHECK(back->arch() == Arch::double_tower);
        CHECK(back->heads().names() == model.heads().names());
        CHECK((back->predict_logits({in}) - before).cwiseAbs().maxCoeff() == 0.0);
    }
    SUBCASE("transformer") {
        SingleFlowOptions opt;
        opt.backbones = {"g", "g2"};
        opt.width = 8;
        opt.heads = 2;
        opt.ffn = 12;
        SingleFlow model(reg, opt, HeadConfig::single(Task::misogynous), 92);
        const ModelInput in = prepare_input(reg, model.input_spec(), "round trip", img);
        const Eigen::MatrixXd before = model.predict_logits({in});

        model.save(tmp.path());
        auto back = load_model(reg, tmp.path());
        CHECK(back->arch() == Arch::single_flow);
        CHECK(back->heads().width() == 1);
        CHECK((back->predict_logits({in}) - before).cwiseAbs().maxCoeff() == 0.0);
    }
}

TEST_CASE("weight loading is strict about names, counts and shapes") {
    testutil::TempDir tmp("model_strict");
    EncoderRegistry reg = small_registry();
    DoubleTowerOptions opt;
    opt.text_encoder = "t";
    opt.image_backbone = "g";
    HeadConfig heads = HeadConfig::multitask();
    heads.hidden_dims = {4};
    DoubleTower model(reg, opt, heads, 5);
    model.save(tmp.path());

    SUBCASE("unexpected tensor name") {
        TensorStore store = TensorStore::load(tmp.path());
        store.put("bogus.weight", Eigen::MatrixXd::Zero(1, 1));
        try {
            model.load_weights(store);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("bogus.weight") != std::string::npos);
        }
    }
    SUBCASE("missing tensor") {
        TensorStore partial;
        const auto& params = model.parameters();
        for (size_t i = 0; i + 1 < params.size(); ++i)
            partial.put(params[i]->name, params[i]->value);
        try {
            model.load_weights(partial);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("count") != std::string::npos);
        }
    }
    SUBCASE("wrong shape") {
        TensorStore store = TensorStore::load(tmp.path());
        store.put("fusion.head.bias", Eigen::MatrixXd::Zero(1, 6));
        try {
            model.load_weights(store);
            FAIL("expected DataError");
        } catch (const DataError& e) {
            CHECK(std::string(e.what()).find("fusion.head.bias") != std::string::npos);
            CHECK(std::string(e.what()).find("shape") != std::string::npos);
        }
    }
    SUBCASE("meta without an architecture") {
        TensorStore store = TensorStore::load(tmp.path());
        store.meta().erase("arch");
        testutil::TempDir tmp2("model_noarch");
        store.save(tmp2.path());
        CHECK_THROWS_AS(load_model(reg, tmp2.path()), DataError);
    }
}

TEST_CASE("snapshot and restore round-trip the weights") {
    EncoderRegistry reg = small_registry();
    DoubleTowerOptions opt;
    opt.text_encoder = "t";
    opt.image_backbone = "g";
    DoubleTower model(reg, opt, HeadConfig::multitask(), 13);
    const auto snap = model.snapshot();
    REQUIRE(snap.size() == model.parameters().size());

    model.param("fusion.head.bias")->value.setConstant(3.5);
    CHECK(model.param("fusion.head.bias")->value != snap.back());
    model.restore(snap);
    bool equal = true;
    for (size_t i = 0; i < snap.size(); ++i)
        equal = equal && model.parameters()[i]->value == snap[i];
    CHECK(equal);
    CHECK_THROWS_AS(model.restore(std::vector<Eigen::MatrixXd>(2)), ArgumentError);
}

TEST_CASE("transformer limits sequence length at build and run time") {
    EncoderRegistry reg = small_registry();
    SingleFlowOptions opt;
    opt.backbones = {"g"};
    opt.width = 8;
    opt.heads = 2;
    opt.ffn = 8;
    opt.max_seq = 3; // below the 1 + 2 + 1 minimum
    CHECK_THROWS_AS(SingleFlow(reg, opt, HeadConfig::multitask(), 1), ConfigError);

    opt.max_seq = 4; // exactly [CLS, BOS, EOS, visual]
    SingleFlow tight(reg, opt, HeadConfig::multitask(), 1);
    const ImageTensor img = patterned_image();
    CHECK_NOTHROW(tight.predict_logits({prepare_input(reg, tight.input_spec(), "", img)}));
    const ModelInput too_long = prepare_input(reg, tight.input_spec(), "three words now", img);
    CHECK_THROWS_AS(tight.predict_logits({too_long}), ArgumentError);

    // a sequence longer than the position table is rejected even when
    // max_seq would admit it
    opt.max_seq = 200;
    SingleFlow wide(reg, opt, HeadConfig::multitask(), 1);
    ModelInput crafted = prepare_input(reg, wide.input_spec(), "", img);
    crafted.token_ids.assign(HashTokenizer::kMaxLen + 6, 5);
    CHECK_THROWS_AS(wide.predict_logits({crafted}), ArgumentError);
}

TEST_CASE("model constructors reject malformed geometry") {
    EncoderRegistry reg = small_registry();
    SingleFlowOptions opt;
    opt.backbones = {"g", "g"};
    CHECK_THROWS_AS(SingleFlow(reg, opt, HeadConfig::multitask(), 1), ConfigError);
    opt.backbones = {"g"};
    opt.width = 10;
    opt.heads = 4; // 10 % 4 != 0
    CHECK_THROWS_AS(SingleFlow(reg, opt, HeadConfig::multitask(), 1), ConfigError);
    opt.width = 8;
    opt.heads = 2;
    opt.dropout = 1.0;
    CHECK_THROWS_AS(SingleFlow(reg, opt, HeadConfig::multitask(), 1), ConfigError);
    opt.dropout = 0.1;
    opt.backbones = {};
    CHECK_THROWS_AS(SingleFlow(reg, opt, HeadConfig::multitask(), 1), ConfigError);

    DoubleTowerOptions dopt;
    dopt.text_encoder = "t";
    dopt.image_backbone = "g";
    dopt.dropout = -0.5;
    CHECK_THROWS_AS(DoubleTower(reg, dopt, HeadConfig::multitask(), 1), ConfigError);
    dopt.dropout = 0.2;
    dopt.image_backbone = "missing";
    CHECK_THROWS_AS(DoubleTower(reg, dopt, HeadConfig::multitask(), 1), ConfigError);
}

TEST_CASE("forward validates its inputs") {
    EncoderRegistry reg = small_registry();
    DoubleTowerOptions opt;
    opt.text_encoder = "t";
    opt.image_backbone = "g";
    DoubleTower model(reg, opt, HeadConfig::multitask(), 1);
    CHECK_THROWS_AS(model.predict_logits({}), ArgumentError);

    ModelInput missing_image;
    missing_image.token_ids = HashTokenizer().tokenize("words");
    try {
        model.predict_logits({missing_image});
        FAIL("expected ArgumentError");
    } catch (const ArgumentError& e) {
        CHECK(std::string(e.what()).find("missing image data") != std::string::npos);
    }
    CHECK_THROWS_AS(model.param("no.such.parameter"), ArgumentError);
}

} // TEST_SUITE
