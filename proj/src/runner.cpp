#include "memeclf/runner.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "memeclf/errors.hpp"
#include "memeclf/folds.hpp"
#include "memeclf/metrics.hpp"
#include "memeclf/predictions.hpp"
#include "memeclf/synth.hpp"

namespace memeclf {

namespace fs = std::filesystem;
using nlohmann::json;

const char* version_string() { return "0.1.0"; }

fs::path resolve_out_dir(const std::string& command, const Config& cfg) {
    if (cfg.has("run.out")) return fs::path(cfg.get_string("run.out"));
    const char* root = std::getenv("MEMECLF_RUN_ROOT");
    return fs::path(root && *root ? root : "runs") / command;
}

namespace {

void echo_default(Config& cfg, const std::string& key, const std::string& value) {
    if (!cfg.has(key)) cfg.set(key, value);
}

std::string file_hash_hex(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open file for hashing: " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string bytes = buf.str();
    std::ostringstream out;
    out << "0x" << std::hex << fnv1a64(bytes);
    return out.str();
}

void write_text_file(const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write file: " + path.string());
    out << text;
}

// Manifests are written twice: status=running before the work so a crashed
// run is recognizable, status=complete with outputs and log afterwards.
struct Manifest {
    json doc;
    fs::path path;

    Manifest(const std::string& command, const Config& cfg, const fs::path& out_dir)
        : path(out_dir / "manifest.json") {
        fs::create_directories(out_dir);
        doc["format_version"] = 1;
        doc["command"] = command;
        doc["config"] = cfg.to_json();
        doc["inputs"] = json::object();
        doc["outputs"] = json::array();
        doc["log"] = json::object();
        doc["status"] = "running";
        flush();
    }

    void complete() {
        doc["status"] = "complete";
        flush();
    }

    void flush() const { write_text_file(path, doc.dump(2) + "\n"); }
};

std::vector<int> parse_hidden_dims(const Config& cfg) {
    std::vector<int> dims;
    for (const auto& item : cfg.get_list("train.hidden_dims")) {
        try {
            size_t used = 0;
            dims.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw ConfigError("train.hidden_dims entries must be integers, got '" + item + "'");
        }
    }
    return dims;
}

void apply_train_defaults(Config& cfg) {
    echo_default(cfg, "train.stage", "1");
    echo_default(cfg, "train.arch", "double_tower");
    echo_default(cfg, "train.epochs", "10");
    echo_default(cfg, "train.batch_size", "64");
    echo_default(cfg, "train.warmup_fraction", "0.10");
    echo_default(cfg, "train.early_stop_patience", "3");
    echo_default(cfg, "train.seed", "42");
    echo_default(cfg, "train.weight_decay", "0.01");
    echo_default(cfg, "train.clip_norm", "1.0");
    echo_default(cfg, "train.tta", "true");
    echo_default(cfg, "train.tta_crop", "224");
    echo_default(cfg, "train.augment", "true");
    echo_default(cfg, "train.flatten_subtask_b", "false");
    echo_default(cfg, "train.hidden_dims", "256,64");
    echo_default(cfg, "model.dt.text_encoder", "toy_text");
    echo_default(cfg, "model.dt.image_backbone", "toy_image");
    echo_default(cfg, "model.dt.dropout", "0.2");
    echo_default(cfg, "model.dt.lr_text", "5e-5");
    echo_default(cfg, "model.dt.lr_image", "1e-4");
    echo_default(cfg, "model.dt.lr_fusion", "1e-3");
    echo_default(cfg, "model.sf.backbones", "toy_image");
    echo_default(cfg, "model.sf.layers", "2");
    echo_default(cfg, "model.sf.heads", "4");
    echo_default(cfg, "model.sf.width", "128");
    echo_default(cfg, "model.sf.ffn", "256");
    echo_default(cfg, "model.sf.max_seq",
                 std::to_string(1 + HashTokenizer::kMaxLen + 8));
    echo_default(cfg, "model.sf.dropout", "0.1");
    echo_default(cfg, "model.sf.train_backbones", "false");
    echo_default(cfg, "model.sf.lr", "5e-5");
}

TrainingConfig training_config_from(const Config& cfg) {
    TrainingConfig tc;
    tc.epochs = static_cast<int>(cfg.get_int("train.epochs"));
    tc.batch_size = static_cast<int>(cfg.get_int("train.batch_size"));
    tc.warmup_fraction = cfg.get_double("train.warmup_fraction");
    tc.early_stop_patience = static_cast<int>(cfg.get_int("train.early_stop_patience"));
    tc.seed = cfg.get_uint("train.seed", 42);
    tc.weight_decay = cfg.get_double("train.weight_decay");
    tc.clip_norm = cfg.get_double("train.clip_norm");
    tc.tta = cfg.get_bool("train.tta");
    tc.tta_crop = static_cast<int>(cfg.get_int("train.tta_crop"));
    tc.augment = cfg.get_bool("train.augment");
    tc.flatten_subtask_b = cfg.get_bool("train.flatten_subtask_b");
    return tc;
}

DoubleTowerOptions dt_options_from(const Config& cfg) {
    DoubleTowerOptions o;
    o.text_encoder = cfg.get_string("model.dt.text_encoder");
    o.image_backbone = cfg.get_string("model.dt.image_backbone");
    o.dropout = cfg.get_double("model.dt.dropout");
    o.lr_text = cfg.get_double("model.dt.lr_text");
    o.lr_image = cfg.get_double("model.dt.lr_image");
    o.lr_fusion = cfg.get_double("model.dt.lr_fusion");
    return o;
}

SingleFlowOptions sf_options_from(const Config& cfg) {
    SingleFlowOptions o;
    o.backbones = cfg.get_list("model.sf.backbones");
    o.layers = static_cast<int>(cfg.get_int("model.sf.layers"));
    o.heads = static_cast<int>(cfg.get_int("model.sf.heads"));
    o.width = static_cast<int>(cfg.get_int("model.sf.width"));
    o.ffn = static_cast<int>(cfg.get_int("model.sf.ffn"));
    o.max_seq = static_cast<int>(cfg.get_int("model.sf.max_seq"));
    o.dropout = cfg.get_double("model.sf.dropout");
    o.train_backbones = cfg.get_bool("model.sf.train_backbones");
    o.lr = cfg.get_double("model.sf.lr");
    return o;
}

bool is_pretrained_id(const std::string& id) {
    for (const auto& p : pretrained_backbone_ids())
        if (p == id) return true;
    return false;
}

} // namespace

EncoderRegistry build_encoder_registry(const Config& cfg,
                                       const std::vector<std::string>& text_ids,
                                       const std::vector<std::string>& image_ids) {
    EncoderRegistry reg;
    for (const auto& id : text_ids) {
        if (reg.has_text(id)) continue;
        const std::string ck_key = "encoder." + id + ".checkpoint";
        const std::string kind = cfg.get_string("encoder." + id + ".kind",
                                                id == "toy_text" ? "toy" : "");
        if (cfg.has(ck_key)) {
            reg.add_text(std::make_shared<TextTableEncoder>(
                TextTableEncoder::from_checkpoint(id, cfg.get_string(ck_key))));
        } else if (kind == "toy") {
            const int dim = static_cast<int>(cfg.get_int("encoder." + id + ".dim", 64));
            const uint64_t seed = cfg.get_uint("encoder." + id + ".seed", 1);
            reg.add_text(std::make_shared<TextTableEncoder>(TextTableEncoder::toy(id, dim, seed)));
        } else {
            throw ConfigError("text encoder '" + id + "' is not configured: set encoder." + id +
                              ".kind=toy or encoder." + id + ".checkpoint");
        }
    }
    for (const auto& id : image_ids) {
        if (reg.has_image(id)) continue;
        const std::string ck_key = "encoder." + id + ".checkpoint";
        if (is_pretrained_id(id)) {
            if (!cfg.has(ck_key))
                throw ConfigError("backbone '" + id + "' names a pretrained model and requires " +
                                  ck_key + " (no seeded stand-in exists for it)");
            reg.add_image(std::make_shared<GridImageEncoder>(
                GridImageEncoder::from_checkpoint(id, cfg.get_string(ck_key))));
            continue;
        }
        const std::string kind = cfg.get_string("encoder." + id + ".kind",
                                                id == "toy_image" ? "toy" : "");
        if (cfg.has(ck_key)) {
            reg.add_image(std::make_shared<GridImageEncoder>(
                GridImageEncoder::from_checkpoint(id, cfg.get_string(ck_key))));
        } else if (kind == "toy") {
            const int dim = static_cast<int>(cfg.get_int("encoder." + id + ".dim", 64));
            const uint64_t seed = cfg.get_uint("encoder." + id + ".seed", 2);
            const int grid = static_cast<int>(cfg.get_int("encoder." + id + ".grid", 8));
            reg.add_image(
                std::make_shared<GridImageEncoder>(GridImageEncoder::toy(id, dim, seed, grid)));
        } else {
            throw ConfigError("image backbone '" + id + "' is not configured: set encoder." + id +
                              ".kind=toy or encoder." + id + ".checkpoint");
        }
    }
    return reg;
}

void cmd_split(Config cfg, const fs::path& out_dir) {
    echo_default(cfg, "split.k", "5");
    echo_default(cfg, "split.seed", "42");
    const std::string train_path = cfg.get_string("data.train");
    const int k = static_cast<int>(cfg.get_int("split.k"));
    const uint64_t seed = cfg.get_uint("split.seed", 42);

    Manifest manifest("split", cfg, out_dir);
    LoadReport report;
    const Dataset ds = load_main_corpus(train_path, true, &report);
    const FoldPlan plan = stratified_kfold(ds, k, seed);
    const FoldBalanceReport balance = fold_balance_report(plan, ds);

    save_fold_plan(plan, ds, (out_dir / "folds.tsv").string());
    write_text_file(out_dir / "fold_balance.tsv", balance.to_tsv());

    manifest.doc["inputs"] = {{"train_rows", ds.size()},
                              {"corpus_hash", file_hash_hex(train_path)}};
    manifest.doc["log"] = {{"warnings", report.warnings},
                           {"max_abs_deviation", balance.max_abs_deviation}};
    manifest.doc["outputs"] = {"folds.tsv", "fold_balance.tsv"};
    manifest.complete();
}

void cmd_train(Config cfg, const fs::path& out_dir) {
    apply_train_defaults(cfg);
    const int stage = static_cast<int>(cfg.get_int("train.stage"));
    if (stage != 1 && stage != 2)
        throw ConfigError("train.stage must be 1 or 2, got " + cfg.get_string("train.stage"));
    const Arch arch = parse_arch(cfg.get_string("train.arch"));
    const std::string train_path = cfg.get_string("data.train");
    const std::string plan_path = cfg.get_string("split.plan");
    if (stage == 2 && !cfg.has("data.external"))
        throw ConfigError("stage 2 requires external data: missing config key data.external");

    TrainerOptions opt;
    opt.train = training_config_from(cfg);
    opt.arch = arch;
    opt.dt = dt_options_from(cfg);
    opt.sf = sf_options_from(cfg);
    opt.hidden_dims = parse_hidden_dims(cfg);
    opt.run_dir = out_dir;

    std::vector<std::string> text_ids, image_ids;
    if (arch == Arch::double_tower) {
        text_ids.push_back(opt.dt.text_encoder);
        image_ids.push_back(opt.dt.image_backbone);
    } else {
        image_ids = opt.sf.backbones;
    }
    const EncoderRegistry reg = build_encoder_registry(cfg, text_ids, image_ids);
    opt.registry = &reg;

    Manifest manifest("train", cfg, out_dir);
    LoadReport report;
    const Dataset train = load_main_corpus(train_path, true, &report);
    const FoldPlan plan = load_fold_plan(plan_path);
    opt.train.k_folds = plan.k;

    Dataset test;
    if (cfg.has("data.test")) test = load_main_corpus(cfg.get_string("data.test"), false);

    manifest.doc["inputs"] = {{"train_rows", train.size()},
                              {"test_rows", test.size()},
                              {"corpus_hash", file_hash_hex(train_path)},
                              {"fold_plan_hash", file_hash_hex(plan_path)}};
    manifest.flush();

    StageResult result;
    if (stage == 1) {
        result = train_stage1(train, test, plan, opt);
    } else {
        LoadReport ext_report;
        const Dataset external = load_external_negatives(
            cfg.get_string("data.external"),
            cfg.get_list("external.accept", default_accepted_offense_levels()), &ext_report);
        manifest.doc["inputs"]["external_rows"] = external.size();
        manifest.doc["inputs"]["external_dropped"] = ext_report.dropped;
        result = train_stage2(train, external, test, plan, opt);
    }

    const std::string prefix = "stage" + std::to_string(stage);
    std::vector<std::string> outputs;
    save_predictions(result.oof, (out_dir / (prefix + "_oof.tsv")).string());
    outputs.push_back(prefix + "_oof.tsv");
    if (test.size() > 0) {
        save_predictions(result.test, (out_dir / (prefix + "_test.tsv")).string());
        outputs.push_back(prefix + "_test.tsv");
    }
    for (int f = 0; f < plan.k; ++f) outputs.push_back("fold" + std::to_string(f) + "/");

    manifest.doc["log"] = result.log;
    manifest.doc["log"]["warnings"] = report.warnings;
    manifest.doc["outputs"] = outputs;
    manifest.complete();
}

void cmd_predict(Config cfg, const fs::path& out_dir) {
    echo_default(cfg, "predict.mode", "checkpoint");
    echo_default(cfg, "predict.tta", "false");
    echo_default(cfg, "predict.tta_crop", "224");
    echo_default(cfg, "predict.batch_size", "64");
    echo_default(cfg, "predict.flattened", "false");
    const std::string mode = cfg.get_string("predict.mode");
    const std::string input_path = cfg.get_string("predict.input");

    Manifest manifest("predict", cfg, out_dir);
    const Dataset input = load_main_corpus(input_path, false);
    PredictionMatrix preds;

    if (mode == "prior") {
        // Constant predictor: every row gets the training-set positive rates.
        // Serves as the no-model reference row in results tables.
        const Dataset train = load_main_corpus(cfg.get_string("data.train"), true);
        const auto rates = label_prevalence(train);
        preds.tasks = std::vector<std::string>(task_names().begin(), task_names().end());
        for (const auto& s : input.samples) {
            preds.ids.push_back(s.id);
            preds.values.emplace_back(rates.begin(), rates.end());
        }
        preds.sort_by_id();
        preds.validate();
        manifest.doc["log"]["prior"] = std::vector<double>(rates.begin(), rates.end());
    } else if (mode == "checkpoint") {
        const std::string model_dir = cfg.get_string("predict.model");
        const TensorStore store = TensorStore::load(model_dir);
        const json& meta = store.meta();

        std::vector<std::string> text_ids, image_ids;
        if (meta.value("arch", "") == arch_name(Arch::double_tower)) {
            text_ids.push_back(meta.value("text_encoder", "toy_text"));
            image_ids.push_back(meta.value("image_backbone", "toy_image"));
        } else {
            image_ids = meta.value("backbones", std::vector<std::string>{"toy_image"});
        }
        const EncoderRegistry reg = build_encoder_registry(cfg, text_ids, image_ids);
        auto model = load_model(reg, model_dir);
        preds = predict_dataset(*model, input, reg, cfg.get_bool("predict.tta"),
                                static_cast<int>(cfg.get_int("predict.tta_crop")),
                                static_cast<int>(cfg.get_int("predict.batch_size")),
                                cfg.get_bool("predict.flattened"));
    } else {
        throw ConfigError("predict.mode must be checkpoint or prior, got '" + mode + "'");
    }

    save_predictions(preds, (out_dir / "predictions.tsv").string());
    manifest.doc["inputs"] = {{"rows", input.size()}, {"input_hash", file_hash_hex(input_path)}};
    manifest.doc["outputs"] = {"predictions.tsv"};
    manifest.complete();
}

void cmd_ensemble(Config cfg, const fs::path& out_dir) {
    echo_default(cfg, "ensemble.alpha", "0.1");
    const std::string y1_path = cfg.get_string("ensemble.y1");
    const std::string y2_path = cfg.get_string("ensemble.y2");
    const double alpha = cfg.get_double("ensemble.alpha");

    Manifest manifest("ensemble", cfg, out_dir);
    const PredictionMatrix y1 = load_predictions(y1_path);
    const PredictionMatrix y2 = load_predictions(y2_path);
    const PredictionMatrix combined = ensemble(y1, y2, alpha);
    save_predictions(combined, (out_dir / "ensembled.tsv").string());

    manifest.doc["inputs"] = {{"y1_hash", file_hash_hex(y1_path)},
                              {"y2_hash", file_hash_hex(y2_path)},
                              {"rows", combined.rows()}};
    manifest.doc["log"]["alpha"] = alpha;
    manifest.doc["outputs"] = {"ensembled.tsv"};
    manifest.complete();
}

void cmd_postprocess(Config cfg, const fs::path& out_dir) {
    echo_default(cfg, "post.threshold", "0.5");
    echo_default(cfg, "post.replace_misogynous", "true");
    const std::string b_path = cfg.get_string("post.subtask_b");
    const std::string mis_path = cfg.get_string("post.misogyny");
    const double threshold = cfg.get_double("post.threshold");
    const bool replace = cfg.get_bool("post.replace_misogynous");

    Manifest manifest("postprocess", cfg, out_dir);
    const PredictionMatrix subtask_b = load_predictions(b_path);
    const PredictionMatrix misogyny = load_predictions(mis_path);
    const PredictionMatrix corrected =
        hierarchy_postprocess(subtask_b, misogyny, threshold, replace);

    save_predictions(corrected, (out_dir / "postprocessed.tsv").string());
    // Sub-task A submission substitutes the single-task misogyny prediction;
    // Sub-task B ships the corrected five-column matrix.
    save_submission(binarize(misogyny, threshold), (out_dir / "submission_a.tsv").string());
    save_submission(binarize(corrected, threshold), (out_dir / "submission_b.tsv").string());

    manifest.doc["inputs"] = {{"subtask_b_hash", file_hash_hex(b_path)},
                              {"misogyny_hash", file_hash_hex(mis_path)},
                              {"rows", corrected.rows()}};
    manifest.doc["outputs"] = {"postprocessed.tsv", "submission_a.tsv", "submission_b.tsv"};
    manifest.complete();
}

namespace {

struct EvalScores {
    std::optional<double> sub_task_a; // binary macro-F1 on the misogynous column
    std::optional<double> sub_task_b; // support-weighted multilabel F1
    std::optional<MultilabelF1> detail;
};

EvalScores score_predictions(const PredictionMatrix& pred, const Dataset& gold,
                             double threshold) {
    std::map<std::string, const LabelVector*> gold_by_id;
    for (const auto& s : gold.samples) {
        if (!s.labels) throw DataError("gold corpus has unlabeled row: " + s.id);
        gold_by_id[s.id] = &*s.labels;
    }
    if (pred.rows() != gold.size()) {
        throw AlignmentError("prediction rows (" + std::to_string(pred.rows()) +
                             ") do not match gold rows (" + std::to_string(gold.size()) + ")");
    }
    for (const auto& id : pred.ids)
        if (!gold_by_id.count(id))
            throw AlignmentError("prediction id not present in gold corpus: '" + id + "'");

    int mis_col = -1;
    for (size_t c = 0; c < pred.tasks.size(); ++c)
        if (pred.tasks[c] == task_name(Task::misogynous)) mis_col = static_cast<int>(c);

    EvalScores scores;
    if (mis_col >= 0) {
        std::vector<int> p, g;
        for (size_t i = 0; i < pred.rows(); ++i) {
            p.push_back(pred.values[i][static_cast<size_t>(mis_col)] >= threshold ? 1 : 0);
            g.push_back((*gold_by_id.at(pred.ids[i]))[Task::misogynous]);
        }
        scores.sub_task_a = macro_f1_binary_task(p, g);
    }
    if (pred.cols() == static_cast<size_t>(kNumTasks)) {
        std::vector<std::array<int, kNumTasks>> p(pred.rows()), g(pred.rows());
        for (size_t i = 0; i < pred.rows(); ++i) {
            const LabelVector& lv = *gold_by_id.at(pred.ids[i]);
            for (int t = 0; t < kNumTasks; ++t) {
                p[i][t] = pred.values[i][static_cast<size_t>(t)] >= threshold ? 1 : 0;
                g[i][t] = lv.bits[t];
            }
        }
        const MultilabelF1 f1 = multilabel_f1(p, g);
        scores.sub_task_b = f1.weighted;
        scores.detail = f1;
    }
    return scores;
}

std::string format_score(const std::optional<double>& v) {
    if (!v) return "-";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", *v);
    return buf;
}

} // namespace

void cmd_evaluate(Config cfg, const fs::path& out_dir) {
    echo_default(cfg, "eval.threshold", "0.5");
    echo_default(cfg, "eval.method", "model");
    const std::string gold_path = cfg.get_string("eval.gold");
    const double threshold = cfg.get_double("eval.threshold");

    Manifest manifest("evaluate", cfg, out_dir);
    const Dataset gold = load_main_corpus(gold_path, true);

    std::vector<ResultEntry> entries;
    json log = json::object();

    if (cfg.has("eval.table")) {
        // name=path per item, evaluated in the order given.
        for (const auto& item : cfg.get_list("eval.table")) {
            const size_t eq = item.find('=');
            if (eq == std::string::npos)
                throw ConfigError("eval.table items must be name=path, got '" + item + "'");
            const std::string name = item.substr(0, eq);
            const PredictionMatrix pred = load_predictions(item.substr(eq + 1));
            const EvalScores s = score_predictions(pred, gold, threshold);
            entries.push_back({name, s.sub_task_a, s.sub_task_b});
        }
    } else {
        const std::string pred_path = cfg.get_string("eval.pred");
        const PredictionMatrix pred = load_predictions(pred_path);
        const EvalScores s = score_predictions(pred, gold, threshold);
        entries.push_back({cfg.get_string("eval.method"), s.sub_task_a, s.sub_task_b});
        manifest.doc["inputs"]["pred_hash"] = file_hash_hex(pred_path);

        std::ostringstream report_txt, report_tsv;
        report_txt << "method: " << entries[0].method << "\n";
        report_txt << "sub_task_a_macro_f1: " << format_score(s.sub_task_a) << "\n";
        report_txt << "sub_task_b_weighted_f1: " << format_score(s.sub_task_b) << "\n";
        report_tsv << "metric\tvalue\n";
        report_tsv << "sub_task_a_macro_f1\t" << format_score(s.sub_task_a) << "\n";
        report_tsv << "sub_task_b_weighted_f1\t" << format_score(s.sub_task_b) << "\n";
        if (s.detail) {
            report_txt << "sub_task_b_macro_f1: " << format_score(s.detail->macro) << "\n";
            report_tsv << "sub_task_b_macro_f1\t" << format_score(s.detail->macro) << "\n";
            for (int t = 0; t < kNumTasks; ++t) {
                report_txt << "f1[" << task_names()[static_cast<size_t>(t)]
                           << "]: " << format_score(s.detail->per_label[static_cast<size_t>(t)])
                           << " (support " << s.detail->support[static_cast<size_t>(t)] << ")\n";
                report_tsv << "f1." << task_names()[static_cast<size_t>(t)] << "\t"
                           << format_score(s.detail->per_label[static_cast<size_t>(t)]) << "\n";
            }
            log["sub_task_b_macro_f1"] = s.detail->macro;
        }
        write_text_file(out_dir / "report.txt", report_txt.str());
        write_text_file(out_dir / "report.tsv", report_tsv.str());
        manifest.doc["outputs"].push_back("report.txt");
        manifest.doc["outputs"].push_back("report.tsv");
        if (s.sub_task_a) log["sub_task_a_macro_f1"] = *s.sub_task_a;
        if (s.sub_task_b) log["sub_task_b_weighted_f1"] = *s.sub_task_b;
    }

    if (!entries.empty() && cfg.has("eval.table")) {
        const ResultsTable table = results_table(entries);
        write_text_file(out_dir / "results.txt", table.text);
        write_text_file(out_dir / "results.tsv", table.tsv);
        manifest.doc["outputs"].push_back("results.txt");
        manifest.doc["outputs"].push_back("results.tsv");
        for (const auto& e : entries) {
            json row = {{"method", e.method}};
            if (e.sub_task_a) row["sub_task_a"] = *e.sub_task_a;
            if (e.sub_task_b) row["sub_task_b"] = *e.sub_task_b;
            log["table"].push_back(row);
        }
    }

    manifest.doc["inputs"]["gold_hash"] = file_hash_hex(gold_path);
    manifest.doc["inputs"]["gold_rows"] = gold.size();
    manifest.doc["log"] = log;
    manifest.complete();
}

void cmd_synthesize(Config cfg, const fs::path& out_dir) {
    echo_default(cfg, "synth.count", "2000");
    echo_default(cfg, "synth.seed", "7");
    echo_default(cfg, "synth.images", "true");
    echo_default(cfg, "synth.image_side", "256");
    echo_default(cfg, "synth.id_prefix", "meme_");

    SynthSpec spec;
    spec.count = static_cast<int>(cfg.get_int("synth.count"));
    spec.seed = cfg.get_uint("synth.seed", 7);
    spec.images = cfg.get_bool("synth.images");
    spec.image_side = static_cast<int>(cfg.get_int("synth.image_side"));
    spec.id_prefix = cfg.get_string("synth.id_prefix");

    Manifest manifest("synthesize-corpus", cfg, out_dir);
    const Dataset ds = synthesize_corpus(spec, out_dir);
    const auto rates = label_prevalence(ds);

    manifest.doc["log"]["rows"] = ds.size();
    manifest.doc["log"]["positive_rates"] = std::vector<double>(rates.begin(), rates.end());
    manifest.doc["outputs"] = {"corpus.tsv"};
    manifest.complete();
}

int run_command(const std::string& command, Config cfg, std::string* error_message) {
    try {
        const fs::path out_dir = resolve_out_dir(command, cfg);
        if (command == "split")
            cmd_split(std::move(cfg), out_dir);
        else if (command == "train")
            cmd_train(std::move(cfg), out_dir);
        else if (command == "predict")
            cmd_predict(std::move(cfg), out_dir);
        else if (command == "ensemble")
            cmd_ensemble(std::move(cfg), out_dir);
        else if (command == "postprocess")
            cmd_postprocess(std::move(cfg), out_dir);
        else if (command == "evaluate")
            cmd_evaluate(std::move(cfg), out_dir);
        else if (command == "synthesize-corpus")
            cmd_synthesize(std::move(cfg), out_dir);
        else
            throw ConfigError("unknown command: " + command);
        return 0;
    } catch (const Error& e) {
        if (error_message) *error_message = e.what();
        return static_cast<int>(e.code());
    } catch (const std::exception& e) {
        if (error_message) *error_message = std::string("internal error: ") + e.what();
        return static_cast<int>(ErrorCode::internal);
    }
}

} // namespace memeclf
