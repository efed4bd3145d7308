// Batch CLI for the meme-classification pipeline. Every subcommand is a thin
// wrapper over the C API: options become config keys, the command runs, and
// the process exits with the library's status code.

#include <cstdio>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "memeclf.h"

namespace {

struct ConfigDeleter {
    void operator()(memeclf_config* cfg) const { memeclf_config_destroy(cfg); }
};
using ConfigHandle = std::unique_ptr<memeclf_config, ConfigDeleter>;

struct CommonArgs {
    std::vector<std::string> config_files;
    std::vector<std::string> overrides; // key=value
    std::string out_dir;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("-c,--config", args.config_files,
                    "Config file (key = value lines, or a manifest.json); repeatable");
    cmd->add_option("-s,--set", args.overrides, "Override one key, as key=value; repeatable");
    cmd->add_option("-o,--out", args.out_dir, "Output directory for this command's artifacts");
}

// Binds an option so that, when given on the command line, it lands in the
// override list as key=value (after any --set, so flags win).
void bind_key(CLI::App* cmd, CommonArgs& args, const std::string& flag, const std::string& key,
              const std::string& help) {
    cmd->add_option_function<std::string>(
        flag, [&args, key](const std::string& v) { args.overrides.push_back(key + "=" + v); },
        help);
}

int run(const std::string& command, const CommonArgs& args) {
    ConfigHandle cfg(memeclf_config_create());
    if (!cfg) {
        std::fprintf(stderr, "error: out of memory\n");
        return MEMECLF_E_INTERNAL;
    }
    for (const auto& file : args.config_files) {
        if (int rc = memeclf_config_load_file(cfg.get(), file.c_str()); rc != MEMECLF_OK) {
            std::fprintf(stderr, "error: %s\n", memeclf_last_error());
            return rc;
        }
    }
    for (const auto& kv : args.overrides) {
        const size_t eq = kv.find('=');
        if (eq == std::string::npos) {
            std::fprintf(stderr, "error: --set expects key=value, got '%s'\n", kv.c_str());
            return MEMECLF_E_CONFIG;
        }
        if (int rc = memeclf_config_set(cfg.get(), kv.substr(0, eq).c_str(),
                                        kv.substr(eq + 1).c_str());
            rc != MEMECLF_OK) {
            std::fprintf(stderr, "error: %s\n", memeclf_last_error());
            return rc;
        }
    }
    const int rc = memeclf_run(command.c_str(), cfg.get(),
                               args.out_dir.empty() ? nullptr : args.out_dir.c_str());
    if (rc != MEMECLF_OK) std::fprintf(stderr, "error: %s\n", memeclf_last_error());
    return rc;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multimodal multi-task meme classification pipeline"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(memeclf_version()));

    std::string picked;
    CommonArgs args;

    auto* split = app.add_subcommand("split", "Write a stratified k-fold plan for a corpus");
    add_common(split, args);
    bind_key(split, args, "--data", "data.train", "Labeled corpus TSV");
    bind_key(split, args, "--k", "split.k", "Number of folds");
    bind_key(split, args, "--seed", "split.seed", "Fold-assignment seed");

    auto* train = app.add_subcommand("train", "Train one stage of one architecture");
    add_common(train, args);
    bind_key(train, args, "--data", "data.train", "Labeled corpus TSV");
    bind_key(train, args, "--test", "data.test", "Test corpus TSV (optional)");
    bind_key(train, args, "--external", "data.external", "External all-negative TSV (stage 2)");
    bind_key(train, args, "--plan", "split.plan", "Fold plan TSV from `split`");
    bind_key(train, args, "--stage", "train.stage", "Training stage: 1 or 2");
    bind_key(train, args, "--arch", "train.arch", "double_tower or single_flow");

    auto* predict = app.add_subcommand("predict", "Predict a corpus with a saved model");
    add_common(predict, args);
    bind_key(predict, args, "--model", "predict.model", "Model checkpoint directory");
    bind_key(predict, args, "--input", "predict.input", "Corpus TSV to predict");
    bind_key(predict, args, "--mode", "predict.mode", "checkpoint (default) or prior");

    auto* ens = app.add_subcommand("ensemble", "Weighted average of two prediction files");
    add_common(ens, args);
    bind_key(ens, args, "--y1", "ensemble.y1", "First prediction TSV (weight alpha)");
    bind_key(ens, args, "--y2", "ensemble.y2", "Second prediction TSV (weight 1-alpha)");
    bind_key(ens, args, "--alpha", "ensemble.alpha", "Mixing weight, default 0.1");

    auto* post = app.add_subcommand("postprocess",
                                    "Hierarchy correction + submission files");
    add_common(post, args);
    bind_key(post, args, "--subtask-b", "post.subtask_b", "Five-column prediction TSV");
    bind_key(post, args, "--misogyny", "post.misogyny", "Single-column misogyny TSV");
    bind_key(post, args, "--threshold", "post.threshold", "Binarization threshold, default 0.5");

    auto* eval = app.add_subcommand("evaluate", "Score predictions against gold labels");
    add_common(eval, args);
    bind_key(eval, args, "--pred", "eval.pred", "Prediction TSV to score");
    bind_key(eval, args, "--gold", "eval.gold", "Labeled gold corpus TSV");
    bind_key(eval, args, "--table", "eval.table",
             "Comma list of name=prediction.tsv rows for a combined results table");

    auto* synth = app.add_subcommand("synthesize-corpus",
                                     "Generate a labeled synthetic corpus");
    add_common(synth, args);
    bind_key(synth, args, "--count", "synth.count", "Number of samples, default 2000");
    bind_key(synth, args, "--seed", "synth.seed", "Generator seed, default 7");
    bind_key(synth, args, "--images", "synth.images", "Write PNG files: true/false");

    for (auto* cmd : {split, train, predict, ens, post, eval, synth})
        cmd->callback([&picked, cmd] { picked = cmd->get_name(); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return MEMECLF_E_CONFIG;
    }
    return run(picked, args);
}
