#ifndef MEMECLF_RUNNER_HPP
#define MEMECLF_RUNNER_HPP

#include <filesystem>
#include <string>
#include <vector>

#include "memeclf/config.hpp"
#include "memeclf/encoders.hpp"
#include "memeclf/training.hpp"

namespace memeclf {

// Output directory for a command: run.out if set, else
// $MEMECLF_RUN_ROOT/<command>, else runs/<command>.
std::filesystem::path resolve_out_dir(const std::string& command, const Config& cfg);

// Builds every encoder the run needs. Toy encoders come from seeded streams;
// ids naming large pretrained backbones must supply
// encoder.<id>.checkpoint — there is no seeded stand-in for those.
EncoderRegistry build_encoder_registry(const Config& cfg,
                                       const std::vector<std::string>& text_ids,
                                       const std::vector<std::string>& image_ids);

// Individual commands. Each fills in its defaults (echoed to the manifest),
// writes its artifacts into out_dir, and writes manifest.json with
// status=running before the work and status=complete after. All throw
// memeclf::Error subclasses on failure.
void cmd_split(Config cfg, const std::filesystem::path& out_dir);
void cmd_train(Config cfg, const std::filesystem::path& out_dir);
void cmd_predict(Config cfg, const std::filesystem::path& out_dir);
void cmd_ensemble(Config cfg, const std::filesystem::path& out_dir);
void cmd_postprocess(Config cfg, const std::filesystem::path& out_dir);
void cmd_evaluate(Config cfg, const std::filesystem::path& out_dir);
void cmd_synthesize(Config cfg, const std::filesystem::path& out_dir);

// Dispatch by command name; returns a process exit code (0 ok, 1 internal,
// 2 config, 3 data, 4 alignment) and writes errors to the string out-param.
int run_command(const std::string& command, Config cfg, std::string* error_message);

const char* version_string();

} // namespace memeclf

#endif
