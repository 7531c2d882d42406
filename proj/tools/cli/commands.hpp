#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pris::cli {

struct TrainArgs {
    std::filesystem::path config;
    bool dump_config = false;
};

struct EmbedArgs {
    std::filesystem::path model;
    std::filesystem::path host;
    std::filesystem::path secret;
    std::filesystem::path out;
    std::optional<std::string> attack;  // selects {base}.{attack}.ckpt (levels 1-2)
};

struct ExtractArgs {
    std::filesystem::path model;
    std::filesystem::path container;
    std::filesystem::path out;
    std::optional<std::string> attack;  // per-attack enhancers (level 3) or model (levels 1-2)
    std::optional<std::uint64_t> z_seed;
};

struct EvalArgs {
    std::filesystem::path model;
    std::filesystem::path data;
    int level = 4;
    std::string attacks;
    std::filesystem::path out;
    int crop_size = 64;
    std::optional<std::uint64_t> seed;
    std::size_t max_images = 0;
};

struct BitpackArgs {
    std::filesystem::path host;
    std::filesystem::path secret;
    std::filesystem::path out_dir;
};

struct SynthArgs {
    std::filesystem::path out_dir;
    std::size_t count = 8;
    int size = 96;
    std::uint64_t seed = 7;
};

// Each command throws pris::Error subclasses on failure; run() maps them to
// exit codes.
void cmd_train(const TrainArgs& args);
void cmd_embed(const EmbedArgs& args);
void cmd_extract(const ExtractArgs& args);
void cmd_eval(const EvalArgs& args);
void cmd_bitpack_demo(const BitpackArgs& args);
void cmd_synth(const SynthArgs& args);

/// {base}.{attack}.ckpt next to `model` (base = model path without .ckpt).
std::filesystem::path per_attack_checkpoint(const std::filesystem::path& model, const std::string& attack);

/// Paths the eval command writes for `out`: (json, text).
std::pair<std::filesystem::path, std::filesystem::path> report_paths(const std::filesystem::path& out);

/// Value of PRIS_SEED, if set and numeric.
std::optional<std::uint64_t> env_seed();

/// Parses argv and dispatches. Returns the process exit code.
int run(int argc, char** argv);

}  // namespace pris::cli
