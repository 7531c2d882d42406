#include "commands.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <iomanip>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "pris/bitpack.hpp"
#include "pris/checkpoint.hpp"
#include "pris/config.hpp"
#include "pris/dataset.hpp"
#include "pris/error.hpp"
#include "pris/evaluate.hpp"
#include "pris/image.hpp"
#include "pris/metrics.hpp"
#include "pris/training.hpp"
#include "synthetic.hpp"

namespace pris::cli {

namespace fs = std::filesystem;

namespace {

constexpr int kCropMultiple = 16;  // DWT 2x2 and JPEG 8x8 blocks

Image8 load_cropped(const fs::path& path, const char* role) {
    auto img = read_image(path);
    auto cropped = crop_to_multiple(img, kCropMultiple);
    if (cropped.width != img.width || cropped.height != img.height) {
        std::cerr << "warning: " << role << " " << path.string() << " is " << img.width << "x" << img.height
                  << "; center-cropped to " << cropped.width << "x" << cropped.height << "\n";
    }
    return cropped;
}

void require_file(const fs::path& p, const char* what) {
    if (!fs::exists(p)) throw DataError(std::string(what) + " not found: " + p.string());
}

void ensure_parent(const fs::path& p) {
    if (p.has_parent_path()) fs::create_directories(p.parent_path());
}

std::vector<std::string> available_labels(const fs::path& model, PrisModel* loaded) {
    std::vector<std::string> labels;
    if (loaded) {
        for (const auto& s : loaded->enhancer_sets()) {
            if (s != kDefaultEnhancers) labels.push_back(s);
        }
    }
    for (const auto& l : standard_attack_labels()) {
        if (fs::exists(per_attack_checkpoint(model, l))) labels.push_back(l);
    }
    return labels;
}

}  // namespace

std::optional<std::uint64_t> env_seed() {
    const char* v = std::getenv("PRIS_SEED");
    if (!v || !*v) return std::nullopt;
    try {
        return std::stoull(v);
    } catch (const std::exception&) {
        throw ConfigError(std::string("PRIS_SEED must be an unsigned integer, got '") + v + "'");
    }
}

fs::path per_attack_checkpoint(const fs::path& model, const std::string& attack) {
    auto base = model;
    if (base.extension() == ".ckpt") base.replace_extension();
    return fs::path(base.string() + "." + attack + ".ckpt");
}

std::pair<fs::path, fs::path> report_paths(const fs::path& out) {
    auto base = out;
    if (base.extension() == ".json" || base.extension() == ".txt") base.replace_extension();
    return {fs::path(base.string() + ".json"), fs::path(base.string() + ".txt")};
}

void cmd_train(const TrainArgs& args) {
    auto config = Config::load(args.config);
    if (auto s = env_seed()) config.override_seeds(*s);
    if (args.dump_config) {
        std::cout << config.to_json().dump(2) << "\n";
        return;
    }

    const Dataset data(config.data.train_dir, Split::kTrain, config.data.crop_size, config.data.max_images);
    fs::create_directories(config.output.dir);
    const auto stem = config.output.dir / config.output.name;
    {
        std::ofstream echo(stem.string() + ".config.json");
        echo << config.to_json().dump(2) << "\n";
    }

    auto train_one = [&](const std::vector<DistortionSpec>& attacks, const std::string& suffix) {
        const fs::path log_path = stem.string() + suffix + ".metrics.jsonl";
        std::ofstream(log_path, std::ios::trunc).close();
        MetricsLog log(log_path);
        auto on_epoch = [&](const EpochMetrics& m) {
            log.append(m);
            std::cout << m.to_json().dump() << "\n";
        };

        auto model = make_model(config.model, config.seeds.init);
        const auto plan = config.plan(attacks);
        int phase = 0;
        train_full(plan, model, data, StepOptions{kDefaultEnhancers, on_epoch},
                   [&](const StepPlan& step, PrisModel& m) {
                       ++phase;
                       const auto tag = (step.number == 0 ? "joint" : "step") + std::to_string(phase);
                       save_checkpoint(stem.string() + suffix + "." + tag + ".ckpt", m);
                   });
        if (config.train.level == 3) {
            for (const auto& attack : attacks) finetune_attack_enhancers(plan, model, data, attack, on_epoch);
        }
        const fs::path final_path = stem.string() + suffix + ".ckpt";
        save_checkpoint(final_path, model);
        std::cout << "wrote " << final_path.string() << "\n";
    };

    if (config.train.level <= 2) {
        for (const auto& attack : config.attacks) train_one({attack}, "." + attack.label());
    } else {
        train_one(config.attacks, "");
    }
}

void cmd_embed(const EmbedArgs& args) {
    fs::path model_path = args.model;
    if (args.attack) {
        parse_attack_label(*args.attack);
        model_path = per_attack_checkpoint(args.model, *args.attack);
    }
    require_file(model_path, "model");
    auto model = load_checkpoint(model_path);

    const auto host = load_cropped(args.host, "host");
    const auto secret = load_cropped(args.secret, "secret");
    if (host.width != secret.width || host.height != secret.height) {
        throw DataError("host (" + std::to_string(host.width) + "x" + std::to_string(host.height) +
                        ") and secret (" + std::to_string(secret.width) + "x" + std::to_string(secret.height) +
                        ") sizes differ");
    }

    torch::NoGradGuard no_grad;
    const auto result = model.embed(to_tensor(host), to_tensor(secret));
    ensure_parent(args.out);
    write_png(args.out, to_image8(result.container));
}

void cmd_extract(const ExtractArgs& args) {
    require_file(args.model, "model");
    auto model = load_checkpoint(args.model);
    ExtractOptions options;

    if (args.attack) {
        const auto& label = *args.attack;
        const auto per_attack = per_attack_checkpoint(args.model, label);
        if (fs::exists(per_attack)) {
            model = load_checkpoint(per_attack);
        } else if (model.has_enhancer_set(label)) {
            options.enhancer_set = label;
        } else {
            std::string known;
            for (const auto& l : available_labels(args.model, &model)) known += (known.empty() ? "" : ", ") + l;
            throw ConfigError("unknown attack label '" + label + "' for this model (available: " +
                              (known.empty() ? "none" : known) + ")");
        }
    }

    const auto container = load_cropped(args.container, "container");
    const auto x = to_tensor(container);
    const auto z_seed = args.z_seed ? *args.z_seed : env_seed().value_or(0);

    torch::NoGradGuard no_grad;
    const auto z = sample_latent(x.sizes(), z_seed);
    const auto result = model.extract(x, z, options);
    ensure_parent(args.out);
    write_png(args.out, to_image8(result.extracted));
}

void cmd_eval(const EvalArgs& args) {
    const auto attacks = parse_attack_list(args.attacks);
    if (args.level < 1 || args.level > 4) throw ConfigError("--level must be 1, 2, 3 or 4");

    std::vector<PrisModel> storage;
    std::vector<std::string> labels;
    std::string model_id;
    EvalModels models;
    if (args.level <= 2) {
        storage.reserve(attacks.size());
        for (const auto& a : attacks) {
            const auto path = per_attack_checkpoint(args.model, a.label());
            if (!fs::exists(path)) {
                throw ConfigError("level " + std::to_string(args.level) + " needs " + path.string());
            }
            storage.push_back(load_checkpoint(path));
            labels.push_back(a.label());
            model_id += (model_id.empty() ? "" : "+") + checkpoint_hash(path);
        }
        for (std::size_t i = 0; i < storage.size(); ++i) models.per_attack[labels[i]] = &storage[i];
    } else {
        require_file(args.model, "model");
        storage.push_back(load_checkpoint(args.model));
        models.shared = &storage.front();
        model_id = checkpoint_hash(args.model);
        if (args.level == 3) {
            for (const auto& a : attacks) {
                if (!models.shared->has_enhancer_set(a.label())) models.shared->enhancers(a.label());
            }
        }
    }

    const Dataset data(args.data, Split::kTest, args.crop_size, args.max_images);
    const auto seed = args.seed ? *args.seed : env_seed().value_or(0);
    auto report = evaluate(models, args.level, attacks, data, seed);
    report.model_id = model_id;

    const auto [json_path, text_path] = report_paths(args.out);
    ensure_parent(json_path);
    std::ofstream(json_path) << report.to_json().dump(2) << "\n";
    std::ofstream(text_path) << report.to_table();
    std::cout << report.to_table();
}

void cmd_bitpack_demo(const BitpackArgs& args) {
    const auto host = read_image(args.host);
    const auto secret = read_image(args.secret);
    if (host.width != secret.width || host.height != secret.height) throw DataError("host and secret sizes differ");

    const auto container = bitpack::pack(host, secret);
    fs::create_directories(args.out_dir);
    bitpack::write_wide(args.out_dir / "container.prw", container);
    const auto recovered = bitpack::unpack(bitpack::read_wide(args.out_dir / "container.prw"));
    write_png(args.out_dir / "recovered.png", recovered);

    const double bound = bitpack::bound_check(host, secret);
    std::cout << "container: " << (args.out_dir / "container.prw").string() << "\n";
    std::cout << "recovered secret identical: " << (recovered == secret ? "yes" : "no") << "\n";
    std::cout << "PSNR-C (MAX = 2^32-1): ";
    if (std::isinf(bound)) {
        std::cout << "inf";
    } else {
        std::cout << std::fixed << std::setprecision(4) << bound;
    }
    std::cout << " dB (worst case " << std::fixed << std::setprecision(4) << bitpack::worst_case_bound()
              << " dB)\n";
    if (recovered != secret) throw DataError("bitpack round trip failed");
}

void cmd_synth(const SynthArgs& args) {
    fs::create_directories(args.out_dir);
    const auto images = synthetic_images(args.count, args.size, args.size, args.seed);
    for (std::size_t i = 0; i < images.size(); ++i) {
        char name[32];
        std::snprintf(name, sizeof(name), "synth_%03zu.png", i);
        write_png(args.out_dir / name, images[i]);
    }
    std::cout << "wrote " << images.size() << " images to " << args.out_dir.string() << "\n";
}

int run(int argc, char** argv) {
    CLI::App app{"pris: robust invertible image hiding"};
    app.require_subcommand(1);

    TrainArgs train;
    auto* train_cmd = app.add_subcommand("train", "run a training plan from a JSON config");
    train_cmd->add_option("--config", train.config, "config file")->required();
    train_cmd->add_flag("--dump-config", train.dump_config, "print the validated config and exit");

    EmbedArgs embed;
    auto* embed_cmd = app.add_subcommand("embed", "hide a secret image inside a host image");
    embed_cmd->add_option("--model", embed.model, "checkpoint")->required();
    embed_cmd->add_option("--host", embed.host, "host image")->required();
    embed_cmd->add_option("--secret", embed.secret, "secret image")->required();
    embed_cmd->add_option("--out", embed.out, "container PNG")->required();
    embed_cmd->add_option("--attack", embed.attack, "attack label (per-attack model, levels 1-2)");

    ExtractArgs extract;
    auto* extract_cmd = app.add_subcommand("extract", "recover the secret from a container");
    extract_cmd->add_option("--model", extract.model, "checkpoint")->required();
    extract_cmd->add_option("--container", extract.container, "container image")->required();
    extract_cmd->add_option("--out", extract.out, "extracted secret PNG")->required();
    extract_cmd->add_option("--attack", extract.attack, "attack label (per-attack enhancers or model)");
    extract_cmd->add_option("--z-seed", extract.z_seed, "latent seed");

    EvalArgs eval;
    auto* eval_cmd = app.add_subcommand("eval", "PSNR-C / PSNR-S report over a test folder");
    eval_cmd->add_option("--model", eval.model, "checkpoint (base name for levels 1-2)")->required();
    eval_cmd->add_option("--data", eval.data, "test image folder")->required();
    eval_cmd->add_option("--level", eval.level, "task level 1-4")->required()->check(CLI::Range(1, 4));
    eval_cmd->add_option("--attacks", eval.attacks, "comma-separated attack labels")->required();
    eval_cmd->add_option("--out", eval.out, "report path (writes .json and .txt)")->required();
    eval_cmd->add_option("--crop", eval.crop_size, "center crop size");
    eval_cmd->add_option("--seed", eval.seed, "evaluation seed");
    eval_cmd->add_option("--max-images", eval.max_images, "limit the number of test images");

    BitpackArgs bitpack_args;
    auto* bitpack_cmd = app.add_subcommand("bitpack-demo", "lossless 32-bit container demonstration");
    bitpack_cmd->add_option("--host", bitpack_args.host, "8-bit host image")->required();
    bitpack_cmd->add_option("--secret", bitpack_args.secret, "8-bit secret image")->required();
    bitpack_cmd->add_option("--out-dir", bitpack_args.out_dir, "output folder")->required();

    SynthArgs synth;
    auto* synth_cmd = app.add_subcommand("synth-data", "write a deterministic synthetic image set");
    synth_cmd->add_option("--out-dir", synth.out_dir, "output folder")->required();
    synth_cmd->add_option("--count", synth.count, "number of images");
    synth_cmd->add_option("--size", synth.size, "width and height");
    synth_cmd->add_option("--seed", synth.seed, "generator seed");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : static_cast<int>(ExitCode::kConfig);
    }

    try {
        if (*train_cmd) cmd_train(train);
        if (*embed_cmd) cmd_embed(embed);
        if (*extract_cmd) cmd_extract(extract);
        if (*eval_cmd) cmd_eval(eval);
        if (*bitpack_cmd) cmd_bitpack_demo(bitpack_args);
        if (*synth_cmd) cmd_synth(synth);
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(e.exit_code());
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::kConfig);
    } catch (const fs::filesystem_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::kData);
    } catch (const c10::Error& e) {
        std::cerr << "error: " << e.what_without_backtrace() << "\n";
        return static_cast<int>(ExitCode::kData);
    }
    return 0;
}

}  // namespace pris::cli
