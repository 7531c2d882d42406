#include "pris/config.hpp"

#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "pris/error.hpp"
#include "pris/rng.hpp"

namespace pris {

using nlohmann::json;

namespace {

void check_keys(const json& j, const std::string& section, const std::set<std::string>& allowed) {
    if (!j.is_object()) throw ConfigError("config: '" + section + "' must be an object");
    for (const auto& [key, _] : j.items()) {
        if (!allowed.contains(key)) throw ConfigError("config: unknown key '" + section + "." + key + "'");
    }
}

template <typename T>
void read(const json& j, const char* key, T& out, const std::string& section) {
    if (!j.contains(key)) return;
    try {
        out = j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError("config: bad value for '" + section + "." + key + "': " + e.what());
    }
}

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& base) {
    if (p.empty() || p.is_absolute() || base.empty()) return p;
    return base / p;
}

}  // namespace

void Config::validate() const {
    if (model.inn.n_blocks < 1) throw ConfigError("model.n_blocks must be >= 1");
    if (model.inn.channels != 3) throw ConfigError("model.channels must be 3 (RGB)");
    if (model.inn.subnet_layers < 1 || model.inn.subnet_growth < 1) throw ConfigError("subnet dims must be >= 1");
    if (model.enhance_layers < 1 || model.enhance_growth < 1) throw ConfigError("enhance dims must be >= 1");
    for (auto e : train.epochs) {
        if (e < 0) throw ConfigError("train.epochs must be >= 0");
    }
    for (auto lr : train.learning_rates) {
        if (!(lr > 0.0)) throw ConfigError("train.learning_rates must be > 0");
    }
    if (train.level < 1 || train.level > 4) throw ConfigError("train.level must be 1, 2, 3 or 4");
    if (train.level == 3 && !model.pre_enhance && !model.post_enhance) {
        throw ConfigError("train.level 3 needs pre or post enhancement");
    }
    if (data.crop_size < 16 || data.crop_size % 16 != 0) throw ConfigError("data.crop_size must be a multiple of 16");
    if (attacks.empty()) throw ConfigError("attacks must list at least one attack");
    for (const auto& a : attacks) a.validate();
    plan(attacks).validate();
}

TrainPlan Config::plan(const std::vector<DistortionSpec>& attack_set) const {
    TrainPlan p = train.three_step
                      ? TrainPlan::three_step(attack_set, train.epochs, train.learning_rates, train.lr_half_period)
                      : TrainPlan::joint(attack_set, train.epochs, train.learning_rates, train.lr_half_period);
    p.batch_size = train.batch_size;
    p.beta1 = train.beta1;
    p.beta2 = train.beta2;
    p.weights = train.weights;
    p.seed = seeds.train;
    return p;
}

Config Config::from_json(const json& j, const std::filesystem::path& base) {
    Config c;
    check_keys(j, "<root>", {"model", "train", "data", "attacks", "output", "seeds"});

    if (j.contains("model")) {
        const auto& m = j.at("model");
        check_keys(m, "model", {"n_blocks", "channels", "subnet_layers", "subnet_growth", "pre_enhance", "post_enhance",
                                "enhance_domain", "enhance_layers", "enhance_growth"});
        read(m, "n_blocks", c.model.inn.n_blocks, "model");
        read(m, "channels", c.model.inn.channels, "model");
        read(m, "subnet_layers", c.model.inn.subnet_layers, "model");
        read(m, "subnet_growth", c.model.inn.subnet_growth, "model");
        read(m, "pre_enhance", c.model.pre_enhance, "model");
        read(m, "post_enhance", c.model.post_enhance, "model");
        std::string domain(to_string(c.model.enhance_domain));
        read(m, "enhance_domain", domain, "model");
        c.model.enhance_domain = parse_enhance_domain(domain);
        read(m, "enhance_layers", c.model.enhance_layers, "model");
        read(m, "enhance_growth", c.model.enhance_growth, "model");
    }

    if (j.contains("train")) {
        const auto& t = j.at("train");
        check_keys(t, "train", {"three_step", "epochs", "learning_rates", "lr_half_period", "batch_size", "beta1",
                                "beta2", "lambda_c", "lambda_s", "lambda_z", "grad_mode", "level"});
        read(t, "three_step", c.train.three_step, "train");
        read(t, "epochs", c.train.epochs, "train");
        read(t, "learning_rates", c.train.learning_rates, "train");
        read(t, "lr_half_period", c.train.lr_half_period, "train");
        read(t, "batch_size", c.train.batch_size, "train");
        read(t, "beta1", c.train.beta1, "train");
        read(t, "beta2", c.train.beta2, "train");
        read(t, "lambda_c", c.train.weights.lambda_c, "train");
        read(t, "lambda_s", c.train.weights.lambda_s, "train");
        read(t, "lambda_z", c.train.weights.lambda_z, "train");
        std::string mode(to_string(c.train.grad_mode));
        read(t, "grad_mode", mode, "train");
        c.train.grad_mode = parse_grad_mode(mode);
        read(t, "level", c.train.level, "train");
    }

    if (j.contains("data")) {
        const auto& d = j.at("data");
        check_keys(d, "data", {"train_dir", "test_dir", "crop_size", "max_images"});
        std::string train_dir, test_dir;
        read(d, "train_dir", train_dir, "data");
        read(d, "test_dir", test_dir, "data");
        c.data.train_dir = resolve(train_dir, base);
        c.data.test_dir = resolve(test_dir, base);
        read(d, "crop_size", c.data.crop_size, "data");
        read(d, "max_images", c.data.max_images, "data");
    }

    if (j.contains("attacks")) {
        const auto& a = j.at("attacks");
        if (!a.is_array()) throw ConfigError("config: 'attacks' must be an array");
        for (const auto& item : a) {
            if (item.is_string()) {
                c.attacks.push_back(parse_attack_label(item.get<std::string>(), c.train.grad_mode));
            } else {
                try {
                    c.attacks.push_back(item.get<DistortionSpec>());
                } catch (const ParameterError& e) {
                    throw ConfigError(std::string("config: attack: ") + e.what());
                } catch (const json::exception& e) {
                    throw ConfigError(std::string("config: attack: ") + e.what());
                }
            }
        }
    }

    if (j.contains("output")) {
        const auto& o = j.at("output");
        check_keys(o, "output", {"dir", "name"});
        std::string dir = c.output.dir.string();
        read(o, "dir", dir, "output");
        c.output.dir = resolve(dir, base);
        read(o, "name", c.output.name, "output");
    }

    if (j.contains("seeds")) {
        const auto& s = j.at("seeds");
        check_keys(s, "seeds", {"init", "train", "eval"});
        read(s, "init", c.seeds.init, "seeds");
        read(s, "train", c.seeds.train, "seeds");
        read(s, "eval", c.seeds.eval, "seeds");
    }

    c.validate();
    return c;
}

Config Config::load(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + ": " + e.what());
    }
    return from_json(j, path.parent_path());
}

json Config::to_json() const {
    json attacks_json = json::array();
    for (const auto& a : attacks) attacks_json.push_back(a);
    return {
        {"model",
         {{"n_blocks", model.inn.n_blocks},
          {"channels", model.inn.channels},
          {"subnet_layers", model.inn.subnet_layers},
          {"subnet_growth", model.inn.subnet_growth},
          {"pre_enhance", model.pre_enhance},
          {"post_enhance", model.post_enhance},
          {"enhance_domain", std::string(to_string(model.enhance_domain))},
          {"enhance_layers", model.enhance_layers},
          {"enhance_growth", model.enhance_growth}}},
        {"train",
         {{"three_step", train.three_step},
          {"epochs", train.epochs},
          {"learning_rates", train.learning_rates},
          {"lr_half_period", train.lr_half_period},
          {"batch_size", train.batch_size},
          {"beta1", train.beta1},
          {"beta2", train.beta2},
          {"lambda_c", train.weights.lambda_c},
          {"lambda_s", train.weights.lambda_s},
          {"lambda_z", train.weights.lambda_z},
          {"grad_mode", std::string(to_string(train.grad_mode))},
          {"level", train.level}}},
        {"data",
         {{"train_dir", data.train_dir.string()},
          {"test_dir", data.test_dir.string()},
          {"crop_size", data.crop_size},
          {"max_images", data.max_images}}},
        {"attacks", attacks_json},
        {"output", {{"dir", output.dir.string()}, {"name", output.name}}},
        {"seeds", {{"init", seeds.init}, {"train", seeds.train}, {"eval", seeds.eval}}},
    };
}

void Config::override_seeds(std::uint64_t seed) {
    seeds.init = derive_seed(seed, {tag("init")});
    seeds.train = derive_seed(seed, {tag("train")});
    seeds.eval = derive_seed(seed, {tag("eval")});
}

}  // namespace pris
