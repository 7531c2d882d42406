#include "pris/evaluate.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pris/error.hpp"
#include "pris/gaf.hpp"
#include "pris/inn.hpp"
#include "pris/metrics.hpp"
#include "pris/rng.hpp"

namespace pris {

nlohmann::json EvalReport::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& r : rows) {
        rows_json.push_back({{"attack", r.attack},
                             {"psnr_c", psnr_to_json(r.psnr_c)},
                             {"psnr_s", psnr_to_json(r.psnr_s)},
                             {"n_images", r.n_images}});
    }
    return {{"level", level}, {"model", model_id}, {"rows", rows_json}};
}

EvalReport EvalReport::from_json(const nlohmann::json& j) {
    EvalReport r;
    r.level = j.at("level").get<int>();
    r.model_id = j.at("model").get<std::string>();
    for (const auto& row : j.at("rows")) {
        r.rows.push_back(EvalRow{row.at("attack").get<std::string>(), psnr_from_json(row.at("psnr_c")),
                                 psnr_from_json(row.at("psnr_s")), row.at("n_images").get<int>()});
    }
    return r;
}

std::string EvalReport::to_table() const {
    auto fmt = [](double v) {
        std::ostringstream os;
        if (std::isinf(v)) {
            os << "inf";
        } else {
            os << std::fixed << std::setprecision(2) << v;
        }
        return os.str();
    };
    std::ostringstream os;
    os << "level " << level << "  model " << model_id << "\n";
    os << std::left << std::setw(12) << "attack" << std::right << std::setw(10) << "PSNR-C" << std::setw(10)
       << "PSNR-S" << std::setw(8) << "images" << "\n";
    for (const auto& r : rows) {
        os << std::left << std::setw(12) << r.attack << std::right << std::setw(10) << fmt(r.psnr_c)
           << std::setw(10) << fmt(r.psnr_s) << std::setw(8) << r.n_images << "\n";
    }
    return os.str();
}

namespace {

struct Selection {
    PrisModel* model;
    ExtractOptions extract;
};

Selection select(const EvalModels& models, int level, const DistortionSpec& attack) {
    const auto label = attack.label();
    switch (level) {
        case 1:
        case 2: {
            auto it = models.per_attack.find(label);
            if (it == models.per_attack.end() || it->second == nullptr) {
                throw ConfigError("level " + std::to_string(level) + " evaluation needs a model trained for '" +
                                  label + "'");
            }
            return {it->second, {}};
        }
        case 3:
            if (!models.shared) throw ConfigError("level 3 evaluation needs a model");
            if (!models.shared->has_enhancer_set(label)) {
                // surfaces the list of available sets
                models.shared->enhancers(label);
            }
            return {models.shared, {true, label}};
        case 4:
            if (!models.shared) throw ConfigError("level 4 evaluation needs a model");
            return {models.shared, {}};
        default: throw ConfigError("evaluation level must be 1, 2, 3 or 4");
    }
}

}  // namespace

EvalReport evaluate(const EvalModels& models, int level, const std::vector<DistortionSpec>& attacks,
                    const Dataset& data, std::uint64_t seed) {
    if (attacks.empty()) throw ConfigError("evaluation needs at least one attack");
    if (data.size() < 2) throw DataError("evaluation needs at least two images");

    std::vector<Selection> selections;
    for (const auto& a : attacks) {
        a.validate();
        selections.push_back(select(models, level, a));
    }

    torch::NoGradGuard no_grad;
    const auto n = data.size();
    std::vector<std::vector<double>> psnr_c(attacks.size()), psnr_s(attacks.size());

    for (std::size_t i = 0; i < n; ++i) {
        const auto host = data.center(i);
        const auto secret = data.center((i + 1) % n);
        const auto z = sample_latent(host.sizes(), derive_seed(seed, {tag("eval-z"), i}));

        for (std::size_t a = 0; a < attacks.size(); ++a) {
            auto& sel = selections[a];
            const auto container = quantize_8bit(sel.model->embed(host, secret).container.clamp(0.0, 1.0));
            const auto distorted =
                apply(attacks[a], container, derive_seed(seed, {tag("eval-noise"), i, a}), /*train=*/false);
            const auto extracted = quantize_8bit(sel.model->extract(distorted, z, sel.extract).extracted.clamp(0.0, 1.0));
            psnr_c[a].push_back(psnr(to_image8(container), to_image8(host)));
            psnr_s[a].push_back(psnr(to_image8(extracted), to_image8(secret)));
        }
    }

    EvalReport report;
    report.level = level;
    for (std::size_t a = 0; a < attacks.size(); ++a) {
        report.rows.push_back(
            EvalRow{attacks[a].label(), mean_psnr(psnr_c[a]), mean_psnr(psnr_s[a]), static_cast<int>(n)});
    }
    return report;
}

}  // namespace pris
