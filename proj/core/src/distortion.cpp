#include "pris/distortion.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include <nlohmann/json.hpp>

#include "pris/error.hpp"
#include "pris/jpeg.hpp"
#include "pris/rng.hpp"

namespace pris {

std::string_view to_string(DistortionKind kind) noexcept {
    switch (kind) {
        case DistortionKind::kIdentity: return "identity";
        case DistortionKind::kGaussian: return "gaussian";
        case DistortionKind::kJpeg: return "jpeg";
        case DistortionKind::kRound: return "round";
        case DistortionKind::kRGaussian: return "rgaussian";
        case DistortionKind::kRJpeg: return "rjpeg";
    }
    return "identity";
}

DistortionKind parse_distortion_kind(std::string_view text) {
    if (text == "identity") return DistortionKind::kIdentity;
    if (text == "gaussian") return DistortionKind::kGaussian;
    if (text == "jpeg") return DistortionKind::kJpeg;
    if (text == "round") return DistortionKind::kRound;
    if (text == "rgaussian") return DistortionKind::kRGaussian;
    if (text == "rjpeg") return DistortionKind::kRJpeg;
    throw ParameterError("unknown distortion kind '" + std::string(text) + "'");
}

void DistortionSpec::validate() const {
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw ParameterError("distortion: sigma must be a finite value >= 0");
    }
    if (qf < 1 || qf > 100) {
        throw ParameterError("distortion: qf must be in [1, 100], got " + std::to_string(qf));
    }
}

namespace {

std::string format_number(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

bool parse_int(std::string_view text, int& out) {
    if (text.empty()) return false;
    const auto* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, out);
    return ec == std::errc{} && ptr == end;
}

}  // namespace

std::string DistortionSpec::label() const {
    switch (kind) {
        case DistortionKind::kIdentity: return "identity";
        case DistortionKind::kGaussian: return "gauss" + format_number(sigma);
        case DistortionKind::kJpeg: return "jpeg" + std::to_string(qf);
        case DistortionKind::kRound: return "round";
        case DistortionKind::kRGaussian: return "rgauss" + format_number(sigma);
        case DistortionKind::kRJpeg: return "rjpeg" + std::to_string(qf);
    }
    return "identity";
}

DistortionSpec parse_attack_label(std::string_view label, GradMode grad_mode) {
    DistortionSpec spec;
    spec.grad_mode = grad_mode;
    auto with_prefix = [&](std::string_view prefix) {
        return label.size() > prefix.size() && label.substr(0, prefix.size()) == prefix;
    };
    bool ok = true;
    if (label == "identity") {
        spec.kind = DistortionKind::kIdentity;
    } else if (label == "round") {
        spec.kind = DistortionKind::kRound;
    } else if (with_prefix("rgauss")) {
        spec.kind = DistortionKind::kRGaussian;
        ok = parse_double(label.substr(6), spec.sigma);
    } else if (with_prefix("gauss")) {
        spec.kind = DistortionKind::kGaussian;
        ok = parse_double(label.substr(5), spec.sigma);
    } else if (with_prefix("rjpeg")) {
        spec.kind = DistortionKind::kRJpeg;
        ok = parse_int(label.substr(5), spec.qf);
    } else if (with_prefix("jpeg")) {
        spec.kind = DistortionKind::kJpeg;
        ok = parse_int(label.substr(4), spec.qf);
    } else {
        ok = false;
    }
    if (!ok) {
        std::string known;
        for (const auto& l : standard_attack_labels()) known += (known.empty() ? "" : ", ") + l;
        throw ConfigError("unknown attack label '" + std::string(label) + "' (known: " + known + ")");
    }
    try {
        spec.validate();
    } catch (const ParameterError& e) {
        throw ConfigError("attack label '" + std::string(label) + "': " + e.what());
    }
    return spec;
}

std::vector<DistortionSpec> parse_attack_list(std::string_view labels, GradMode grad_mode) {
    std::vector<DistortionSpec> out;
    std::size_t start = 0;
    while (start <= labels.size()) {
        const auto comma = labels.find(',', start);
        const auto end = comma == std::string_view::npos ? labels.size() : comma;
        const auto item = labels.substr(start, end - start);
        if (!item.empty()) out.push_back(parse_attack_label(item, grad_mode));
        if (comma == std::string_view::npos) break;
        start = comma + 1;
    }
    if (out.empty()) throw ConfigError("attack list is empty");
    return out;
}

const std::vector<std::string>& standard_attack_labels() {
    static const std::vector<std::string> labels{"identity", "gauss1",  "gauss10", "jpeg90",  "jpeg80",
                                                 "round",    "rgauss1", "rgauss10", "rjpeg90", "rjpeg80"};
    return labels;
}

void to_json(nlohmann::json& j, const DistortionSpec& spec) {
    j = nlohmann::json{{"kind", std::string(to_string(spec.kind))},
                       {"sigma", spec.sigma},
                       {"qf", spec.qf},
                       {"grad_mode", std::string(to_string(spec.grad_mode))}};
}

void from_json(const nlohmann::json& j, DistortionSpec& spec) {
    if (!j.is_object()) throw ConfigError("distortion spec must be an object");
    DistortionSpec out;
    for (const auto& [key, value] : j.items()) {
        if (key == "kind") {
            out.kind = parse_distortion_kind(value.get<std::string>());
        } else if (key == "sigma") {
            out.sigma = value.get<double>();
        } else if (key == "qf") {
            out.qf = value.get<int>();
        } else if (key == "grad_mode") {
            out.grad_mode = parse_grad_mode(value.get<std::string>());
        } else {
            throw ConfigError("distortion spec: unknown key '" + key + "'");
        }
    }
    out.validate();
    spec = out;
}

torch::Tensor gaussian_noise(const torch::Tensor& x, double sigma, std::uint64_t seed) {
    if (!(sigma >= 0.0)) throw ParameterError("gaussian_noise: sigma must be >= 0");
    if (sigma == 0.0) return x;
    auto gen = make_generator(seed);
    const auto noise = torch::randn(x.sizes(), gen, x.options().requires_grad(false)) * (sigma / 255.0);
    return (x + noise).clamp(0.0, 1.0);
}

torch::Tensor apply(const DistortionSpec& spec, const torch::Tensor& x, std::uint64_t seed, bool train) {
    spec.validate();
    auto quantize = [&](const torch::Tensor& t) {
        return train ? round_st(t, spec.grad_mode) : quantize_8bit(t);
    };
    auto compress = [&](const torch::Tensor& t) {
        return jpeg::jpeg_sim(t, spec.qf, spec.grad_mode, /*hard=*/!train);
    };
    switch (spec.kind) {
        case DistortionKind::kIdentity: return x;
        case DistortionKind::kGaussian: return gaussian_noise(x, spec.sigma, seed);
        case DistortionKind::kJpeg: return compress(x);
        case DistortionKind::kRound: return quantize(x);
        case DistortionKind::kRGaussian: return gaussian_noise(quantize(x), spec.sigma, seed);
        case DistortionKind::kRJpeg: return compress(quantize(x));
    }
    throw ParameterError("distortion: unknown kind");
}

}  // namespace pris
