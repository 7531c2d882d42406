#include "pris/metrics.hpp"

#include <cmath>

#include <nlohmann/json.hpp>

#include "pris/error.hpp"
#include "pris/gaf.hpp"

namespace pris {

double psnr_from_mse(double mse, double max_value) noexcept {
    if (mse <= 0.0) return kInfinitePsnr;
    return 10.0 * std::log10(max_value * max_value / mse);
}

double psnr(std::span<const std::uint8_t> a, std::span<const std::uint8_t> b) {
    if (a.size() != b.size()) throw DimensionError("psnr: inputs differ in size");
    if (a.empty()) throw DimensionError("psnr: empty input");
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = static_cast<double>(a[i]) - static_cast<double>(b[i]);
        sum += d * d;
    }
    return psnr_from_mse(sum / static_cast<double>(a.size()));
}

double psnr(const Image8& a, const Image8& b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
        throw DimensionError("psnr: image shapes differ");
    }
    return psnr(a.view(), b.view());
}

std::vector<double> batch_psnr_8bit(const torch::Tensor& a, const torch::Tensor& b) {
    if (!a.sizes().equals(b.sizes()) || a.dim() != 4) throw DimensionError("batch_psnr_8bit: shape mismatch");
    torch::NoGradGuard no_grad;
    const auto qa = quantize_8bit(a.detach().to(torch::kFloat64).clamp(0.0, 1.0)) * 255.0;
    const auto qb = quantize_8bit(b.detach().to(torch::kFloat64).clamp(0.0, 1.0)) * 255.0;
    const auto mse = (qa - qb).square().flatten(1).mean(1);
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(mse.size(0)));
    for (std::int64_t i = 0; i < mse.size(0); ++i) out.push_back(psnr_from_mse(mse[i].item<double>()));
    return out;
}

nlohmann::json psnr_to_json(double db) {
    if (std::isinf(db)) return db > 0 ? "inf" : "-inf";
    return db;
}

double psnr_from_json(const nlohmann::json& j) {
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "inf") return kInfinitePsnr;
        if (s == "-inf") return -kInfinitePsnr;
        throw DataError("bad PSNR value '" + s + "'");
    }
    return j.get<double>();
}

double mean_psnr(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    double sum = 0.0;
    for (double v : values) sum += v;
    return sum / static_cast<double>(values.size());
}

}  // namespace pris
