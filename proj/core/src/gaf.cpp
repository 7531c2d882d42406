#include "pris/gaf.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "pris/error.hpp"

namespace pris {

std::string_view to_string(GradMode mode) noexcept {
    switch (mode) {
        case GradMode::kZero: return "zero";
        case GradMode::kOne: return "one";
        case GradMode::kGaf: return "gaf";
    }
    return "gaf";
}

GradMode parse_grad_mode(std::string_view text) {
    if (text == "zero" || text == "0") return GradMode::kZero;
    if (text == "one" || text == "1") return GradMode::kOne;
    if (text == "gaf") return GradMode::kGaf;
    throw ConfigError("unknown grad_mode '" + std::string(text) + "' (expected zero, one or gaf)");
}

double gaf(double x) noexcept {
    const double fl = std::floor(x);
    const bool odd = std::fmod(std::abs(fl), 2.0) == 1.0;
    const double sign = odd ? 1.0 : -1.0;
    return sign * 0.5 * std::cos(std::numbers::pi * x) + 0.5 + fl;
}

double gaf_derivative(double x) noexcept {
    const double frac = x - std::floor(x);
    return 0.5 * std::numbers::pi * std::sin(std::numbers::pi * frac);
}

torch::Tensor gaf(const torch::Tensor& x) {
    const auto fl = torch::floor(x);
    const auto odd = torch::remainder(fl, 2.0).eq(1.0);
    const auto sign = torch::where(odd, torch::ones_like(x), -torch::ones_like(x));
    return sign * 0.5 * torch::cos(std::numbers::pi * x) + 0.5 + fl;
}

torch::Tensor gaf_derivative(const torch::Tensor& x) {
    const auto frac = x - torch::floor(x);
    return 0.5 * std::numbers::pi * torch::sin(std::numbers::pi * frac);
}

torch::Tensor round_half_away(const torch::Tensor& x) {
    torch::NoGradGuard no_grad;
    return torch::sign(x) * torch::floor(torch::abs(x) + 0.5);
}

namespace {

class RoundSurrogate : public torch::autograd::Function<RoundSurrogate> {
public:
    static torch::Tensor forward(torch::autograd::AutogradContext* ctx, const torch::Tensor& x, int64_t mode) {
        ctx->saved_data["mode"] = mode;
        if (static_cast<GradMode>(mode) == GradMode::kGaf) ctx->save_for_backward({x});
        return round_half_away(x);
    }

    static torch::autograd::variable_list backward(torch::autograd::AutogradContext* ctx,
                                                   torch::autograd::variable_list grad_out) {
        const auto mode = static_cast<GradMode>(ctx->saved_data["mode"].toInt());
        const auto& g = grad_out[0];
        torch::Tensor grad_in;
        switch (mode) {
            case GradMode::kZero: grad_in = torch::zeros_like(g); break;
            case GradMode::kOne: grad_in = g; break;
            case GradMode::kGaf: grad_in = g * gaf_derivative(ctx->get_saved_variables()[0]); break;
        }
        return {grad_in, torch::Tensor()};
    }
};

}  // namespace

torch::Tensor round_with_grad(const torch::Tensor& x, GradMode mode) {
    return RoundSurrogate::apply(x, static_cast<int64_t>(mode));
}

torch::Tensor round_st(const torch::Tensor& x, GradMode mode) {
    // Scale in double so values such as 128.5/255 land on the exact half.
    const auto y = x.to(torch::kFloat64) * 255.0;
    return (round_with_grad(y, mode) / 255.0).to(x.scalar_type());
}

torch::Tensor quantize_8bit(const torch::Tensor& x) {
    torch::NoGradGuard no_grad;
    return (round_half_away(x.to(torch::kFloat64) * 255.0) / 255.0).to(x.scalar_type());
}

}  // namespace pris
