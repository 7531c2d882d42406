#include "synthetic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <random>

#include "pris/rng.hpp"

namespace pris::cli {

namespace {

using Color = std::array<double, 3>;

Color random_color(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(0.0, 255.0);
    return {u(rng), u(rng), u(rng)};
}

}  // namespace

std::vector<Image8> synthetic_images(std::size_t count, int width, int height, std::uint64_t seed) {
    std::vector<Image8> out;
    out.reserve(count);
    for (std::size_t n = 0; n < count; ++n) {
        std::mt19937_64 rng(derive_seed(seed, {n}));
        std::uniform_real_distribution<double> unit(0.0, 1.0);

        const Color c0 = random_color(rng);
        const Color c1 = random_color(rng);
        const double angle = unit(rng) * 2.0 * std::numbers::pi;
        const double gx = std::cos(angle), gy = std::sin(angle);

        std::vector<double> buf(static_cast<std::size_t>(width) * height * 3);
        auto px = [&](int y, int x, int c) -> double& {
            return buf[(static_cast<std::size_t>(y) * width + x) * 3 + c];
        };
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double t = std::clamp(0.5 + 0.5 * ((x - width / 2.0) * gx + (y - height / 2.0) * gy) /
                                                      (0.5 * std::max(width, height)),
                                            0.0, 1.0);
                for (int c = 0; c < 3; ++c) px(y, x, c) = (1.0 - t) * c0[c] + t * c1[c];
            }
        }

        const int shapes = 3 + static_cast<int>(unit(rng) * 5);
        for (int s = 0; s < shapes; ++s) {
            const Color col = random_color(rng);
            const double cx = unit(rng) * width, cy = unit(rng) * height;
            const double r = (0.08 + 0.25 * unit(rng)) * std::min(width, height);
            const bool circle = unit(rng) < 0.5;
            const double alpha = 0.5 + 0.5 * unit(rng);
            for (int y = 0; y < height; ++y) {
                for (int x = 0; x < width; ++x) {
                    const double dx = x - cx, dy = y - cy;
                    const bool inside = circle ? dx * dx + dy * dy <= r * r : std::abs(dx) <= r && std::abs(dy) <= 0.6 * r;
                    if (!inside) continue;
                    for (int c = 0; c < 3; ++c) px(y, x, c) = (1.0 - alpha) * px(y, x, c) + alpha * col[c];
                }
            }
        }

        const double fx = 0.05 + 0.3 * unit(rng), fy = 0.05 + 0.3 * unit(rng);
        const double amp = 4.0 + 8.0 * unit(rng);
        Image8 img(width, height, 3);
        for (int y = 0; y < height; ++y) {
            for (int x = 0; x < width; ++x) {
                const double texture = amp * std::sin(fx * x) * std::cos(fy * y);
                for (int c = 0; c < 3; ++c) {
                    img.at(y, x, c) = static_cast<std::uint8_t>(std::clamp(std::lround(px(y, x, c) + texture), 0L, 255L));
                }
            }
        }
        out.push_back(std::move(img));
    }
    return out;
}

}  // namespace pris::cli
