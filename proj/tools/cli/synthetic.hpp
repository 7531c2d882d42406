#pragma once

#include <cstdint>
#include <vector>

#include "pris/image.hpp"

namespace pris::cli {

/// Deterministic stand-in for a photo set: colour gradients, filled shapes
/// and a faint periodic texture. Used by the smoke configs and tests, since
/// no image corpus ships with the repository.
std::vector<Image8> synthetic_images(std::size_t count, int width, int height, std::uint64_t seed);

}  // namespace pris::cli
