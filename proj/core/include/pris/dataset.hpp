#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <torch/torch.h>

#include "pris/image.hpp"

namespace pris {

enum class Split { kTrain, kTest };

/// A directory of lossless images held in memory. Train splits crop at a
/// random offset, test splits crop at the center.
class Dataset {
public:
    /// Loads every supported image in `dir` (sorted by file name). Throws
    /// DataError when the directory is empty or an image is smaller than the
    /// crop. `max_images` of 0 means no limit.
    Dataset(const std::filesystem::path& dir, Split split, int crop_size, std::size_t max_images = 0);

    /// In-memory dataset (tests, synthetic data).
    Dataset(std::vector<Image8> images, Split split, int crop_size);

    [[nodiscard]] std::size_t size() const noexcept { return images_.size(); }
    [[nodiscard]] bool empty() const noexcept { return images_.empty(); }
    [[nodiscard]] Split split() const noexcept { return split_; }
    [[nodiscard]] int crop_size() const noexcept { return crop_; }
    [[nodiscard]] const Image8& image(std::size_t i) const { return images_.at(i); }
    [[nodiscard]] const std::vector<std::string>& names() const noexcept { return names_; }

    /// (1, 3, crop, crop) float tensor for image i. `rng` drives the train
    /// crop offset and is ignored for the test split.
    torch::Tensor sample(std::size_t i, std::mt19937_64& rng) const;

    /// Center crop regardless of split.
    torch::Tensor center(std::size_t i) const;

private:
    void validate() const;

    std::vector<Image8> images_;
    std::vector<std::string> names_;
    Split split_;
    int crop_;
};

}  // namespace pris
