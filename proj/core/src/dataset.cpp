#include "pris/dataset.hpp"

#include <algorithm>

#include "pris/error.hpp"

namespace pris {

Dataset::Dataset(const std::filesystem::path& dir, Split split, int crop_size, std::size_t max_images)
    : split_(split), crop_(crop_size) {
    if (!std::filesystem::is_directory(dir)) throw DataError("dataset directory not found: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.is_regular_file() && is_supported_image(entry.path())) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (max_images != 0 && files.size() > max_images) files.resize(max_images);
    for (const auto& f : files) {
        images_.push_back(read_image(f));
        names_.push_back(f.filename().string());
    }
    validate();
}

Dataset::Dataset(std::vector<Image8> images, Split split, int crop_size)
    : images_(std::move(images)), split_(split), crop_(crop_size) {
    for (std::size_t i = 0; i < images_.size(); ++i) names_.push_back("image" + std::to_string(i));
    validate();
}

void Dataset::validate() const {
    if (images_.empty()) throw DataError("dataset is empty");
    if (crop_ < 2 || crop_ % 2 != 0) throw ConfigError("crop size must be a positive even number");
    for (std::size_t i = 0; i < images_.size(); ++i) {
        const auto& img = images_[i];
        if (img.width < crop_ || img.height < crop_) {
            throw DataError("image " + names_[i] + " (" + std::to_string(img.width) + "x" +
                            std::to_string(img.height) + ") is smaller than the crop size " + std::to_string(crop_));
        }
    }
}

torch::Tensor Dataset::sample(std::size_t i, std::mt19937_64& rng) const {
    if (split_ == Split::kTest) return center(i);
    const auto& img = images_.at(i);
    std::uniform_int_distribution<int> dx(0, img.width - crop_);
    std::uniform_int_distribution<int> dy(0, img.height - crop_);
    const int x0 = dx(rng);
    const int y0 = dy(rng);
    return to_tensor(crop(img, x0, y0, crop_, crop_));
}

torch::Tensor Dataset::center(std::size_t i) const { return to_tensor(center_crop(images_.at(i), crop_, crop_)); }

}  // namespace pris
