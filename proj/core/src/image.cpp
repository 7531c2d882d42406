#include "pris/image.hpp"

#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <memory>
#include <string>

#include "pris/error.hpp"
#include "pris/gaf.hpp"

namespace pris {

namespace {

struct FileCloser {
    void operator()(std::FILE* f) const noexcept {
        if (f) std::fclose(f);
    }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

std::string lower_extension(const std::filesystem::path& path) {
    auto ext = path.extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
    return ext;
}

Image8 to_rgb(Image8 in) {
    if (in.channels == 3) return in;
    Image8 out(in.width, in.height, 3);
    for (int y = 0; y < in.height; ++y) {
        for (int x = 0; x < in.width; ++x) {
            for (int c = 0; c < 3; ++c) {
                // gray, gray+alpha, rgba
                const int src = in.channels >= 3 ? c : 0;
                out.at(y, x, c) = in.at(y, x, src);
            }
        }
    }
    return out;
}

Image8 read_png(const std::filesystem::path& path) {
    FilePtr file(std::fopen(path.c_str(), "rb"));
    if (!file) throw DataError("cannot open image " + path.string());

    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_stdio(&image, file.get())) {
        throw DataError("cannot decode PNG " + path.string() + ": " + image.message);
    }
    image.format = PNG_FORMAT_RGB;
    Image8 out(static_cast<int>(image.width), static_cast<int>(image.height), 3);
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        const std::string msg = image.message;
        png_image_free(&image);
        throw DataError("cannot decode PNG " + path.string() + ": " + msg);
    }
    return out;
}

// Binary P5/P6 with maxval <= 255.
Image8 read_pnm(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open image " + path.string());
    auto next_token = [&]() {
        std::string tok;
        char ch;
        while (in.get(ch)) {
            if (ch == '#') {
                std::string skip;
                std::getline(in, skip);
            } else if (std::isspace(static_cast<unsigned char>(ch))) {
                if (!tok.empty()) break;
            } else {
                tok.push_back(ch);
            }
        }
        return tok;
    };
    const auto magic = next_token();
    if (magic != "P5" && magic != "P6") throw DataError(path.string() + ": only binary P5/P6 PNM is supported");
    int w = 0, h = 0, maxval = 0;
    try {
        w = std::stoi(next_token());
        h = std::stoi(next_token());
        maxval = std::stoi(next_token());
    } catch (const std::exception&) {
        throw DataError(path.string() + ": malformed PNM header");
    }
    if (w <= 0 || h <= 0 || maxval <= 0 || maxval > 255) throw DataError(path.string() + ": unsupported PNM header");
    Image8 img(w, h, magic == "P6" ? 3 : 1);
    in.read(reinterpret_cast<char*>(img.pixels.data()), static_cast<std::streamsize>(img.pixels.size()));
    if (!in) throw DataError(path.string() + ": truncated PNM data");
    return to_rgb(std::move(img));
}

}  // namespace

bool is_supported_image(const std::filesystem::path& path) {
    const auto ext = lower_extension(path);
    return ext == ".png" || ext == ".ppm" || ext == ".pgm" || ext == ".pnm";
}

Image8 read_image(const std::filesystem::path& path) {
    if (!std::filesystem::exists(path)) throw DataError("image not found: " + path.string());
    const auto ext = lower_extension(path);
    if (ext == ".png") return read_png(path);
    if (ext == ".ppm" || ext == ".pgm" || ext == ".pnm") return read_pnm(path);
    throw DataError("unsupported image format: " + path.string() + " (expected lossless PNG or PNM)");
}

void write_png(const std::filesystem::path& path, const Image8& img) {
    if (img.channels != 1 && img.channels != 3) throw DataError("write_png: expected 1 or 3 channels");
    if (img.pixels.size() != static_cast<std::size_t>(img.width) * img.height * img.channels) {
        throw DataError("write_png: pixel buffer size does not match dims");
    }
    png_image image{};
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, img.pixels.data(), 0, nullptr)) {
        throw DataError("cannot write PNG " + path.string() + ": " + image.message);
    }
}

torch::Tensor to_tensor(const Image8& image) {
    auto hwc = torch::from_blob(const_cast<std::uint8_t*>(image.pixels.data()),
                                {image.height, image.width, image.channels}, torch::kUInt8);
    return hwc.permute({2, 0, 1}).unsqueeze(0).to(torch::kFloat32).div(255.0).contiguous();
}

Image8 to_image8(const torch::Tensor& t) {
    auto chw = t.dim() == 4 ? t.squeeze(0) : t;
    if (chw.dim() != 3) throw DimensionError("to_image8: expected (1, C, H, W) or (C, H, W)");
    const auto q = quantize_8bit(chw.detach().to(torch::kCPU).clamp(0.0, 1.0)).mul(255.0).round();
    const auto hwc = q.permute({1, 2, 0}).to(torch::kUInt8).contiguous();
    Image8 out(static_cast<int>(chw.size(2)), static_cast<int>(chw.size(1)), static_cast<int>(chw.size(0)));
    std::copy_n(hwc.data_ptr<std::uint8_t>(), out.pixels.size(), out.pixels.begin());
    return out;
}

Image8 crop(const Image8& image, int x0, int y0, int width, int height) {
    if (x0 < 0 || y0 < 0 || width <= 0 || height <= 0 || x0 + width > image.width || y0 + height > image.height) {
        throw DataError("crop window outside the image");
    }
    Image8 out(width, height, image.channels);
    const auto row = static_cast<std::size_t>(width) * image.channels;
    for (int y = 0; y < height; ++y) {
        const auto* src = &image.pixels[(static_cast<std::size_t>(y0 + y) * image.width + x0) * image.channels];
        std::copy_n(src, row, &out.pixels[static_cast<std::size_t>(y) * row]);
    }
    return out;
}

Image8 center_crop(const Image8& image, int width, int height) {
    return crop(image, (image.width - width) / 2, (image.height - height) / 2, width, height);
}

Image8 crop_to_multiple(const Image8& image, int multiple) {
    const int w = image.width - image.width % multiple;
    const int h = image.height - image.height % multiple;
    if (w == 0 || h == 0) throw DataError("image smaller than " + std::to_string(multiple) + " pixels");
    if (w == image.width && h == image.height) return image;
    return center_crop(image, w, h);
}

}  // namespace pris
