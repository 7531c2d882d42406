#include "pris/bitpack.hpp"

#include <array>
#include <cmath>
#include <fstream>

#include "pris/error.hpp"
#include "pris/metrics.hpp"

namespace pris::bitpack {

namespace {

constexpr std::array<char, 4> kMagic{'P', 'R', 'W', '1'};
constexpr double kWideMax = 4294967295.0;  // 2^32 - 1

void put_u32(std::ostream& out, std::uint32_t v) {
    const std::array<char, 4> bytes{static_cast<char>(v & 0xFF), static_cast<char>((v >> 8) & 0xFF),
                                    static_cast<char>((v >> 16) & 0xFF), static_cast<char>((v >> 24) & 0xFF)};
    out.write(bytes.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
    std::array<unsigned char, 4> b{};
    in.read(reinterpret_cast<char*>(b.data()), 4);
    if (!in) throw DataError("wide container: truncated file");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) | (static_cast<std::uint32_t>(b[3]) << 24);
}

void require_same_shape(const Image8& a, const Image8& b) {
    if (a.width != b.width || a.height != b.height || a.channels != b.channels) {
        throw DimensionError("bitpack: host and secret shapes differ");
    }
}

}  // namespace

WideContainer pack(const Image8& host, const Image8& secret) {
    require_same_shape(host, secret);
    WideContainer out{host.width, host.height, host.channels, std::vector<std::uint32_t>(host.size())};
    for (std::size_t i = 0; i < host.size(); ++i) out.words[i] = pack_value(host.pixels[i], secret.pixels[i]);
    return out;
}

Image8 unpack(const WideContainer& container) {
    Image8 out(container.width, container.height, container.channels);
    if (out.size() != container.words.size()) throw DimensionError("bitpack: word count does not match dims");
    for (std::size_t i = 0; i < out.size(); ++i) out.pixels[i] = unpack_value(container.words[i]);
    return out;
}

double bound_check(const Image8& host, const Image8& secret) {
    const auto container = pack(host, secret);
    if (container.words.empty()) throw DimensionError("bitpack: empty image");
    double sum = 0.0;
    for (std::size_t i = 0; i < container.words.size(); ++i) {
        const double shifted = static_cast<double>(static_cast<std::uint32_t>(host.pixels[i]) << kHostShift);
        const double d = shifted - static_cast<double>(container.words[i]);
        sum += d * d;
    }
    return psnr_from_mse(sum / static_cast<double>(container.words.size()), kWideMax);
}

double worst_case_bound() noexcept { return 10.0 * std::log10(kWideMax * kWideMax / (255.0 * 255.0)); }

void write_wide(const std::filesystem::path& path, const WideContainer& c) {
    if (c.words.size() != static_cast<std::size_t>(c.width) * c.height * c.channels) {
        throw DataError("wide container: word count does not match dims");
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out.write(kMagic.data(), 4);
    put_u32(out, static_cast<std::uint32_t>(c.width));
    put_u32(out, static_cast<std::uint32_t>(c.height));
    put_u32(out, static_cast<std::uint32_t>(c.channels));
    for (auto w : c.words) put_u32(out, w);
    if (!out) throw DataError("short write to " + path.string());
}

WideContainer read_wide(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    std::array<char, 4> magic{};
    in.read(magic.data(), 4);
    if (!in || magic != kMagic) throw DataError(path.string() + ": not a wide container");
    WideContainer c;
    c.width = static_cast<int>(get_u32(in));
    c.height = static_cast<int>(get_u32(in));
    c.channels = static_cast<int>(get_u32(in));
    if (c.width <= 0 || c.height <= 0 || c.channels <= 0) throw DataError(path.string() + ": bad dims");
    c.words.resize(static_cast<std::size_t>(c.width) * c.height * c.channels);
    for (auto& w : c.words) w = get_u32(in);
    return c;
}

}  // namespace pris::bitpack
