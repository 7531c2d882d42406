#include "pris/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

#include "pris/error.hpp"

namespace pris {

namespace {

constexpr std::array<char, 8> kMagic{'P', 'R', 'I', 'S', 'C', 'K', 'P', 'T'};

class Writer {
public:
    explicit Writer(std::ostream& out) : out_(out) {}

    void u8(std::uint8_t v) { out_.put(static_cast<char>(v)); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) u8(static_cast<std::uint8_t>((v >> (8 * i)) & 0xFF));
    }
    void i64(std::int64_t v) {
        const auto u = static_cast<std::uint64_t>(v);
        for (int i = 0; i < 8; ++i) u8(static_cast<std::uint8_t>((u >> (8 * i)) & 0xFF));
    }
    void str(const std::string& s) {
        u32(static_cast<std::uint32_t>(s.size()));
        out_.write(s.data(), static_cast<std::streamsize>(s.size()));
    }
    void f32(float f) { u32(std::bit_cast<std::uint32_t>(f)); }

private:
    std::ostream& out_;
};

class Reader {
public:
    Reader(std::istream& in, std::string source) : in_(in), source_(std::move(source)) {}

    std::uint8_t u8() {
        char c;
        if (!in_.get(c)) fail("truncated");
        return static_cast<std::uint8_t>(c);
    }
    std::uint32_t u32() {
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(u8()) << (8 * i);
        return v;
    }
    std::int64_t i64() {
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(u8()) << (8 * i);
        return static_cast<std::int64_t>(v);
    }
    std::string str() {
        const auto n = u32();
        if (n > (1u << 16)) fail("implausible string length");
        std::string s(n, '\0');
        if (!in_.read(s.data(), n)) fail("truncated");
        return s;
    }
    float f32() { return std::bit_cast<float>(u32()); }

    [[noreturn]] void fail(const std::string& what) const {
        throw DataError("checkpoint " + source_ + ": " + what);
    }

private:
    std::istream& in_;
    std::string source_;
};

struct Header {
    ModelConfig config;
    int step_reached = 0;
    std::vector<std::string> sets;
};

Header read_header(Reader& r) {
    std::array<char, 8> magic{};
    for (auto& c : magic) c = static_cast<char>(r.u8());
    if (magic != kMagic) r.fail("bad magic (not a checkpoint)");
    const auto version = r.u32();
    if (version != kCheckpointVersion) r.fail("unsupported format version " + std::to_string(version));

    Header h;
    auto& c = h.config;
    c.inn.n_blocks = static_cast<int>(r.u32());
    c.inn.channels = r.u32();
    c.inn.subnet_layers = static_cast<int>(r.u32());
    c.inn.subnet_growth = static_cast<int>(r.u32());
    c.pre_enhance = r.u8() != 0;
    c.post_enhance = r.u8() != 0;
    const auto domain = r.u8();
    if (domain > 1) r.fail("bad enhance domain");
    c.enhance_domain = domain == 0 ? EnhanceDomain::kSpatial : EnhanceDomain::kFrequency;
    r.u8();
    c.enhance_layers = static_cast<int>(r.u32());
    c.enhance_growth = static_cast<int>(r.u32());
    h.step_reached = static_cast<int>(r.u32());
    if (c.inn.n_blocks < 1 || c.inn.n_blocks > 1024 || c.inn.channels < 1 || c.inn.channels > 64) {
        r.fail("implausible model dims");
    }
    const auto n_sets = r.u32();
    if (n_sets > 4096) r.fail("implausible enhancer set count");
    for (std::uint32_t i = 0; i < n_sets; ++i) h.sets.push_back(r.str());
    return h;
}

}  // namespace

void save_checkpoint(const std::filesystem::path& path, PrisModel& model) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    Writer w(out);
    out.write(kMagic.data(), kMagic.size());
    w.u32(kCheckpointVersion);

    const auto& c = model.config();
    w.u32(static_cast<std::uint32_t>(c.inn.n_blocks));
    w.u32(static_cast<std::uint32_t>(c.inn.channels));
    w.u32(static_cast<std::uint32_t>(c.inn.subnet_layers));
    w.u32(static_cast<std::uint32_t>(c.inn.subnet_growth));
    w.u8(c.pre_enhance ? 1 : 0);
    w.u8(c.post_enhance ? 1 : 0);
    w.u8(c.enhance_domain == EnhanceDomain::kSpatial ? 0 : 1);
    w.u8(0);
    w.u32(static_cast<std::uint32_t>(c.enhance_layers));
    w.u32(static_cast<std::uint32_t>(c.enhance_growth));
    w.u32(static_cast<std::uint32_t>(model.step_reached));

    const auto sets = model.enhancer_sets();
    w.u32(static_cast<std::uint32_t>(sets.size()));
    for (const auto& s : sets) w.str(s);

    const auto params = model.named_parameters();
    w.u32(static_cast<std::uint32_t>(params.size()));
    for (const auto& [name, tensor] : params) {
        w.str(name);
        w.u32(static_cast<std::uint32_t>(tensor.dim()));
        for (auto d : tensor.sizes()) w.i64(d);
        const auto data = tensor.detach().to(torch::kCPU, torch::kFloat32).contiguous();
        const auto* p = data.data_ptr<float>();
        for (std::int64_t i = 0; i < data.numel(); ++i) w.f32(p[i]);
    }
    if (!out) throw DataError("short write to checkpoint " + path.string());
}

ModelConfig peek_checkpoint_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    Reader r(in, path.string());
    return read_header(r).config;
}

PrisModel load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    Reader r(in, path.string());
    const auto header = read_header(r);

    PrisModel model(header.config);
    model.step_reached = header.step_reached;
    for (const auto& s : header.sets) {
        if (s != kDefaultEnhancers) model.clone_enhancers(kDefaultEnhancers, s);
    }

    auto params = model.named_parameters();
    std::map<std::string, torch::Tensor> by_name(params.begin(), params.end());
    const auto n = r.u32();
    if (n != params.size()) {
        r.fail("tensor count " + std::to_string(n) + " does not match model (" + std::to_string(params.size()) + ")");
    }
    torch::NoGradGuard no_grad;
    for (std::uint32_t i = 0; i < n; ++i) {
        const auto name = r.str();
        auto it = by_name.find(name);
        if (it == by_name.end()) r.fail("unexpected tensor '" + name + "'");
        const auto ndim = r.u32();
        if (ndim > 8) r.fail("implausible rank for '" + name + "'");
        std::vector<std::int64_t> dims(ndim);
        for (auto& d : dims) d = r.i64();
        auto& dst = it->second;
        if (!dst.sizes().equals(dims)) r.fail("shape mismatch for '" + name + "'");
        auto buf = torch::empty(dims, torch::kFloat32);
        auto* p = buf.data_ptr<float>();
        for (std::int64_t k = 0; k < buf.numel(); ++k) p[k] = r.f32();
        dst.copy_(buf);
        by_name.erase(it);
    }
    if (!by_name.empty()) r.fail("missing tensor '" + by_name.begin()->first + "'");
    if (in.peek() != std::ifstream::traits_type::eof()) r.fail("trailing bytes after the last tensor");
    return model;
}

std::string checkpoint_hash(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    std::uint64_t h = 0xcbf29ce484222325ull;
    std::array<char, 1 << 16> buf{};
    while (in) {
        in.read(buf.data(), buf.size());
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[static_cast<std::size_t>(i)]);
            h *= 0x100000001b3ull;
        }
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

}  // namespace pris
