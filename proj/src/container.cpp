#include "signglove/container.hpp"

#include <cstring>
#include <fstream>

#include "signglove/errors.hpp"

namespace signglove {

namespace {

void put_u32(std::ostream& out, std::uint32_t v) {
    char b[4];
    for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 4);
}

void put_u64(std::ostream& out, std::uint64_t v) {
    char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((v >> (8 * i)) & 0xff);
    out.write(b, 8);
}

void put_f64(std::ostream& out, double v) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, 8);
    put_u64(out, bits);
}

void put_f32(std::ostream& out, float v) {
    std::uint32_t bits;
    std::memcpy(&bits, &v, 4);
    put_u32(out, bits);
}

std::uint32_t get_u32(std::istream& in) {
    unsigned char b[4];
    in.read(reinterpret_cast<char*>(b), 4);
    if (!in) throw BadFile("container truncated while reading u32");
    return static_cast<std::uint32_t>(b[0]) | (static_cast<std::uint32_t>(b[1]) << 8) |
           (static_cast<std::uint32_t>(b[2]) << 16) |
           (static_cast<std::uint32_t>(b[3]) << 24);
}

std::uint64_t get_u64(std::istream& in) {
    unsigned char b[8];
    in.read(reinterpret_cast<char*>(b), 8);
    if (!in) throw BadFile("container truncated while reading u64");
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
    return v;
}

double get_f64(std::istream& in) {
    const std::uint64_t bits = get_u64(in);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
}

float get_f32(std::istream& in) {
    const std::uint32_t bits = get_u32(in);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
}

}  // namespace

const nn::Tensor* TensorContainer::find(const std::string& name) const {
    for (const auto& [n, t] : tensors)
        if (n == name) return &t;
    return nullptr;
}

void write_container(const TensorContainer& c, const std::filesystem::path& path) {
    if (c.magic.size() != 4) throw BadConfig("container magic must be 4 characters");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadFile("cannot write container: " + path.string());
    out.write(c.magic.data(), 4);
    put_u32(out, c.version);
    out.write(reinterpret_cast<const char*>(c.fingerprint.data()), 32);
    put_u32(out, static_cast<std::uint32_t>(c.tensors.size()));
    for (const auto& [name, tensor] : c.tensors) {
        put_u32(out, static_cast<std::uint32_t>(name.size()));
        out.write(name.data(), static_cast<std::streamsize>(name.size()));
        put_u32(out, static_cast<std::uint32_t>(tensor.rank()));
        for (const std::size_t d : tensor.shape())
            put_u32(out, static_cast<std::uint32_t>(d));
        for (const double v : tensor.values()) put_f64(out, v);
    }
    put_u64(out, c.metadata_json.size());
    out.write(c.metadata_json.data(), static_cast<std::streamsize>(c.metadata_json.size()));
    if (!out) throw BadFile("short write to container: " + path.string());
}

TensorContainer read_container(const std::filesystem::path& path,
                               const std::string& expected_magic) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadFile("cannot open container: " + path.string());
    TensorContainer c;
    char magic[4];
    in.read(magic, 4);
    if (!in) throw BadFile("container truncated: " + path.string());
    c.magic.assign(magic, 4);
    if (!expected_magic.empty() && c.magic != expected_magic)
        throw BadFile("container " + path.string() + " has magic '" + c.magic +
                      "', expected '" + expected_magic + "'");
    c.version = get_u32(in);
    in.read(reinterpret_cast<char*>(c.fingerprint.data()), 32);
    const std::uint32_t count = get_u32(in);
    for (std::uint32_t i = 0; i < count; ++i) {
        const std::uint32_t name_len = get_u32(in);
        std::string name(name_len, '\0');
        in.read(name.data(), name_len);
        const std::uint32_t rank = get_u32(in);
        std::vector<std::size_t> dims(rank);
        std::size_t numel = 1;
        for (std::uint32_t d = 0; d < rank; ++d) {
            dims[d] = get_u32(in);
            numel *= dims[d];
        }
        std::vector<double> values(numel);
        for (std::size_t v = 0; v < numel; ++v) values[v] = get_f64(in);
        if (!in) throw BadFile("container truncated inside tensor " + name);
        c.tensors.emplace_back(std::move(name), nn::Tensor(std::move(dims), std::move(values)));
    }
    const std::uint64_t meta_len = get_u64(in);
    c.metadata_json.resize(meta_len);
    in.read(c.metadata_json.data(), static_cast<std::streamsize>(meta_len));
    if (!in) throw BadFile("container truncated in metadata: " + path.string());
    return c;
}

std::array<std::uint8_t, 32> fingerprint_of(const std::string& spec) {
    std::array<std::uint8_t, 32> digest{};
    constexpr std::uint64_t seeds[4] = {1469598103934665603ULL, 0x9e3779b97f4a7c15ULL,
                                        0xc2b2ae3d27d4eb4fULL, 0x165667b19e3779f9ULL};
    for (int s = 0; s < 4; ++s) {
        std::uint64_t h = seeds[s];
        for (const char ch : spec) {
            h ^= static_cast<unsigned char>(ch);
            h *= 1099511628211ULL;
        }
        h ^= spec.size() * 0x9e3779b97f4a7c15ULL;
        h ^= h >> 33;
        h *= 0xff51afd7ed558ccdULL;
        h ^= h >> 33;
        for (int b = 0; b < 8; ++b)
            digest[static_cast<std::size_t>(s * 8 + b)] =
                static_cast<std::uint8_t>((h >> (8 * b)) & 0xff);
    }
    return digest;
}

void write_mfcc_dump(const std::filesystem::path& path, const std::vector<double>& values,
                     std::uint32_t d0, std::uint32_t d1, std::uint32_t d2) {
    if (values.size() != static_cast<std::size_t>(d0) * d1 * d2)
        throw ShapeMismatch("mfcc dump: value count does not match dims");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw BadFile("cannot write mfcc dump: " + path.string());
    out.write("MFC1", 4);
    put_u32(out, d0);
    put_u32(out, d1);
    put_u32(out, d2);
    for (const double v : values) put_f32(out, static_cast<float>(v));
    if (!out) throw BadFile("short write to mfcc dump: " + path.string());
}

std::vector<float> read_mfcc_dump(const std::filesystem::path& path,
                                  std::array<std::uint32_t, 3>& dims_out) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw BadFile("cannot open mfcc dump: " + path.string());
    char magic[4];
    in.read(magic, 4);
    if (!in || std::string(magic, 4) != "MFC1")
        throw BadFile("not an MFC1 file: " + path.string());
    for (auto& d : dims_out) d = get_u32(in);
    const std::size_t numel =
        static_cast<std::size_t>(dims_out[0]) * dims_out[1] * dims_out[2];
    std::vector<float> values(numel);
    for (std::size_t i = 0; i < numel; ++i) values[i] = get_f32(in);
    if (!in) throw BadFile("mfcc dump truncated: " + path.string());
    return values;
}

}  // namespace signglove
