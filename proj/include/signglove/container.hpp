#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "signglove/nn/tensor.hpp"

namespace signglove {

// Shared binary tensor container. Layout, all integers little-endian:
//   magic[4] | version u32 | fingerprint[32] | tensor_count u32 |
//   per tensor: name_len u32, name bytes, rank u32, dims u32[rank],
//               values f64[prod(dims)] |
//   metadata_len u64 | metadata UTF-8 JSON text
// Doubles are written bit-exactly (IEEE-754 words), so save/load round-trips
// are bitwise.
struct TensorContainer {
    std::string magic;  // 4 chars, e.g. "GSC1"
    std::uint32_t version = 1;
    std::array<std::uint8_t, 32> fingerprint{};
    std::vector<std::pair<std::string, nn::Tensor>> tensors;
    std::string metadata_json;

    const nn::Tensor* find(const std::string& name) const;
};

void write_container(const TensorContainer& c, const std::filesystem::path& path);
TensorContainer read_container(const std::filesystem::path& path,
                               const std::string& expected_magic);

// 32-byte digest of an architecture/spec string (four FNV-1a streams with
// distinct seeds). Collision-resistant enough for mismatch detection, which
// is all the fingerprint is for.
std::array<std::uint8_t, 32> fingerprint_of(const std::string& spec);

// `mfcc dump` block: magic "MFC1", dims as 3 x u32 LE, then f32 LE, C-order.
void write_mfcc_dump(const std::filesystem::path& path, const std::vector<double>& values,
                     std::uint32_t d0, std::uint32_t d1, std::uint32_t d2);
std::vector<float> read_mfcc_dump(const std::filesystem::path& path,
                                  std::array<std::uint32_t, 3>& dims_out);

}  // namespace signglove
