#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "signglove/model.hpp"
#include "signglove/windowing.hpp"

namespace signglove {

inline constexpr const char* kWindowBlockMagic = "GSW1";
inline constexpr const char* kMfccBlockMagic = "GSM1";

// Window block: tensor "data" (n, w, 5), tensor "labels" (n); source ids and
// the normalization mode live in the metadata JSON.
void save_windows(const std::vector<SequenceWindow>& windows,
                  const std::filesystem::path& path, const std::string& extra_meta_json);
std::vector<SequenceWindow> load_windows(const std::filesystem::path& path,
                                         std::string* meta_out = nullptr);

// MFCC block: tensor "features" (n, 5, n_frames, n_mfcc), tensor "labels" (n).
void save_labeled_set(const LabeledTensorSet& set, const std::filesystem::path& path,
                      const std::string& magic, const std::string& extra_meta_json);
LabeledTensorSet load_labeled_set(const std::filesystem::path& path,
                                  const std::string& magic,
                                  std::string* meta_out = nullptr);

}  // namespace signglove
