#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signglove/augment.hpp"
#include "signglove/mfcc.hpp"
#include "signglove/model.hpp"
#include "signglove/synth.hpp"

namespace signglove {

// Fully resolved run configuration: one root seed plus every module's
// parameter set. Parsed from a flat `key = value` file with dotted sections;
// CLI flags override file values; unknown keys are rejected.
struct RunConfig {
    std::uint64_t seed = 0;

    std::size_t window_size = 50;
    bool per_sequence_norm = true;

    SplitSpec split;
    MfccConfig mfcc;
    AugmentConfig augment;
    bool augment_validation = true;

    std::string model = "multibranch";  // multibranch | simplenn | knn
    TrainConfig train;
    std::size_t knn_k = 5;
    std::size_t knn_folds = 5;
    SynthConfig synth;

    // Applies one dotted key. Throws BadConfig for unknown keys or bad values.
    void set(const std::string& key, const std::string& value);

    // Canonical serialization: every key in fixed order, one per line.
    std::string serialize() const;
    std::string hash() const;  // FNV-1a 64 over the serialization, hex

    void validate() const;

    static RunConfig from_file(const std::filesystem::path& path);
    static RunConfig parse_text(const std::string& text);
    void write_echo(const std::filesystem::path& path) const;
};

}  // namespace signglove
