#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "signglove/errors.hpp"

namespace signglove {

// The 11 sign classes in fixed index order: digits 1-5 then letters A-F.
inline constexpr int kNumClasses = 11;
inline constexpr std::array<char, kNumClasses> kClassSymbols = {
    '1', '2', '3', '4', '5', 'A', 'B', 'C', 'D', 'E', 'F'};

class ClassLabel {
public:
    ClassLabel() = default;
    static ClassLabel from_index(int index);
    static ClassLabel from_symbol(char symbol);
    static ClassLabel from_string(const std::string& s);

    int index() const { return index_; }
    char symbol() const { return kClassSymbols[static_cast<std::size_t>(index_)]; }
    std::string str() const { return std::string(1, symbol()); }

    friend bool operator==(ClassLabel a, ClassLabel b) { return a.index_ == b.index_; }
    friend bool operator!=(ClassLabel a, ClassLabel b) { return a.index_ != b.index_; }

private:
    int index_ = 0;
};

// One time step of the glove: thumb, index, middle, ring, little.
inline constexpr std::size_t kNumChannels = 5;
using Frame = std::array<double, kNumChannels>;

struct Recording {
    std::string id;
    ClassLabel label;
    std::vector<Frame> samples;

    std::size_t length() const { return samples.size(); }
};

struct SplitSpec {
    double train_frac = 0.70;
    double val_frac = 0.15;
    double test_frac = 0.15;
    std::uint64_t rng_seed = 0;
};

struct Split {
    std::vector<Recording> train;
    std::vector<Recording> val;
    std::vector<Recording> test;
};

struct QualityReport {
    std::size_t rows_removed = 0;
    std::size_t rows_kept = 0;
};

// CSV ingestion. Comma separated, >=5 numeric columns per row, extra columns
// ignored; an optional single header row is auto-detected (first row with a
// non-numeric cell). Throws MalformedRow / TooFewColumns / EmptyFile.
Recording load_recording(const std::filesystem::path& path, ClassLabel label);

// Writes one frame per row, 5 columns, round-trip exact for representable
// values (17 significant digits).
void save_recording(const Recording& r, const std::filesystem::path& path);

// Drops frames with more than `zero_threshold` exactly-zero channels (the
// dead-sensor rule). Throws AllRowsRemoved when nothing survives.
Recording quality_filter(const Recording& r, QualityReport* report = nullptr,
                         int zero_threshold = 3, double zero_epsilon = 0.0);

// Stratified 70/15/15 split with largest-remainder rounding per class.
// Deterministic for a fixed seed. Throws InsufficientClassData if any class
// has fewer than 3 recordings.
Split stratified_split(const std::vector<Recording>& recordings, const SplitSpec& spec);

struct ManifestEntry {
    std::string relative_path;
    ClassLabel label;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path);
void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& manifest_path);

// Loads a corpus directory. A manifest.txt wins when present; otherwise the
// immediate parent directory of each CSV names the class ("1".."5", "A".."F").
// Quality filtering runs on every recording; recordings whose rows are all
// removed are dropped (sensor failure), counted in `failed_recordings`.
struct Corpus {
    std::vector<Recording> recordings;
    std::size_t rows_removed = 0;
    std::size_t failed_recordings = 0;
};

Corpus load_corpus(const std::filesystem::path& dir, bool apply_quality_filter = true);

}  // namespace signglove
