#include "signglove/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "signglove/rng.hpp"

namespace signglove {

ClassLabel ClassLabel::from_index(int index) {
    if (index < 0 || index >= kNumClasses)
        throw BadConfig("class index out of range: " + std::to_string(index));
    ClassLabel l;
    l.index_ = index;
    return l;
}

ClassLabel ClassLabel::from_symbol(char symbol) {
    const char up = (symbol >= 'a' && symbol <= 'f')
                        ? static_cast<char>(symbol - 'a' + 'A')
                        : symbol;
    for (int i = 0; i < kNumClasses; ++i)
        if (kClassSymbols[static_cast<std::size_t>(i)] == up) return from_index(i);
    throw BadConfig(std::string("unknown class symbol: ") + symbol);
}

ClassLabel ClassLabel::from_string(const std::string& s) {
    if (s.size() != 1) throw BadConfig("class label must be a single symbol, got: " + s);
    return from_symbol(s[0]);
}

namespace {

bool parse_double(std::string_view cell, double& out) {
    // Trim surrounding whitespace; from_chars wants a bare number.
    std::size_t b = 0, e = cell.size();
    while (b < e && (cell[b] == ' ' || cell[b] == '\t' || cell[b] == '\r')) ++b;
    while (e > b && (cell[e - 1] == ' ' || cell[e - 1] == '\t' || cell[e - 1] == '\r')) --e;
    if (b == e) return false;
    const char* first = cell.data() + b;
    const char* last = cell.data() + e;
    auto [ptr, ec] = std::from_chars(first, last, out);
    return ec == std::errc() && ptr == last && std::isfinite(out);
}

std::vector<std::string_view> split_csv_line(std::string_view line) {
    std::vector<std::string_view> cells;
    std::size_t start = 0;
    while (true) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            cells.push_back(line.substr(start));
            break;
        }
        cells.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
    return cells;
}

bool line_is_blank(std::string_view line) {
    return line.find_first_not_of(" \t\r") == std::string_view::npos;
}

}  // namespace

Recording load_recording(const std::filesystem::path& path, ClassLabel label) {
    std::ifstream in(path);
    if (!in) throw BadFile("cannot open recording: " + path.string());

    Recording rec;
    rec.id = path.stem().string();
    rec.label = label;

    std::string line;
    std::size_t row_index = 0;
    bool first_data_row = true;
    while (std::getline(in, line)) {
        ++row_index;
        if (line_is_blank(line)) continue;
        const auto cells = split_csv_line(line);

        Frame f{};
        bool row_ok = cells.size() >= kNumChannels;
        for (std::size_t c = 0; row_ok && c < kNumChannels; ++c)
            row_ok = parse_double(cells[c], f[c]);

        if (!row_ok) {
            // A non-numeric first row is treated as a header, once.
            if (first_data_row) {
                first_data_row = false;
                continue;
            }
            if (cells.size() < kNumChannels)
                throw TooFewColumns(path.string() + ": row " + std::to_string(row_index) +
                                    " has " + std::to_string(cells.size()) +
                                    " columns, need at least 5");
            throw MalformedRow(path.string() + ": non-numeric cell in row " +
                               std::to_string(row_index));
        }
        first_data_row = false;
        rec.samples.push_back(f);
    }
    if (rec.samples.empty()) throw EmptyFile("no data rows in " + path.string());
    return rec;
}

void save_recording(const Recording& r, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw BadFile("cannot write recording: " + path.string());
    char buf[64];
    for (const Frame& f : r.samples) {
        for (std::size_t c = 0; c < kNumChannels; ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", f[c]);
            out << buf << (c + 1 < kNumChannels ? "," : "\n");
        }
    }
}

Recording quality_filter(const Recording& r, QualityReport* report,
                         int zero_threshold, double zero_epsilon) {
    Recording out;
    out.id = r.id;
    out.label = r.label;
    out.samples.reserve(r.samples.size());
    std::size_t removed = 0;
    for (const Frame& f : r.samples) {
        int zeros = 0;
        for (const double v : f)
            if (std::abs(v) <= zero_epsilon) ++zeros;
        if (zeros > zero_threshold)
            ++removed;
        else
            out.samples.push_back(f);
    }
    if (report) {
        report->rows_removed = removed;
        report->rows_kept = out.samples.size();
    }
    if (out.samples.empty())
        throw AllRowsRemoved("quality filter removed every row of recording " + r.id);
    return out;
}

Split stratified_split(const std::vector<Recording>& recordings, const SplitSpec& spec) {
    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < recordings.size(); ++i)
        by_class[recordings[i].label.index()].push_back(i);

    for (const auto& [cls, members] : by_class)
        if (members.size() < 3)
            throw InsufficientClassData(
                "class " + ClassLabel::from_index(cls).str() + " has only " +
                std::to_string(members.size()) + " recordings, need at least 3");

    Split split;
    Rng rng(derive_seed(spec.rng_seed, "stratified_split"));
    const double fracs[3] = {spec.train_frac, spec.val_frac, spec.test_frac};

    for (auto& [cls, members] : by_class) {
        const auto n = members.size();

        // Largest-remainder apportionment of n over the three buckets.
        std::size_t counts[3];
        double remainders[3];
        std::size_t assigned = 0;
        for (int b = 0; b < 3; ++b) {
            const double exact = fracs[b] * static_cast<double>(n);
            counts[b] = static_cast<std::size_t>(std::floor(exact));
            remainders[b] = exact - std::floor(exact);
            assigned += counts[b];
        }
        std::array<int, 3> order = {0, 1, 2};
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return remainders[a] > remainders[b]; });
        for (std::size_t leftover = n - assigned, i = 0; i < leftover; ++i)
            ++counts[order[i % 3]];

        rng.shuffle(members);
        std::size_t pos = 0;
        for (int b = 0; b < 3; ++b) {
            auto& bucket = (b == 0) ? split.train : (b == 1) ? split.val : split.test;
            for (std::size_t i = 0; i < counts[b]; ++i)
                bucket.push_back(recordings[members[pos++]]);
        }
    }
    return split;
}

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& manifest_path) {
    std::ifstream in(manifest_path);
    if (!in) throw BadFile("cannot open manifest: " + manifest_path.string());
    std::vector<ManifestEntry> entries;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        if (line_is_blank(line) || line[0] == '#') continue;
        const std::size_t comma = line.rfind(',');
        if (comma == std::string::npos)
            throw MalformedRow(manifest_path.string() + ": manifest line " +
                               std::to_string(row) + " is not `path,label`");
        std::string path = line.substr(0, comma);
        std::string label = line.substr(comma + 1);
        while (!label.empty() && (label.back() == '\r' || label.back() == ' '))
            label.pop_back();
        entries.push_back({path, ClassLabel::from_string(label)});
    }
    if (entries.empty()) throw EmptyFile("manifest has no entries: " + manifest_path.string());
    return entries;
}

void write_manifest(const std::vector<ManifestEntry>& entries,
                    const std::filesystem::path& manifest_path) {
    std::ofstream out(manifest_path);
    if (!out) throw BadFile("cannot write manifest: " + manifest_path.string());
    for (const auto& e : entries) out << e.relative_path << "," << e.label.symbol() << "\n";
}

Corpus load_corpus(const std::filesystem::path& dir, bool apply_quality_filter) {
    namespace fs = std::filesystem;
    std::vector<ManifestEntry> entries;

    const fs::path manifest = dir / "manifest.txt";
    if (fs::exists(manifest)) {
        entries = read_manifest(manifest);
    } else {
        // Fall back to directory-name labels: <dir>/<symbol>/*.csv.
        for (const auto& sub : fs::directory_iterator(dir)) {
            if (!sub.is_directory()) continue;
            const std::string name = sub.path().filename().string();
            if (name.size() != 1) continue;
            ClassLabel label;
            try {
                label = ClassLabel::from_string(name);
            } catch (const BadConfig&) {
                continue;
            }
            for (const auto& file : fs::directory_iterator(sub.path()))
                if (file.path().extension() == ".csv")
                    entries.push_back({fs::relative(file.path(), dir).string(), label});
        }
        std::sort(entries.begin(), entries.end(),
                  [](const ManifestEntry& a, const ManifestEntry& b) {
                      return a.relative_path < b.relative_path;
                  });
        if (entries.empty())
            throw EmptyFile("no manifest.txt and no labeled class directories in " +
                            dir.string());
    }

    Corpus corpus;
    for (const auto& e : entries) {
        Recording rec = load_recording(dir / e.relative_path, e.label);
        if (apply_quality_filter) {
            QualityReport qr;
            try {
                rec = quality_filter(rec, &qr);
            } catch (const AllRowsRemoved&) {
                ++corpus.failed_recordings;
                continue;
            }
            corpus.rows_removed += qr.rows_removed;
        }
        corpus.recordings.push_back(std::move(rec));
    }
    return corpus;
}

}  // namespace signglove
