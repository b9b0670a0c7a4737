#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <set>

#include "signglove/dataset.hpp"
#include "signglove/rng.hpp"

using namespace signglove;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name, const std::string& content) {
    const fs::path p = fs::temp_directory_path() / name;
    std::ofstream out(p);
    out << content;
    return p;
}

Recording make_recording(const std::vector<Frame>& frames, char symbol = '1') {
    Recording r;
    r.id = "test";
    r.label = ClassLabel::from_symbol(symbol);
    r.samples = frames;
    return r;
}

}  // namespace

TEST_CASE("class label bijection is fixed") {
    const char expected[] = {'1', '2', '3', '4', '5', 'A', 'B', 'C', 'D', 'E', 'F'};
    for (int i = 0; i < kNumClasses; ++i) {
        CHECK(ClassLabel::from_index(i).symbol() == expected[i]);
        CHECK(ClassLabel::from_symbol(expected[i]).index() == i);
    }
    CHECK(ClassLabel::from_symbol('b').index() == 6);  // case-insensitive
    CHECK_THROWS_AS(ClassLabel::from_symbol('G'), BadConfig);
    CHECK_THROWS_AS(ClassLabel::from_index(11), BadConfig);
}

TEST_CASE("load_recording parses a plain 3-row file") {
    const auto p = temp_file("sg_rows.csv",
                             "0.1,0.2,0.3,0.4,0.5\n1,2,3,4,5\n-1,-2,-3,-4,-5\n");
    const Recording r = load_recording(p, ClassLabel::from_symbol('A'));
    REQUIRE(r.samples.size() == 3);
    CHECK(r.samples[0][0] == doctest::Approx(0.1));
    CHECK(r.samples[1][4] == 5.0);
    CHECK(r.samples[2][2] == -3.0);
}

TEST_CASE("load_recording reports malformed rows by index") {
    const auto p = temp_file("sg_bad.csv", "1,2,3,4,5\na,b,c,d,e\n");
    try {
        load_recording(p, ClassLabel::from_symbol('1'));
        FAIL("expected MalformedRow");
    } catch (const MalformedRow& e) {
        CHECK(std::string(e.what()).find("row 2") != std::string::npos);
    }
}

TEST_CASE("load_recording keeps the first five of six columns") {
    const auto p = temp_file("sg_six.csv", "1,2,3,4,5,99\n6,7,8,9,10,42\n");
    const Recording r = load_recording(p, ClassLabel::from_symbol('1'));
    REQUIRE(r.samples.size() == 2);
    // Hand parse of the fixture: row-wise first five cells.
    const Frame expect0 = {1, 2, 3, 4, 5};
    const Frame expect1 = {6, 7, 8, 9, 10};
    CHECK(r.samples[0] == expect0);
    CHECK(r.samples[1] == expect1);
}

TEST_CASE("load_recording auto-detects one header row") {
    const auto p = temp_file("sg_hdr.csv", "thumb,index,middle,ring,little\n1,2,3,4,5\n");
    const Recording r = load_recording(p, ClassLabel::from_symbol('1'));
    CHECK(r.samples.size() == 1);
}

TEST_CASE("load_recording error paths") {
    CHECK_THROWS_AS(load_recording(temp_file("sg_few.csv", "1,2,3,4,5\n1,2,3\n"),
                                   ClassLabel::from_symbol('1')),
                    TooFewColumns);
    CHECK_THROWS_AS(load_recording(temp_file("sg_empty.csv", ""),
                                   ClassLabel::from_symbol('1')),
                    EmptyFile);
    // A header alone is still an empty recording.
    CHECK_THROWS_AS(load_recording(temp_file("sg_hdr_only.csv", "a,b,c,d,e\n"),
                                   ClassLabel::from_symbol('1')),
                    EmptyFile);
}

TEST_CASE("quality filter drops frames with more than three zeros") {
    QualityReport qr;
    const Recording r = make_recording({
        {0, 0, 0, 0, 0.2},    // 4 zeros -> removed
        {0, 0, 0, 1.1, 0.2},  // exactly 3 zeros -> kept
        {1, 2, 3, 4, 5},
    });
    const Recording filtered = quality_filter(r, &qr);
    CHECK(filtered.samples.size() == 2);
    CHECK(qr.rows_removed == 1);
    CHECK(filtered.samples[0][3] == 1.1);
}

TEST_CASE("quality filter counts removals on a 10-frame recording") {
    std::vector<Frame> frames(10, Frame{1, 1, 1, 1, 1});
    frames[2] = {0, 0, 0, 0, 1};
    frames[7] = {0, 0, 0, 0, 0};
    QualityReport qr;
    const Recording filtered = quality_filter(make_recording(frames), &qr);
    CHECK(filtered.samples.size() == 8);
    CHECK(qr.rows_removed == 2);
    CHECK(qr.rows_kept == 8);
}

TEST_CASE("quality filter is idempotent") {
    Rng rng(7);
    std::vector<Frame> frames;
    for (int i = 0; i < 50; ++i) {
        Frame f;
        for (auto& v : f) v = rng.uniform() < 0.4 ? 0.0 : rng.gaussian();
        frames.push_back(f);
    }
    try {
        const Recording once = quality_filter(make_recording(frames));
        const Recording twice = quality_filter(once);
        CHECK(once.samples == twice.samples);
    } catch (const AllRowsRemoved&) {
        // Possible under this noise model; idempotence is vacuous then.
    }
}

TEST_CASE("quality filter signals a dead recording") {
    CHECK_THROWS_AS(quality_filter(make_recording({{0, 0, 0, 0, 0}})), AllRowsRemoved);
}

TEST_CASE("save/load recording round-trips frames bit-for-bit") {
    Rng rng(3);
    std::vector<Frame> frames;
    for (int i = 0; i < 20; ++i) {
        Frame f;
        for (auto& v : f) v = rng.gaussian(0.0, 2.3);
        frames.push_back(f);
    }
    const Recording r = make_recording(frames, 'C');
    const fs::path p = fs::temp_directory_path() / "sg_roundtrip.csv";
    save_recording(r, p);
    const Recording back = load_recording(p, r.label);
    REQUIRE(back.samples.size() == r.samples.size());
    for (std::size_t i = 0; i < frames.size(); ++i)
        for (std::size_t c = 0; c < kNumChannels; ++c)
            CHECK(back.samples[i][c] == r.samples[i][c]);
}

TEST_CASE("stratified split: 20 recordings of one class give 14/3/3") {
    std::vector<Recording> recs;
    for (int i = 0; i < 20; ++i) {
        auto r = make_recording({{1, 2, 3, 4, 5}});
        r.id = "r" + std::to_string(i);
        recs.push_back(r);
    }
    SplitSpec spec;
    spec.rng_seed = 11;
    const Split s = stratified_split(recs, spec);
    CHECK(s.train.size() == 14);
    CHECK(s.val.size() == 3);
    CHECK(s.test.size() == 3);
}

TEST_CASE("stratified split is deterministic per seed and seed-sensitive") {
    std::vector<Recording> recs;
    for (int cls = 0; cls < kNumClasses; ++cls)
        for (int i = 0; i < 10; ++i) {
            auto r = make_recording({{1, 2, 3, 4, 5}}, kClassSymbols[cls]);
            r.id = std::string(1, kClassSymbols[cls]) + std::to_string(i);
            recs.push_back(r);
        }
    SplitSpec spec;
    spec.rng_seed = 5;
    const Split a = stratified_split(recs, spec);
    const Split b = stratified_split(recs, spec);
    auto ids = [](const std::vector<Recording>& v) {
        std::vector<std::string> out;
        for (const auto& r : v) out.push_back(r.id);
        return out;
    };
    CHECK(ids(a.train) == ids(b.train));
    CHECK(ids(a.val) == ids(b.val));
    CHECK(ids(a.test) == ids(b.test));

    spec.rng_seed = 6;
    const Split c = stratified_split(recs, spec);
    CHECK(c.train.size() == a.train.size());
    CHECK(c.val.size() == a.val.size());
    CHECK(ids(c.train) != ids(a.train));  // high probability under reseeding
}

TEST_CASE("stratified split partitions exactly") {
    Rng rng(99);
    std::vector<Recording> recs;
    for (int cls = 0; cls < kNumClasses; ++cls) {
        const int n = 3 + static_cast<int>(rng.uniform_int(0, 14));
        for (int i = 0; i < n; ++i) {
            auto r = make_recording({{1, 2, 3, 4, 5}}, kClassSymbols[cls]);
            r.id = std::string(1, kClassSymbols[cls]) + "_" + std::to_string(i);
            recs.push_back(r);
        }
    }
    SplitSpec spec;
    spec.rng_seed = 123;
    const Split s = stratified_split(recs, spec);
    std::set<std::string> seen;
    for (const auto* bucket : {&s.train, &s.val, &s.test})
        for (const auto& r : *bucket) CHECK(seen.insert(r.id).second);
    CHECK(seen.size() == recs.size());
}

TEST_CASE("stratified split needs three recordings per class") {
    std::vector<Recording> recs = {make_recording({{1, 2, 3, 4, 5}}, '1'),
                                   make_recording({{1, 2, 3, 4, 5}}, '1')};
    CHECK_THROWS_AS(stratified_split(recs, SplitSpec{}), InsufficientClassData);
}

TEST_CASE("manifest round-trip and corpus loading by manifest") {
    const fs::path dir = fs::temp_directory_path() / "sg_corpus";
    fs::create_directories(dir / "1");
    {
        std::ofstream out(dir / "1" / "a.csv");
        out << "1,2,3,4,5\n2,3,4,5,6\n";
    }
    write_manifest({{"1/a.csv", ClassLabel::from_symbol('3')}}, dir / "manifest.txt");
    const Corpus corpus = load_corpus(dir);
    REQUIRE(corpus.recordings.size() == 1);
    // Manifest label (3) wins over the directory name (1).
    CHECK(corpus.recordings[0].label.symbol() == '3');
    fs::remove_all(dir);
}

TEST_CASE("corpus loading falls back to directory labels") {
    const fs::path dir = fs::temp_directory_path() / "sg_corpus_dirs";
    fs::create_directories(dir / "A");
    fs::create_directories(dir / "2");
    {
        std::ofstream out(dir / "A" / "x.csv");
        out << "1,2,3,4,5\n";
        std::ofstream out2(dir / "2" / "y.csv");
        out2 << "5,4,3,2,1\n";
    }
    const Corpus corpus = load_corpus(dir);
    REQUIRE(corpus.recordings.size() == 2);
    CHECK(corpus.recordings[0].label.symbol() == '2');
    CHECK(corpus.recordings[1].label.symbol() == 'A');
    fs::remove_all(dir);
}
