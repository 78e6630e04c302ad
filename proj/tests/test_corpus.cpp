#include <doctest.h>

#include "keynmf/corpus.hpp"
#include "test_util.hpp"

using namespace keynmf;

namespace {

void write_corpus(const std::filesystem::path& path, const std::string& content) {
    write_file(path, content);
}

}  // namespace

TEST_CASE("ingest_jsonl maps fields directly") {
    test::TempDir dir("ingest");
    auto path = dir.path() / "corpus.jsonl";
    write_corpus(path,
                 R"({"id":"a","text":"你好","timestamp":"2024-05-01T00:15:00Z","source":"s"})"
                 "\n");
    auto docs = ingest_jsonl(path);
    REQUIRE(docs.size() == 1);
    CHECK(docs[0].id == "a");
    CHECK(docs[0].text == "你好");
    CHECK(docs[0].source == "s");
    CHECK(format_iso8601(docs[0].timestamp) == "2024-05-01T00:15:00Z");
}

TEST_CASE("ingest_jsonl rejects duplicate ids") {
    test::TempDir dir("ingest-dup");
    auto path = dir.path() / "corpus.jsonl";
    write_corpus(path,
                 R"({"id":"a","text":"x","timestamp":"2024-05-01T00:00:00Z","source":"s"})"
                 "\n"
                 R"({"id":"a","text":"y","timestamp":"2024-05-02T00:00:00Z","source":"s"})"
                 "\n");
    CHECK_THROWS_WITH_AS(ingest_jsonl(path), doctest::Contains("'a'"), Error);
    // same id at distinct scrape times is fine under the (id, timestamp) key
    CHECK(ingest_jsonl(path, DedupePolicy::RejectDuplicateIdTimestamp).size() == 2);
    CHECK(ingest_jsonl(path, DedupePolicy::KeepFirstPerId).size() == 1);
}

TEST_CASE("ingest_jsonl empty file and error lines") {
    test::TempDir dir("ingest-err");
    auto empty = dir.path() / "empty.jsonl";
    write_corpus(empty, "");
    CHECK(ingest_jsonl(empty).empty());

    auto bad = dir.path() / "bad.jsonl";
    write_corpus(bad,
                 R"({"id":"a","text":"x","timestamp":"2024-05-01T00:00:00Z","source":"s"})"
                 "\n{not json\n");
    CHECK_THROWS_WITH_AS(ingest_jsonl(bad), doctest::Contains("line 2"), Error);

    auto bad_ts = dir.path() / "badts.jsonl";
    write_corpus(bad_ts, R"({"id":"a","text":"x","timestamp":"yesterday","source":"s"})"
                         "\n");
    CHECK_THROWS_AS(ingest_jsonl(bad_ts), Error);
}

TEST_CASE("unicode tokenizer removes stopwords and punctuation") {
    auto doc = make_document("d", "the quick fox", 0, "s");
    auto tokens = tokenize(doc, Segmenter::unicode(), {"the"}).tokens;
    CHECK(tokens == std::vector<std::string>{"quick", "fox"});

    auto doc2 = make_document("d2", "The QUICK, fox!! ... fox", 0, "s");
    auto tokens2 = tokenize(doc2, Segmenter::unicode(), {"the"}).tokens;
    CHECK(tokens2 == std::vector<std::string>{"quick", "fox", "fox"});
}

TEST_CASE("document construction rejects empty text") {
    CHECK_THROWS_AS(make_document("d", "", 0, "s"), Error);
    CHECK_THROWS_AS(make_document("d", "   \t", 0, "s"), Error);
    CHECK_THROWS_AS(make_document("", "x", 0, "s"), Error);
}

TEST_CASE("dictionary segmenter greedy longest match") {
    auto seg = Segmenter::dictionary({"中国", "新闻", "中"});
    auto doc = make_document("d", "中国新闻", 0, "s");
    CHECK(tokenize(doc, seg, {}).tokens == std::vector<std::string>{"中国", "新闻"});
}

TEST_CASE("dictionary segmenter rejects empty lexicon") {
    CHECK_THROWS_AS(Segmenter::dictionary({}), Error);
}

TEST_CASE("dictionary segmentation concatenates back to the input") {
    // property: random texts over a small alphabet, random lexicons
    std::vector<std::string> alphabet = {"中", "国", "新", "闻", "网", "人"};
    SplitMix64 rng(7);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<std::string> lexicon;
        for (int i = 0; i < 5; ++i) {
            std::string entry;
            int len = 1 + static_cast<int>(rng.next_u64() % 3);
            for (int j = 0; j < len; ++j) entry += alphabet[rng.next_u64() % alphabet.size()];
            lexicon.push_back(entry);
        }
        std::string text;
        for (int i = 0; i < 20; ++i) text += alphabet[rng.next_u64() % alphabet.size()];
        auto seg = Segmenter::dictionary(lexicon);
        std::string reassembled;
        for (const auto& token : seg.segment(text)) reassembled += token;
        CHECK(reassembled == text);
    }
}

TEST_CASE("tokenization is deterministic") {
    auto doc = make_document("d", "Alpha beta GAMMA, delta; beta", 0, "s");
    auto a = tokenize(doc, Segmenter::unicode(), {"delta"});
    auto b = tokenize(doc, Segmenter::unicode(), {"delta"});
    CHECK(a.tokens == b.tokens);
}

TEST_CASE("slice_corpus boundaries and gaps") {
    std::int64_t origin = parse_iso8601("2024-05-01T00:00:00Z");
    TimeSliceSpec spec{origin, 6 * 3600};

    SUBCASE("boundary timestamp lands in the next slice") {
        std::vector<Document> docs = {make_document("d1", "x", origin, "s"),
                                      make_document("d2", "x", origin + 6 * 3600, "s")};
        auto slices = slice_corpus(docs, spec);
        REQUIRE(slices.size() == 2);
        CHECK(slices.at(0) == std::vector<std::size_t>{0});
        CHECK(slices.at(1) == std::vector<std::size_t>{1});
    }

    SUBCASE("empty slices are materialized") {
        std::vector<Document> docs = {make_document("d1", "x", origin, "s"),
                                      make_document("d2", "x", origin + 18 * 3600, "s"),
                                      make_document("d3", "x", origin + 13 * 3600, "s")};
        auto slices = slice_corpus(docs, spec);
        REQUIRE(slices.size() == 4);
        CHECK(slices.at(1).empty());
        CHECK(slices.at(2) == std::vector<std::size_t>{2});
    }

    SUBCASE("timestamp before origin is an error") {
        std::vector<Document> docs = {make_document("early", "x", origin - 1, "s")};
        CHECK_THROWS_WITH_AS(slice_corpus(docs, spec), doctest::Contains("early"), Error);
    }
}

TEST_CASE("slice assignment partitions the corpus") {
    std::int64_t origin = parse_iso8601("2024-05-01T00:00:00Z");
    TimeSliceSpec spec{origin, 3600};
    SplitMix64 rng(11);
    std::vector<Document> docs;
    for (int i = 0; i < 200; ++i)
        docs.push_back(make_document("d" + std::to_string(i), "x",
                                     origin + static_cast<std::int64_t>(rng.next_u64() % 100000),
                                     "s"));
    auto slices = slice_corpus(docs, spec);
    std::vector<int> seen(docs.size(), 0);
    for (const auto& [slice, rows] : slices)
        for (auto r : rows) ++seen[r];
    for (int count : seen) CHECK(count == 1);
}
