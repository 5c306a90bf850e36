#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "ltrank/errors.hpp"
#include "ltrank/index.hpp"
#include "support/fixtures.hpp"

using namespace ltrank;

TEST_CASE("two-record fixture counts") {
    DirectIndex index = test::tiny_index();
    CHECK(index.stats().doc_count == 2);
    CHECK(index.stats().total_tokens == 5);
    CHECK(index.vocab_size() == 3);
    CHECK(index.stats().avdl == doctest::Approx(2.5));

    auto a = index.term_id("a");
    REQUIRE(a.has_value());
    CHECK(index.stats().term_counts[*a] == 2);
    CHECK(index.stats().doc_presence[*a] == 1);
    CHECK(index.documents()[0].count_of(*a) == 2);
    CHECK(index.documents()[1].count_of(*a) == 0);
}

TEST_CASE("collection_prob") {
    DirectIndex index = test::tiny_index();
    CHECK(index.collection_prob("a") == doctest::Approx(0.4).epsilon(1e-12));
    CHECK(index.collection_prob("zebra") == 0.0);

    DirectIndex single = test::make_index({{"d1", "only only"}});
    CHECK(single.collection_prob("only") == 1.0);
}

TEST_CASE("collection probabilities sum to one over the vocabulary") {
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        auto corpus = test::random_corpus(rng, 30, 120);
        double sum = 0.0;
        for (TermId id = 0; id < corpus.index.vocab_size(); ++id) {
            sum += corpus.index.collection_prob(id);
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("pair_presence") {
    DirectIndex index = test::tiny_index();

    PairPresence wb = index.pair_presence("b", "a");
    CHECK(wb.n_w == 2);
    CHECK(wb.n_u == 1);
    CHECK(wb.n_wu == 1);
    CHECK(wb.n_docs == 2);

    PairPresence self = index.pair_presence("b", "b");
    CHECK(self.n_w == self.n_u);
    CHECK(self.n_w == self.n_wu);

    PairPresence disjoint = index.pair_presence("a", "c");
    CHECK(disjoint.n_wu == 0);

    PairPresence unknown = index.pair_presence("a", "zebra");
    CHECK(unknown.n_u == 0);
    CHECK(unknown.n_wu == 0);
}

TEST_CASE("ingest_trec parses records and preprocesses text") {
    std::istringstream in(
        "<DOC>\n<DOCNO> d1 </DOCNO>\n<TEXT>A b, a!</TEXT>\n</DOC>\n"
        "< doc >\n< docno >d2</ docno >\nb c\n</ doc >\n");
    DirectIndex index = ingest_trec(in, StopList{});
    CHECK(index.stats().doc_count == 2);
    CHECK(index.stats().total_tokens == 5);
    CHECK(index.documents()[0].docno == "d1");
    CHECK(index.documents()[1].docno == "d2");
    CHECK(index.vocab_size() == 3);
    CHECK(!index.term_id("text").has_value());  // markup never becomes a token
    CHECK(!index.term_id("d2").has_value());    // docno text is not indexed
}

TEST_CASE("ingest_trec keeps empty documents with length zero") {
    std::istringstream in("<DOC><DOCNO>d1</DOCNO>the the the</DOC>");
    DirectIndex index = ingest_trec(in, StopList{"the"});
    CHECK(index.stats().doc_count == 1);
    CHECK(index.documents()[0].length == 0);
    CHECK(index.vocab_size() == 0);
}

TEST_CASE("ingest_trec on an empty stream") {
    std::istringstream in("");
    DirectIndex index = ingest_trec(in, StopList{});
    CHECK(index.stats().doc_count == 0);
    CHECK(index.stats().avdl == 0.0);
}

TEST_CASE("ingest_trec rejects malformed records with byte offsets") {
    auto ingest = [](const std::string& text) {
        std::istringstream in(text);
        return ingest_trec(in, StopList{});
    };
    CHECK_THROWS_WITH_AS(ingest("<DOC>no docno here</DOC>"),
                         doctest::Contains("record has no <DOCNO>"), Error);
    CHECK_THROWS_WITH_AS(ingest("<DOC><DOCNO>d1</DOCNO>text"),
                         doctest::Contains("without matching </DOC>"), Error);
    CHECK_THROWS_WITH_AS(ingest("<DOC><DOCNO>d1</DOCNO>x</DOC><DOC><DOCNO>d1</DOCNO>y</DOC>"),
                         doctest::Contains("duplicate DOCNO"), Error);
    CHECK_THROWS_WITH_AS(ingest("<DOC><DOCNO>a</DOCNO><DOC></DOC>"),
                         doctest::Contains("nested <DOC>"), Error);
    CHECK_THROWS_WITH_AS(ingest("</DOC>"), doctest::Contains("byte offset 0"), Error);

    try {
        ingest("<DOC><DOCNO>d77</DOCNO>x</DOC>\n<DOC>broken</DOC>");
        FAIL("expected an ingestion error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("d77") != std::string::npos);  // docno context
        CHECK(e.code() == errc::format);
    }
}

TEST_CASE("stats are reproducible from the document table") {
    std::mt19937_64 rng(5);
    auto corpus = test::random_corpus(rng, 50, 200);
    const auto& stats = corpus.index.stats();

    std::vector<std::uint64_t> term_counts(corpus.index.vocab_size(), 0);
    std::vector<std::uint32_t> presence(corpus.index.vocab_size(), 0);
    std::uint64_t total = 0;
    for (const auto& doc : corpus.index.documents()) {
        std::uint64_t length = 0;
        for (const auto& tc : doc.counts) {
            term_counts[tc.term] += tc.count;
            presence[tc.term] += 1;
            length += tc.count;
        }
        CHECK(length == doc.length);
        total += length;
    }
    CHECK(term_counts == stats.term_counts);
    CHECK(presence == stats.doc_presence);
    CHECK(total == stats.total_tokens);
}

TEST_CASE("snapshot round-trip is a fixed point and deterministic") {
    std::mt19937_64 rng(9);
    auto corpus = test::random_corpus(rng, 40, 150);
    const char* path_a = "index_a.ltix";
    const char* path_b = "index_b.ltix";

    corpus.index.save(path_a);
    DirectIndex loaded = DirectIndex::load(path_a);
    CHECK(loaded.vocab_size() == corpus.index.vocab_size());
    CHECK(loaded.stats().total_tokens == corpus.index.stats().total_tokens);
    CHECK(loaded.stats().avdl == corpus.index.stats().avdl);
    CHECK(loaded.documents().size() == corpus.index.documents().size());
    for (std::size_t i = 0; i < loaded.documents().size(); ++i) {
        CHECK(loaded.documents()[i].docno == corpus.index.documents()[i].docno);
        CHECK(loaded.documents()[i].length == corpus.index.documents()[i].length);
    }

    loaded.save(path_b);
    std::ifstream a(path_a, std::ios::binary);
    std::ifstream b(path_b, std::ios::binary);
    std::string bytes_a((std::istreambuf_iterator<char>(a)), std::istreambuf_iterator<char>());
    std::string bytes_b((std::istreambuf_iterator<char>(b)), std::istreambuf_iterator<char>());
    CHECK(bytes_a == bytes_b);
    CHECK(!bytes_a.empty());
    CHECK(bytes_a.substr(0, 4) == "LTIX");

    std::remove(path_a);
    std::remove(path_b);
}

TEST_CASE("snapshot load rejects corrupt files") {
    const char* path = "corrupt.ltix";
    {
        std::ofstream out(path, std::ios::binary);
        out << "LTIXgarbage";
    }
    CHECK_THROWS_AS(DirectIndex::load(path), Error);
    {
        std::ofstream out(path, std::ios::binary);
        out << "NOPE";
    }
    CHECK_THROWS_WITH_AS(DirectIndex::load(path), doctest::Contains("bad magic"), Error);
    std::remove(path);
}
