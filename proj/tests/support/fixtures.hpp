#pragma once

#include <cmath>
#include <cstdio>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "ltrank/embeddings.hpp"
#include "ltrank/index.hpp"
#include "ltrank/models.hpp"
#include "ltrank/text_pipeline.hpp"

namespace ltrank::test {

inline DirectIndex make_index(const std::vector<std::pair<std::string, std::string>>& docs,
                              const StopList& stoplist = {}) {
    IndexBuilder builder;
    for (const auto& [docno, text] : docs) {
        builder.add_document(docno, preprocess(text, stoplist));
    }
    return builder.build();
}

/// Two documents, "a b a" and "b c": totals {a:2, b:2, c:1}, 5 tokens.
inline DirectIndex tiny_index() {
    return make_index({{"d1", "a b a"}, {"d2", "b c"}});
}

/// Embeddings with cos(a,b) = 0.8, cos(a,c) = 0.3, cos(b,c) < 0.
inline EmbeddingTable three_term_table() {
    EmbeddingTable table(2);
    const float cy = static_cast<float>(-std::sqrt(1.0 - 0.3 * 0.3));
    table.insert("a", std::vector<float>{1.0f, 0.0f});
    table.insert("b", std::vector<float>{0.8f, 0.6f});
    table.insert("c", std::vector<float>{0.3f, cy});
    return table;
}

struct RandomCorpus {
    DirectIndex index;
    std::vector<std::string> vocab;
};

inline std::string synthetic_term(std::size_t i) {
    std::string term;
    term.push_back(static_cast<char>('a' + i % 26));
    term += "t" + std::to_string(i);
    return term;
}

inline RandomCorpus random_corpus(std::mt19937_64& rng, std::size_t doc_count, std::size_t vocab_size,
                                  std::size_t min_len = 1, std::size_t max_len = 60) {
    RandomCorpus out;
    out.vocab.reserve(vocab_size);
    for (std::size_t i = 0; i < vocab_size; ++i) out.vocab.push_back(synthetic_term(i));

    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    std::uniform_int_distribution<std::size_t> term_dist(0, vocab_size - 1);
    IndexBuilder builder;
    for (std::size_t d = 0; d < doc_count; ++d) {
        std::size_t len = len_dist(rng);
        std::vector<std::string> tokens;
        tokens.reserve(len);
        for (std::size_t i = 0; i < len; ++i) tokens.push_back(out.vocab[term_dist(rng)]);
        char buf[24];
        std::snprintf(buf, sizeof(buf), "D%06zu", d);
        builder.add_document(buf, tokens);
    }
    out.index = builder.build();
    out.vocab = out.index.terms();  // terms that actually occur
    return out;
}

/// Random unit-ish vectors; clustered = true draws terms around a few
/// centers so thresholded neighborhoods are non-trivial.
inline EmbeddingTable random_embeddings(std::mt19937_64& rng, const std::vector<std::string>& terms,
                                        std::uint32_t dim, bool clustered = false) {
    EmbeddingTable table(dim);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_int_distribution<int> center_dist(0, 7);
    std::vector<std::vector<double>> centers;
    if (clustered) {
        for (int c = 0; c < 8; ++c) {
            std::vector<double> center(dim);
            for (auto& x : center) x = gauss(rng);
            centers.push_back(std::move(center));
        }
    }
    for (const auto& term : terms) {
        std::vector<float> v(dim);
        if (clustered) {
            const auto& center = centers[static_cast<std::size_t>(center_dist(rng))];
            for (std::uint32_t i = 0; i < dim; ++i) {
                v[i] = static_cast<float>(center[i] + 0.25 * gauss(rng));
            }
        } else {
            for (auto& x : v) x = static_cast<float>(gauss(rng));
        }
        table.insert(term, v);
    }
    return table;
}

inline std::vector<Query> random_queries(std::mt19937_64& rng, const std::vector<std::string>& vocab,
                                         std::size_t count, std::size_t min_len = 1,
                                         std::size_t max_len = 4) {
    std::uniform_int_distribution<std::size_t> len_dist(min_len, max_len);
    std::uniform_int_distribution<std::size_t> term_dist(0, vocab.size() - 1);
    std::vector<Query> queries;
    queries.reserve(count);
    for (std::size_t q = 0; q < count; ++q) {
        Query query;
        query.qid = "Q" + std::to_string(q + 1);
        std::size_t len = len_dist(rng);
        for (std::size_t i = 0; i < len; ++i) query.terms.push_back(vocab[term_dist(rng)]);
        queries.push_back(std::move(query));
    }
    return queries;
}

}  // namespace ltrank::test
