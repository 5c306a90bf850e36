#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ltrank/index.hpp"

namespace ltrank {

/// Dense word vectors restricted to the vocabulary of interest. All vectors
/// share the same dimension; zero-norm vectors are rejected on insert.
class EmbeddingTable {
  public:
    EmbeddingTable() = default;
    explicit EmbeddingTable(std::uint32_t dim) : dim_(dim) {}

    std::uint32_t dim() const { return dim_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }

    bool contains(std::string_view term) const { return ids_.count(std::string(term)) > 0; }
    std::span<const float> vector(std::string_view term) const;

    /// Inserts a vector; returns false when the term is already present
    /// (first occurrence wins). Throws on dimension mismatch or zero norm.
    bool insert(std::string_view term, std::span<const float> values);

  private:
    std::uint32_t dim_ = 0;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<float> flat_;
};

struct EmbeddingLoadReport {
    std::uint64_t file_entries = 0;      // entries declared by the header
    std::uint64_t kept = 0;              // retained after filtering
    std::uint64_t filtered_out = 0;      // not in the vocabulary filter
    std::uint64_t zero_rejected = 0;     // zero-norm or non-finite vectors
    std::uint64_t lowercase_collisions = 0;  // later duplicates after lowercasing
};

/// Reads the word2vec binary format: an ASCII header line "vocabCount dim",
/// then per entry a space-terminated word followed by dim little-endian
/// 32-bit floats and an optional newline. Words are lowercased; only words
/// in vocab_filter are retained (no filter keeps everything). The first
/// occurrence wins when lowercased words collide.
EmbeddingTable load_word2vec(std::istream& in,
                             const std::optional<std::unordered_set<std::string>>& vocab_filter,
                             EmbeddingLoadReport* report = nullptr);
EmbeddingTable load_word2vec_file(const std::string& path,
                                  const std::optional<std::unordered_set<std::string>>& vocab_filter,
                                  EmbeddingLoadReport* report = nullptr);

/// dot(a,b) / (|a||b|), clamped to [-1, 1]. Throws on dimension mismatch or
/// zero norm.
double cosine(std::span<const double> a, std::span<const double> b);
double cosine(std::span<const float> a, std::span<const float> b);

struct CoverageReport {
    std::uint64_t vocab_types = 0;
    std::uint64_t covered_types = 0;
    std::uint64_t total_tokens = 0;
    std::uint64_t covered_tokens = 0;
    std::uint64_t query_terms = 0;
    std::uint64_t covered_query_terms = 0;
    std::uint64_t queries = 0;
    std::uint64_t uncovered_queries = 0;  // queries with no embedded term

    double type_fraction() const;
    double token_fraction() const;
    double query_term_fraction() const;
    double uncovered_query_fraction() const;
};

/// Embedding coverage of the collection vocabulary (by type and weighted by
/// token occurrences) and of the query terms.
CoverageReport coverage_stats(const EmbeddingTable& table, const DirectIndex& index,
                              const std::vector<std::vector<std::string>>& query_terms);

}  // namespace ltrank
