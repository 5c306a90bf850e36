#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ltrank/embeddings.hpp"

namespace ltrank {

struct Neighbor {
    std::uint32_t term;  // row id of the neighboring term
    double cos;
};

/// Identifies the inputs a neighbor cache was built from.
struct NeighborCacheKey {
    std::uint64_t embedding_hash = 0;
    std::uint64_t vocab_hash = 0;
    double threshold = 0.0;

    bool operator==(const NeighborCacheKey&) const = default;
};

/// Thresholded cosine neighborhoods over the embedded vocabulary: for each
/// term u, every term u' with cos(u', u) >= threshold, always including
/// (u, 1.0), plus the normalizer Z_u summed over that list. Rows are keyed
/// by lexicographic term rank; immutable once built.
class NeighborIndex {
  public:
    double threshold() const { return threshold_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::string& term(std::uint32_t row) const { return terms_[row]; }
    std::optional<std::uint32_t> row_id(std::string_view term) const;

    std::span<const Neighbor> neighbors(std::uint32_t row) const {
        return {rows_[row].data(), rows_[row].size()};
    }
    double normalizer(std::uint32_t row) const { return normalizers_[row]; }

    /// Stored similarity between two terms; 0 when the pair did not clear
    /// the threshold or either term has no row.
    double stored_cos(std::string_view a, std::string_view b) const;

    const NeighborCacheKey& key() const { return key_; }

    void save(const std::string& path) const;
    static NeighborIndex load(const std::string& path);

    /// Reads just the cache key of an existing file; nullopt when the file
    /// is absent or not a neighbor cache.
    static std::optional<NeighborCacheKey> peek_key(const std::string& path);

  private:
    friend NeighborIndex build_neighbor_index(const EmbeddingTable&, const std::vector<std::string>&,
                                              double, unsigned, const NeighborCacheKey&);

    double threshold_ = 0.0;
    NeighborCacheKey key_;
    std::vector<std::string> terms_;
    std::unordered_map<std::string, std::uint32_t> ids_;
    std::vector<std::vector<Neighbor>> rows_;
    std::vector<double> normalizers_;
};

/// Exact brute-force neighborhood construction over vocab ∩ table with
/// 0 < threshold <= 1. Rows are computed in parallel; each row accumulates
/// its normalizer in ascending term order, so the result does not depend on
/// the worker count.
NeighborIndex build_neighbor_index(const EmbeddingTable& table, const std::vector<std::string>& vocab,
                                   double threshold, unsigned workers = 0,
                                   const NeighborCacheKey& key = {});

/// Hash of a vocabulary as used in NeighborCacheKey.
std::uint64_t hash_vocab(const std::vector<std::string>& vocab);

}  // namespace ltrank
