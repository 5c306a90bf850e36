#pragma once

#include <cstdint>
#include <istream>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ltrank/text_pipeline.hpp"

namespace ltrank {

using TermId = std::uint32_t;

struct TermCount {
    TermId term;
    std::uint32_t count;
};

/// One corpus record: distinct term counts (ascending term id) plus the
/// total token count. length always equals the sum of counts.
struct Document {
    std::string docno;
    std::vector<TermCount> counts;
    std::uint64_t length = 0;

    /// Occurrences of a term in this document; 0 when absent.
    std::uint32_t count_of(TermId term) const;
};

/// Collection-level statistics, indexed by term id.
struct CollectionStats {
    std::vector<std::uint64_t> term_counts;   // c(w, C)
    std::vector<std::uint32_t> doc_presence;  // number of documents containing w
    std::uint64_t total_tokens = 0;           // |C|
    std::uint32_t doc_count = 0;
    double avdl = 0.0;
};

struct PairPresence {
    std::uint32_t n_w = 0;
    std::uint32_t n_u = 0;
    std::uint32_t n_wu = 0;
    std::uint32_t n_docs = 0;
};

/// Direct (non-inverted) in-memory index: per-document term counts scanned
/// exhaustively at query time, plus collection statistics. Term ids are
/// positions in the lexicographically sorted dictionary. Immutable once
/// built; safe for concurrent reads.
class DirectIndex {
  public:
    std::size_t vocab_size() const { return terms_.size(); }
    const std::vector<std::string>& terms() const { return terms_; }
    const std::string& term(TermId id) const { return terms_[id]; }
    std::optional<TermId> term_id(std::string_view term) const;

    const std::vector<Document>& documents() const { return docs_; }
    const CollectionStats& stats() const { return stats_; }

    /// Maximum-likelihood collection probability c(term, C) / |C|;
    /// 0 for unknown terms.
    double collection_prob(std::string_view term) const;
    double collection_prob(TermId id) const;

    /// Document-presence counts used by the mutual-information estimator:
    /// documents containing w, containing u, containing both, and the total.
    /// Computed on demand by scanning the document table.
    PairPresence pair_presence(std::string_view w, std::string_view u) const;

    void save(const std::string& path) const;
    static DirectIndex load(const std::string& path);

  private:
    friend class IndexBuilder;

    std::vector<std::string> terms_;
    std::unordered_map<std::string, TermId> term_ids_;
    std::vector<Document> docs_;
    CollectionStats stats_;

    void rebuild_stats();
};

/// Accumulates preprocessed documents, then produces a DirectIndex with a
/// sorted dictionary and recomputed statistics. Duplicate docnos are
/// rejected; a document with no surviving tokens is kept with length 0.
class IndexBuilder {
  public:
    void add_document(std::string docno, std::span<const std::string> tokens);
    DirectIndex build();

  private:
    std::vector<std::string> build_terms_;
    std::unordered_map<std::string, TermId> build_ids_;
    std::vector<Document> docs_;
    std::unordered_map<std::string, std::uint32_t> seen_docnos_;
};

/// Parses a TREC-style collection: <DOC> records holding a <DOCNO> tag.
/// Tag names are case-insensitive and may carry surrounding whitespace
/// inside the brackets. All text inside <DOC> except the DOCNO value is
/// concatenated, stripped of markup, and preprocessed. Malformed input
/// (missing or duplicate DOCNO, unbalanced tags) raises an error naming
/// the byte offset and the docno context.
DirectIndex ingest_trec(std::istream& in, const StopList& stoplist);
DirectIndex ingest_trec_file(const std::string& path, const StopList& stoplist);

}  // namespace ltrank
