#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ltrank/index.hpp"
#include "ltrank/neighbors.hpp"

namespace ltrank {

inline constexpr TermId kNoTerm = 0xffffffffu;

enum class ModelKind {
    dirichlet_sum,      // per-term Dirichlet probabilities, summed in log space
    dirichlet_closed,   // closed ranking form (rank-equivalent to the sum)
    dirichlet_terrier,  // Terrier's variant: length penalty per matched term only
    tlm_mi,             // translation LM with mutual-information probabilities
    wetlm,              // translation LM with cosine translation probabilities
    wetlm_alpha,        // cosine translation with self-translation weight alpha
};

std::optional<ModelKind> parse_model_kind(std::string_view name);
std::string_view model_kind_name(ModelKind kind);

/// True for kinds that score through a translation source.
bool is_translation_kind(ModelKind kind);
/// True for kinds that need a neighbor index.
bool model_uses_neighbors(ModelKind kind);

struct ModelParams {
    ModelKind kind = ModelKind::dirichlet_sum;
    double mu = 44.0;         // Dirichlet smoothing parameter, > 0
    double threshold = 0.7;   // cosine threshold T, in (0, 1]
    double alpha = 0.45;      // self-translation weight, in [0, 1]
    std::uint32_t top_k = 1000;

    void validate() const;  // throws Error(errc::config) on bad values
};

struct Query {
    std::string qid;
    std::vector<std::string> terms;  // preprocessed; duplicates preserved
};

struct ScoredDoc {
    std::string docno;
    double score = 0.0;
    std::uint32_t rank = 0;  // 1-based
};

/// Supplies translation probabilities p_t(w|u) of a query term w given a
/// document term u, materialized as one sparse row per query term.
class TranslationSource {
  public:
    struct Row {
        bool capable = false;  // the term can translate at all
        std::vector<std::pair<TermId, double>> probs;  // ascending collection term id
    };

    virtual ~TranslationSource() = default;
    virtual Row row(const std::string& query_term) const = 0;
};

/// p_t(w|u) = 1 iff w == u. Reduces every translation model to the plain
/// Dirichlet model; used for equivalence checks.
class IdentityTranslation final : public TranslationSource {
  public:
    explicit IdentityTranslation(const DirectIndex& index) : index_(&index) {}
    Row row(const std::string& query_term) const override;

  private:
    const DirectIndex* index_;
};

/// p_cos(w|u) = cos(w,u) / Z_u over the thresholded neighborhood of u.
class CosineTranslation : public TranslationSource {
  public:
    CosineTranslation(const DirectIndex& index, const NeighborIndex& neighbors);
    Row row(const std::string& query_term) const override;

  protected:
    const NeighborIndex* neighbors_;
    std::vector<TermId> row_to_collection_;  // neighbor row id -> collection term id
};

/// Cosine translation with controlled self-translation mass:
/// alpha + (1-alpha) p_cos on the diagonal, (1-alpha) p_cos elsewhere.
class AlphaCosineTranslation final : public CosineTranslation {
  public:
    AlphaCosineTranslation(const DirectIndex& index, const NeighborIndex& neighbors, double alpha);
    Row row(const std::string& query_term) const override;

  private:
    double alpha_;
};

/// Mutual-information translation probabilities estimated from binary
/// document-presence counts. Candidates for a term are the terms it
/// co-occurs with in at least one document. Row normalizers are memoized;
/// safe for concurrent use.
class MiTranslation final : public TranslationSource {
  public:
    explicit MiTranslation(const DirectIndex& index) : index_(&index) {}
    Row row(const std::string& query_term) const override;

  private:
    const DirectIndex* index_;
    mutable std::unordered_map<TermId, double> normalizer_cache_;
    mutable std::mutex mutex_;

    double normalizer_for(TermId u) const;
};

// --- per-term reference operations -------------------------------------------

/// Dirichlet-smoothed term probability:
/// (|d|/(mu+|d|)) c(w,d)/|d| + (mu/(mu+|d|)) p(w|C).
double dirichlet_term_prob(std::string_view term, const Document& doc, const DirectIndex& index,
                           double mu);

/// cos(query,doc_term)/Z_{doc_term} when the pair cleared the threshold,
/// else 0.
double cos_translation_prob(std::string_view query_term, std::string_view doc_term,
                            const NeighborIndex& neighbors);

double alpha_translation_prob(std::string_view query_term, std::string_view doc_term,
                              const NeighborIndex& neighbors, double alpha);

/// Mutual information over document-presence indicator variables; cells
/// with zero probability contribute nothing.
double mi_score(const DirectIndex& index, std::string_view w, std::string_view u);

/// I(w,u) normalized over u's co-occurrence candidates. An all-zero
/// denominator degenerates to the identity translation.
double mi_translation_prob(const DirectIndex& index, std::string_view w, std::string_view u);

/// p_t(q|theta_d) = sum over document terms of p_t(q|u) c(u,d)/|d|.
double translation_doc_prob(const TranslationSource::Row& row, const Document& doc);

/// Translation term probability with the piecewise fallback: the Dirichlet
/// mixture when the term can translate and has collection mass, the bare
/// translation probability when it is out of collection, the bare collection
/// probability when it cannot translate, and 0 (skip) otherwise.
double tlm_term_prob(std::string_view term, const Document& doc, const DirectIndex& index, double mu,
                     const TranslationSource& source);

/// tlm_term_prob with the cosine (or alpha-adjusted cosine) source chosen by
/// params.kind.
double wetlm_term_prob(std::string_view term, const Document& doc, const DirectIndex& index,
                       const NeighborIndex& neighbors, const ModelParams& params);

// --- whole-query scoring ------------------------------------------------------

struct RankOutcome {
    std::vector<ScoredDoc> docs;
    bool empty_query = false;      // no terms survived preprocessing
    bool no_usable_terms = false;  // every term skipped; all scores zero
};

/// Scores documents for one model configuration against a fixed index.
/// Immutable and safe to share across query workers.
class Scorer {
  public:
    Scorer(const DirectIndex& index, const ModelParams& params,
           const NeighborIndex* neighbors = nullptr);
    /// Test hook: score a translation kind through an explicit source.
    Scorer(const DirectIndex& index, const ModelParams& params,
           std::shared_ptr<const TranslationSource> source);

    const ModelParams& params() const { return params_; }

    /// One score per document, in document-table order.
    std::vector<double> score_all(const Query& query) const;

    /// Scores every document, orders by descending score with ties broken by
    /// ascending docno, truncates to top_k.
    RankOutcome rank(const Query& query) const;

    /// Reference single-document score (same value score_all assigns).
    double score_document(const Query& query, const Document& doc) const;

  private:
    static constexpr std::size_t kNoRow = static_cast<std::size_t>(-1);

    struct TermPlan {
        TermId id = kNoTerm;
        double p_collection = 0.0;
        std::size_t row_index = kNoRow;
    };
    struct QueryPlan {
        std::vector<TermPlan> occurrences;
        std::size_t in_collection = 0;  // occurrences with collection mass
        std::size_t usable = 0;         // occurrences that can ever contribute
        std::vector<TranslationSource::Row> rows;  // one per distinct translating term
    };

    QueryPlan make_plan(const Query& query) const;
    double score_one(const QueryPlan& plan, const Document& doc) const;

    const DirectIndex* index_;
    ModelParams params_;
    std::shared_ptr<const TranslationSource> source_;
};

/// Log-sum score of one document under params.kind (closed forms for the
/// closed/Terrier kinds).
double rsv_log_sum(const Query& query, const Document& doc, const DirectIndex& index,
                   const ModelParams& params, const NeighborIndex* neighbors = nullptr);

/// Closed Dirichlet ranking form:
/// sum over matched terms of log(1 + c/(mu p(w|C))) + |q| log(mu/(mu+|d|)).
/// |q| counts query term occurrences with collection mass.
double dirichlet_rsv_closed(const Query& query, const Document& doc, const DirectIndex& index,
                            double mu);

/// Terrier's variant: the length penalty is applied once per matched term
/// instead of |q| times.
double terrier_rsv(const Query& query, const Document& doc, const DirectIndex& index, double mu);

/// Convenience wrapper over Scorer::rank.
RankOutcome rank_documents(const Query& query, const DirectIndex& index,
                           const NeighborIndex* neighbors, const ModelParams& params);

/// Reads a query file: either TREC-style <top> records (<num>, <title>) or
/// plain "qid title text" lines. Titles are preprocessed with the stop list.
std::vector<Query> read_queries(std::istream& in, const StopList& stoplist);
std::vector<Query> read_queries_file(const std::string& path, const StopList& stoplist);

}  // namespace ltrank
