#include "ltrank/models.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ltrank/errors.hpp"

namespace ltrank {

std::optional<ModelKind> parse_model_kind(std::string_view name) {
    if (name == "dirichlet") return ModelKind::dirichlet_sum;
    if (name == "dirichlet-closed") return ModelKind::dirichlet_closed;
    if (name == "dirichlet-terrier") return ModelKind::dirichlet_terrier;
    if (name == "tlm-mi") return ModelKind::tlm_mi;
    if (name == "wetlm") return ModelKind::wetlm;
    if (name == "wetlm-alpha") return ModelKind::wetlm_alpha;
    return std::nullopt;
}

std::string_view model_kind_name(ModelKind kind) {
    switch (kind) {
        case ModelKind::dirichlet_sum: return "dirichlet";
        case ModelKind::dirichlet_closed: return "dirichlet-closed";
        case ModelKind::dirichlet_terrier: return "dirichlet-terrier";
        case ModelKind::tlm_mi: return "tlm-mi";
        case ModelKind::wetlm: return "wetlm";
        case ModelKind::wetlm_alpha: return "wetlm-alpha";
    }
    return "?";
}

bool is_translation_kind(ModelKind kind) {
    return kind == ModelKind::tlm_mi || kind == ModelKind::wetlm || kind == ModelKind::wetlm_alpha;
}

bool model_uses_neighbors(ModelKind kind) {
    return kind == ModelKind::wetlm || kind == ModelKind::wetlm_alpha;
}

void ModelParams::validate() const {
    if (!(mu > 0.0)) {
        throw Error(errc::config, "mu must be > 0, got " + std::to_string(mu));
    }
    if (model_uses_neighbors(kind) && !(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(errc::config, "threshold must be in (0, 1], got " + std::to_string(threshold));
    }
    if (kind == ModelKind::wetlm_alpha && !(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(errc::config, "alpha must be in [0, 1], got " + std::to_string(alpha));
    }
    if (top_k == 0) {
        throw Error(errc::config, "topK must be at least 1");
    }
}

namespace {

/// Dirichlet mixture of a document component with the collection probability.
/// Every scorer goes through this one expression so that models which agree
/// on the components produce bitwise-identical scores.
inline double dirichlet_mix(double doc_length, double mu, double component, double p_collection) {
    return (doc_length / (mu + doc_length)) * component +
           (mu / (mu + doc_length)) * p_collection;
}

inline double max_likelihood(const Document& doc, TermId id) {
    if (doc.length == 0 || id == kNoTerm) return 0.0;
    std::uint32_t c = doc.count_of(id);
    return c == 0 ? 0.0 : static_cast<double>(c) / static_cast<double>(doc.length);
}

inline double row_prob(const TranslationSource::Row& row, TermId id) {
    auto it = std::lower_bound(row.probs.begin(), row.probs.end(), id,
                               [](const std::pair<TermId, double>& e, TermId t) { return e.first < t; });
    if (it == row.probs.end() || it->first != id) return 0.0;
    return it->second;
}

}  // namespace

double translation_doc_prob(const TranslationSource::Row& row, const Document& doc) {
    if (doc.length == 0 || row.probs.empty()) return 0.0;
    // Both the row and the document counts are sorted by term id, so either
    // traversal visits matches in the same order.
    double dlen = static_cast<double>(doc.length);
    double sum = 0.0;
    if (row.probs.size() <= doc.counts.size()) {
        for (const auto& [term, p] : row.probs) {
            std::uint32_t c = doc.count_of(term);
            if (c > 0) sum += p * (static_cast<double>(c) / dlen);
        }
    } else {
        for (const auto& tc : doc.counts) {
            double p = row_prob(row, tc.term);
            if (p > 0.0) sum += p * (static_cast<double>(tc.count) / dlen);
        }
    }
    return sum;
}

// --- translation sources ------------------------------------------------------

TranslationSource::Row IdentityTranslation::row(const std::string& query_term) const {
    Row out;
    out.capable = true;
    auto id = index_->term_id(query_term);
    if (id) out.probs.emplace_back(*id, 1.0);
    return out;
}

CosineTranslation::CosineTranslation(const DirectIndex& index, const NeighborIndex& neighbors)
    : neighbors_(&neighbors) {
    row_to_collection_.resize(neighbors.size(), kNoTerm);
    for (std::uint32_t row = 0; row < neighbors.size(); ++row) {
        auto id = index.term_id(neighbors.term(row));
        if (id) row_to_collection_[row] = *id;
    }
}

TranslationSource::Row CosineTranslation::row(const std::string& query_term) const {
    Row out;
    auto rid = neighbors_->row_id(query_term);
    if (!rid) return out;
    out.capable = true;
    // Neighbor rows and the collection dictionary are both sorted
    // lexicographically, so the mapped ids stay ascending.
    for (const Neighbor& nbr : neighbors_->neighbors(*rid)) {
        TermId cid = row_to_collection_[nbr.term];
        if (cid == kNoTerm) continue;
        double p = nbr.cos / neighbors_->normalizer(nbr.term);
        if (p > 0.0) out.probs.emplace_back(cid, p);
    }
    return out;
}

AlphaCosineTranslation::AlphaCosineTranslation(const DirectIndex& index,
                                               const NeighborIndex& neighbors, double alpha)
    : CosineTranslation(index, neighbors), alpha_(alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(errc::config, "alpha must be in [0, 1], got " + std::to_string(alpha));
    }
}

TranslationSource::Row AlphaCosineTranslation::row(const std::string& query_term) const {
    Row out;
    auto rid = neighbors_->row_id(query_term);
    if (!rid) return out;
    out.capable = true;
    for (const Neighbor& nbr : neighbors_->neighbors(*rid)) {
        TermId cid = row_to_collection_[nbr.term];
        if (cid == kNoTerm) continue;
        double p_cos = nbr.cos / neighbors_->normalizer(nbr.term);
        double p = nbr.term == *rid ? alpha_ + (1.0 - alpha_) * p_cos : (1.0 - alpha_) * p_cos;
        if (p > 0.0) out.probs.emplace_back(cid, p);
    }
    return out;
}

namespace {

double mi_from_counts(std::uint32_t n_w, std::uint32_t n_u, std::uint32_t n_wu, std::uint32_t n_docs) {
    if (n_docs == 0) return 0.0;
    double n = static_cast<double>(n_docs);
    double cells[4] = {
        static_cast<double>(n_wu),                          // w present, u present
        static_cast<double>(n_w - n_wu),                    // w present, u absent
        static_cast<double>(n_u - n_wu),                    // w absent, u present
        static_cast<double>(n_docs - n_w - n_u + n_wu),     // both absent
    };
    double pw[2] = {static_cast<double>(n_w) / n, 1.0 - static_cast<double>(n_w) / n};
    double pu[2] = {static_cast<double>(n_u) / n, 1.0 - static_cast<double>(n_u) / n};
    double margins[4] = {pw[0] * pu[0], pw[0] * pu[1], pw[1] * pu[0], pw[1] * pu[1]};
    double mi = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (cells[i] <= 0.0) continue;  // 0 log 0 = 0
        double p = cells[i] / n;
        mi += p * std::log(p / margins[i]);
    }
    return mi > 0.0 ? mi : 0.0;
}

// Distinct terms co-occurring with `t`, with joint document counts, sorted
// by term id.
std::vector<std::pair<TermId, std::uint32_t>> cooccurrence_counts(const DirectIndex& index, TermId t) {
    std::unordered_map<TermId, std::uint32_t> counts;
    for (const auto& doc : index.documents()) {
        if (doc.count_of(t) == 0) continue;
        for (const auto& tc : doc.counts) counts[tc.term] += 1;
    }
    std::vector<std::pair<TermId, std::uint32_t>> out(counts.begin(), counts.end());
    std::sort(out.begin(), out.end());
    return out;
}

double mi_row_normalizer(const DirectIndex& index, TermId u) {
    const auto& presence = index.stats().doc_presence;
    std::uint32_t n_docs = index.stats().doc_count;
    double z = 0.0;
    for (const auto& [w, n_wu] : cooccurrence_counts(index, u)) {
        z += mi_from_counts(presence[w], presence[u], n_wu, n_docs);
    }
    return z;
}

}  // namespace

double mi_score(const DirectIndex& index, std::string_view w, std::string_view u) {
    PairPresence pp = index.pair_presence(w, u);
    return mi_from_counts(pp.n_w, pp.n_u, pp.n_wu, pp.n_docs);
}

double mi_translation_prob(const DirectIndex& index, std::string_view w, std::string_view u) {
    auto uid = index.term_id(u);
    if (!uid || index.stats().doc_presence[*uid] == 0) {
        return w == u ? 1.0 : 0.0;  // isolated term
    }
    auto wid = index.term_id(w);
    double z = mi_row_normalizer(index, *uid);
    if (z <= 0.0) return w == u ? 1.0 : 0.0;
    if (!wid) return 0.0;
    PairPresence pp = index.pair_presence(w, u);
    if (pp.n_wu == 0) return 0.0;  // not a co-occurrence candidate
    return mi_from_counts(pp.n_w, pp.n_u, pp.n_wu, pp.n_docs) / z;
}

double MiTranslation::normalizer_for(TermId u) const {
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = normalizer_cache_.find(u);
        if (it != normalizer_cache_.end()) return it->second;
    }
    double z = mi_row_normalizer(*index_, u);
    std::lock_guard<std::mutex> lock(mutex_);
    normalizer_cache_.emplace(u, z);
    return z;
}

TranslationSource::Row MiTranslation::row(const std::string& query_term) const {
    Row out;
    auto qid = index_->term_id(query_term);
    if (!qid) return out;  // unknown terms have no co-occurrence evidence
    out.capable = true;
    const auto& presence = index_->stats().doc_presence;
    std::uint32_t n_docs = index_->stats().doc_count;
    for (const auto& [u, n_qu] : cooccurrence_counts(*index_, *qid)) {
        double z = normalizer_for(u);
        double p;
        if (z > 0.0) {
            p = mi_from_counts(presence[*qid], presence[u], n_qu, n_docs) / z;
        } else {
            p = u == *qid ? 1.0 : 0.0;
        }
        if (p > 0.0) out.probs.emplace_back(u, p);
    }
    return out;
}

// --- per-term reference operations --------------------------------------------

double dirichlet_term_prob(std::string_view term, const Document& doc, const DirectIndex& index,
                           double mu) {
    auto id = index.term_id(term);
    double p_ml = max_likelihood(doc, id ? *id : kNoTerm);
    return dirichlet_mix(static_cast<double>(doc.length), mu, p_ml, index.collection_prob(term));
}

double cos_translation_prob(std::string_view query_term, std::string_view doc_term,
                            const NeighborIndex& neighbors) {
    auto rid = neighbors.row_id(doc_term);
    if (!rid) return 0.0;
    double cos = neighbors.stored_cos(doc_term, query_term);
    if (cos <= 0.0) return 0.0;
    return cos / neighbors.normalizer(*rid);
}

double alpha_translation_prob(std::string_view query_term, std::string_view doc_term,
                              const NeighborIndex& neighbors, double alpha) {
    if (!(alpha >= 0.0 && alpha <= 1.0)) {
        throw Error(errc::config, "alpha must be in [0, 1], got " + std::to_string(alpha));
    }
    double p_cos = cos_translation_prob(query_term, doc_term, neighbors);
    if (query_term == doc_term) {
        if (!neighbors.row_id(doc_term)) return 0.0;  // outside the embedded vocabulary
        return alpha + (1.0 - alpha) * p_cos;
    }
    return (1.0 - alpha) * p_cos;
}

double tlm_term_prob(std::string_view term, const Document& doc, const DirectIndex& index, double mu,
                     const TranslationSource& source) {
    TranslationSource::Row row = source.row(std::string(term));
    double p_collection = index.collection_prob(term);
    if (row.capable) {
        double trans = translation_doc_prob(row, doc);
        if (p_collection > 0.0) {
            return dirichlet_mix(static_cast<double>(doc.length), mu, trans, p_collection);
        }
        return trans;  // out-of-collection term, translation component alone
    }
    return p_collection;  // no translation capability, collection probability alone
}

double wetlm_term_prob(std::string_view term, const Document& doc, const DirectIndex& index,
                       const NeighborIndex& neighbors, const ModelParams& params) {
    if (params.kind == ModelKind::wetlm_alpha) {
        AlphaCosineTranslation source(index, neighbors, params.alpha);
        return tlm_term_prob(term, doc, index, params.mu, source);
    }
    CosineTranslation source(index, neighbors);
    return tlm_term_prob(term, doc, index, params.mu, source);
}

// --- whole-query scoring -------------------------------------------------------

Scorer::Scorer(const DirectIndex& index, const ModelParams& params, const NeighborIndex* neighbors)
    : index_(&index), params_(params) {
    params_.validate();
    switch (params_.kind) {
        case ModelKind::tlm_mi:
            source_ = std::make_shared<MiTranslation>(index);
            break;
        case ModelKind::wetlm:
            if (!neighbors) throw Error(errc::config, "wetlm requires a neighbor index");
            source_ = std::make_shared<CosineTranslation>(index, *neighbors);
            break;
        case ModelKind::wetlm_alpha:
            if (!neighbors) throw Error(errc::config, "wetlm-alpha requires a neighbor index");
            source_ = std::make_shared<AlphaCosineTranslation>(index, *neighbors, params_.alpha);
            break;
        default:
            break;
    }
}

Scorer::Scorer(const DirectIndex& index, const ModelParams& params,
               std::shared_ptr<const TranslationSource> source)
    : index_(&index), params_(params), source_(std::move(source)) {
    params_.validate();
    if (is_translation_kind(params_.kind) && !source_) {
        throw Error(errc::config, "translation model requires a translation source");
    }
}

Scorer::QueryPlan Scorer::make_plan(const Query& query) const {
    QueryPlan plan;
    plan.occurrences.reserve(query.terms.size());
    const bool translating = is_translation_kind(params_.kind);

    std::unordered_map<std::string, std::size_t> row_of;
    for (const auto& term : query.terms) {
        TermPlan tp;
        auto id = index_->term_id(term);
        tp.id = id ? *id : kNoTerm;
        tp.p_collection = id ? index_->collection_prob(*id) : 0.0;
        if (translating) {
            auto it = row_of.find(term);
            if (it == row_of.end()) {
                it = row_of.emplace(term, plan.rows.size()).first;
                plan.rows.push_back(source_->row(term));
            }
            tp.row_index = it->second;
        }
        plan.occurrences.push_back(tp);
    }
    for (const auto& tp : plan.occurrences) {
        bool has_collection = tp.p_collection > 0.0;
        if (has_collection) ++plan.in_collection;
        bool usable = has_collection;
        if (!usable && tp.row_index != kNoRow) {
            const auto& row = plan.rows[tp.row_index];
            if (row.capable && !row.probs.empty()) usable = true;
        }
        if (usable) ++plan.usable;
    }
    return plan;
}

double Scorer::score_one(const QueryPlan& plan, const Document& doc) const {
    const double dlen = static_cast<double>(doc.length);
    const double mu = params_.mu;
    double score = 0.0;

    switch (params_.kind) {
        case ModelKind::dirichlet_sum:
            for (const auto& tp : plan.occurrences) {
                if (tp.p_collection <= 0.0) continue;  // never in any document either
                double p = dirichlet_mix(dlen, mu, max_likelihood(doc, tp.id), tp.p_collection);
                score += std::log(p);
            }
            return score;

        case ModelKind::dirichlet_closed: {
            for (const auto& tp : plan.occurrences) {
                if (tp.p_collection <= 0.0 || tp.id == kNoTerm) continue;
                std::uint32_t c = doc.count_of(tp.id);
                if (c == 0) continue;
                score += std::log1p(static_cast<double>(c) / (mu * tp.p_collection));
            }
            score += static_cast<double>(plan.in_collection) * std::log(mu / (mu + dlen));
            return score;
        }

        case ModelKind::dirichlet_terrier: {
            double penalty = std::log(mu / (mu + dlen));
            for (const auto& tp : plan.occurrences) {
                if (tp.p_collection <= 0.0 || tp.id == kNoTerm) continue;
                std::uint32_t c = doc.count_of(tp.id);
                if (c == 0) continue;
                score += std::log1p(static_cast<double>(c) / (mu * tp.p_collection)) + penalty;
            }
            return score;
        }

        default:  // translation kinds
            for (const auto& tp : plan.occurrences) {
                const TranslationSource::Row& row = plan.rows[tp.row_index];
                double p = 0.0;
                if (row.capable) {
                    double trans = translation_doc_prob(row, doc);
                    if (tp.p_collection > 0.0) {
                        p = dirichlet_mix(dlen, mu, trans, tp.p_collection);
                    } else {
                        p = trans;
                    }
                } else if (tp.p_collection > 0.0) {
                    p = tp.p_collection;
                }
                if (p > 0.0) score += std::log(p);
            }
            return score;
    }
}

std::vector<double> Scorer::score_all(const Query& query) const {
    QueryPlan plan = make_plan(query);
    std::vector<double> scores(index_->documents().size(), 0.0);
    if (plan.usable == 0) return scores;
    for (std::size_t i = 0; i < index_->documents().size(); ++i) {
        scores[i] = score_one(plan, index_->documents()[i]);
    }
    return scores;
}

double Scorer::score_document(const Query& query, const Document& doc) const {
    QueryPlan plan = make_plan(query);
    if (plan.usable == 0) return 0.0;
    return score_one(plan, doc);
}

RankOutcome Scorer::rank(const Query& query) const {
    RankOutcome out;
    if (query.terms.empty()) {
        out.empty_query = true;
        return out;
    }

    QueryPlan plan = make_plan(query);
    const auto& docs = index_->documents();
    std::vector<double> scores(docs.size(), 0.0);
    if (plan.usable == 0) {
        out.no_usable_terms = true;
    } else {
        for (std::size_t i = 0; i < docs.size(); ++i) scores[i] = score_one(plan, docs[i]);
    }

    std::vector<std::uint32_t> order(docs.size());
    for (std::uint32_t i = 0; i < docs.size(); ++i) order[i] = i;
    auto better = [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return docs[a].docno < docs[b].docno;
    };
    std::size_t k = std::min<std::size_t>(params_.top_k, order.size());
    std::partial_sort(order.begin(), order.begin() + k, order.end(), better);

    out.docs.reserve(k);
    for (std::size_t i = 0; i < k; ++i) {
        out.docs.push_back({docs[order[i]].docno, scores[order[i]], static_cast<std::uint32_t>(i + 1)});
    }
    return out;
}

double rsv_log_sum(const Query& query, const Document& doc, const DirectIndex& index,
                   const ModelParams& params, const NeighborIndex* neighbors) {
    return Scorer(index, params, neighbors).score_document(query, doc);
}

double dirichlet_rsv_closed(const Query& query, const Document& doc, const DirectIndex& index,
                            double mu) {
    ModelParams params;
    params.kind = ModelKind::dirichlet_closed;
    params.mu = mu;
    return Scorer(index, params).score_document(query, doc);
}

double terrier_rsv(const Query& query, const Document& doc, const DirectIndex& index, double mu) {
    ModelParams params;
    params.kind = ModelKind::dirichlet_terrier;
    params.mu = mu;
    return Scorer(index, params).score_document(query, doc);
}

RankOutcome rank_documents(const Query& query, const DirectIndex& index,
                           const NeighborIndex* neighbors, const ModelParams& params) {
    return Scorer(index, params, neighbors).rank(query);
}

// --- query files ----------------------------------------------------------------

namespace {

std::string lowercase_ascii(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

std::string trim_ws(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Extracts the content of <name> ... up to the next tag or </top>.
std::optional<std::string> topic_field(const std::string& topic, const std::string& name) {
    std::string lower = lowercase_ascii(topic);
    std::string open = "<" + name + ">";
    std::size_t at = lower.find(open);
    if (at == std::string::npos) return std::nullopt;
    std::size_t begin = at + open.size();
    std::size_t end = lower.find('<', begin);
    if (end == std::string::npos) end = topic.size();
    return trim_ws(std::string_view(topic).substr(begin, end - begin));
}

std::vector<Query> parse_topic_queries(const std::string& data, const StopList& stoplist) {
    std::vector<Query> queries;
    std::string lower = lowercase_ascii(data);
    std::size_t pos = 0;
    while (true) {
        std::size_t open = lower.find("<top>", pos);
        if (open == std::string::npos) break;
        std::size_t close = lower.find("</top>", open);
        if (close == std::string::npos) {
            throw Error(errc::format, "query topic without closing </top>");
        }
        std::string topic = data.substr(open, close - open);
        auto num = topic_field(topic, "num");
        auto title = topic_field(topic, "title");
        if (!num || num->empty()) {
            throw Error(errc::format, "query topic without a <num> field");
        }
        // "<num> Number: 401" is the common layout; keep the trailing token.
        std::string qid = *num;
        std::size_t colon = qid.find(':');
        if (colon != std::string::npos) qid = trim_ws(std::string_view(qid).substr(colon + 1));
        if (qid.empty()) throw Error(errc::format, "query topic with an empty <num> field");
        Query q;
        q.qid = qid;
        q.terms = preprocess(title ? *title : "", stoplist);
        queries.push_back(std::move(q));
        pos = close + 6;
    }
    if (queries.empty()) {
        throw Error(errc::format, "no <top> records found in query file");
    }
    return queries;
}

std::vector<Query> parse_line_queries(const std::string& data, const StopList& stoplist) {
    std::vector<Query> queries;
    std::istringstream in(data);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string trimmed = trim_ws(line);
        if (trimmed.empty() || trimmed[0] == '#') continue;
        std::size_t sep = trimmed.find_first_of(" \t");
        if (sep == std::string::npos) {
            throw Error(errc::format,
                        "query line " + std::to_string(line_no) + " has no text after the qid");
        }
        Query q;
        q.qid = trimmed.substr(0, sep);
        q.terms = preprocess(std::string_view(trimmed).substr(sep + 1), stoplist);
        queries.push_back(std::move(q));
    }
    return queries;
}

}  // namespace

std::vector<Query> read_queries(std::istream& in, const StopList& stoplist) {
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<Query> queries;
    std::string lower = lowercase_ascii(data);
    if (lower.find("<top>") != std::string::npos) {
        queries = parse_topic_queries(data, stoplist);
    } else {
        queries = parse_line_queries(data, stoplist);
    }
    std::unordered_map<std::string, std::size_t> seen;
    for (const auto& q : queries) {
        if (!seen.emplace(q.qid, 1).second) {
            throw Error(errc::format, "duplicate query id '" + q.qid + "'");
        }
    }
    return queries;
}

std::vector<Query> read_queries_file(const std::string& path, const StopList& stoplist) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open query file: " + path);
    return read_queries(in, stoplist);
}

}  // namespace ltrank
