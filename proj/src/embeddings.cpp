#include "ltrank/embeddings.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>

#include "ltrank/errors.hpp"

namespace ltrank {

std::span<const float> EmbeddingTable::vector(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return {};
    return std::span<const float>(flat_.data() + static_cast<std::size_t>(it->second) * dim_, dim_);
}

bool EmbeddingTable::insert(std::string_view term, std::span<const float> values) {
    if (dim_ == 0) dim_ = static_cast<std::uint32_t>(values.size());
    if (values.size() != dim_) {
        throw Error(errc::format, "embedding dimension mismatch for term '" + std::string(term) + "'");
    }
    double norm2 = 0.0;
    for (float v : values) norm2 += static_cast<double>(v) * static_cast<double>(v);
    if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
        throw Error(errc::format, "zero or non-finite embedding vector for term '" + std::string(term) + "'");
    }
    auto [it, fresh] = ids_.emplace(std::string(term), static_cast<std::uint32_t>(terms_.size()));
    if (!fresh) return false;
    terms_.emplace_back(term);
    flat_.insert(flat_.end(), values.begin(), values.end());
    return true;
}

namespace {

std::string lowercase(std::string s) {
    for (char& c : s) {
        if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    return s;
}

[[noreturn]] void load_error(const std::istream& in, const std::string& message) {
    auto pos = const_cast<std::istream&>(in).tellg();
    throw Error(errc::format, "word vector load error at byte offset " +
                                  std::to_string(static_cast<long long>(pos)) + ": " + message);
}

}  // namespace

EmbeddingTable load_word2vec(std::istream& in,
                             const std::optional<std::unordered_set<std::string>>& vocab_filter,
                             EmbeddingLoadReport* report) {
    std::string header;
    if (!std::getline(in, header)) load_error(in, "missing header line");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    long long vocab_count = -1;
    long long dim = -1;
    {
        std::istringstream hs(header);
        std::string extra;
        if (!(hs >> vocab_count >> dim) || (hs >> extra)) {
            load_error(in, "header is not 'vocabCount dim': '" + header + "'");
        }
    }
    if (dim <= 0) load_error(in, "non-positive dimension in header");
    if (vocab_count < 0) load_error(in, "negative vocabulary count in header");

    EmbeddingLoadReport local;
    local.file_entries = static_cast<std::uint64_t>(vocab_count);

    EmbeddingTable table(static_cast<std::uint32_t>(dim));
    std::vector<float> values(static_cast<std::size_t>(dim));
    for (long long entry = 0; entry < vocab_count; ++entry) {
        // Word bytes, terminated by a space. Entry separators written by
        // some exporters ('\n', '\r') are skipped first.
        int c = in.peek();
        while (c == '\n' || c == '\r') {
            in.get();
            c = in.peek();
        }
        std::string word;
        for (;;) {
            int ch = in.get();
            if (ch == EOF) load_error(in, "truncated entry " + std::to_string(entry) + " (EOF in word)");
            if (ch == ' ') break;
            word.push_back(static_cast<char>(ch));
            if (word.size() > 4096) load_error(in, "implausibly long word in entry " + std::to_string(entry));
        }
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(values.size() * sizeof(float)));
        if (static_cast<std::size_t>(in.gcount()) != values.size() * sizeof(float)) {
            load_error(in, "truncated vector for word '" + word + "'");
        }
        if (in.peek() == '\n') in.get();

        std::string key = lowercase(std::move(word));
        if (vocab_filter && vocab_filter->count(key) == 0) {
            ++local.filtered_out;
            continue;
        }
        double norm2 = 0.0;
        for (float v : values) norm2 += static_cast<double>(v) * static_cast<double>(v);
        if (!(norm2 > 0.0) || !std::isfinite(norm2)) {
            ++local.zero_rejected;
            continue;
        }
        if (table.insert(key, values)) {
            ++local.kept;
        } else {
            ++local.lowercase_collisions;
        }
    }

    // Anything but trailing whitespace after the declared entries means the
    // header and the payload disagree.
    int c;
    while ((c = in.get()) != EOF) {
        if (c != '\n' && c != '\r' && c != ' ') {
            load_error(in, "trailing data after " + std::to_string(vocab_count) + " declared entries");
        }
    }

    if (report) *report = local;
    return table;
}

EmbeddingTable load_word2vec_file(const std::string& path,
                                  const std::optional<std::unordered_set<std::string>>& vocab_filter,
                                  EmbeddingLoadReport* report) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open word vector file: " + path);
    return load_word2vec(in, vocab_filter, report);
}

namespace {

template <typename T>
double cosine_impl(std::span<const T> a, std::span<const T> b) {
    if (a.size() != b.size()) {
        throw Error(errc::format, "cosine: dimension mismatch (" + std::to_string(a.size()) + " vs " +
                                      std::to_string(b.size()) + ")");
    }
    double dot = 0.0;
    double na = 0.0;
    double nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * static_cast<double>(b[i]);
        na += static_cast<double>(a[i]) * static_cast<double>(a[i]);
        nb += static_cast<double>(b[i]) * static_cast<double>(b[i]);
    }
    if (!(na > 0.0) || !(nb > 0.0)) {
        throw Error(errc::format, "cosine: zero-norm operand");
    }
    double value = dot / (std::sqrt(na) * std::sqrt(nb));
    if (value > 1.0) value = 1.0;
    if (value < -1.0) value = -1.0;
    return value;
}

}  // namespace

double cosine(std::span<const double> a, std::span<const double> b) { return cosine_impl(a, b); }
double cosine(std::span<const float> a, std::span<const float> b) { return cosine_impl(a, b); }

double CoverageReport::type_fraction() const {
    return vocab_types == 0 ? 0.0 : static_cast<double>(covered_types) / static_cast<double>(vocab_types);
}
double CoverageReport::token_fraction() const {
    return total_tokens == 0 ? 0.0 : static_cast<double>(covered_tokens) / static_cast<double>(total_tokens);
}
double CoverageReport::query_term_fraction() const {
    return query_terms == 0 ? 0.0
                            : static_cast<double>(covered_query_terms) / static_cast<double>(query_terms);
}
double CoverageReport::uncovered_query_fraction() const {
    return queries == 0 ? 0.0 : static_cast<double>(uncovered_queries) / static_cast<double>(queries);
}

CoverageReport coverage_stats(const EmbeddingTable& table, const DirectIndex& index,
                              const std::vector<std::vector<std::string>>& query_terms) {
    CoverageReport report;
    report.vocab_types = index.vocab_size();
    report.total_tokens = index.stats().total_tokens;
    for (TermId id = 0; id < index.vocab_size(); ++id) {
        if (table.contains(index.term(id))) {
            ++report.covered_types;
            report.covered_tokens += index.stats().term_counts[id];
        }
    }
    report.queries = query_terms.size();
    for (const auto& terms : query_terms) {
        std::uint64_t covered = 0;
        for (const auto& term : terms) {
            ++report.query_terms;
            if (table.contains(term)) ++covered;
        }
        report.covered_query_terms += covered;
        if (covered == 0) ++report.uncovered_queries;
    }
    return report;
}

}  // namespace ltrank
