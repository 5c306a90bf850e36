#include "ltrank/index.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <iterator>
#include <numeric>

#include "ltrank/binio.hpp"
#include "ltrank/errors.hpp"

namespace ltrank {

namespace {
constexpr char kIndexMagic[4] = {'L', 'T', 'I', 'X'};
constexpr std::uint32_t kIndexVersion = 1;
}  // namespace

std::uint32_t Document::count_of(TermId term) const {
    auto it = std::lower_bound(counts.begin(), counts.end(), term,
                               [](const TermCount& tc, TermId t) { return tc.term < t; });
    if (it == counts.end() || it->term != term) return 0;
    return it->count;
}

std::optional<TermId> DirectIndex::term_id(std::string_view term) const {
    auto it = term_ids_.find(std::string(term));
    if (it == term_ids_.end()) return std::nullopt;
    return it->second;
}

double DirectIndex::collection_prob(TermId id) const {
    if (stats_.total_tokens == 0) return 0.0;
    return static_cast<double>(stats_.term_counts[id]) / static_cast<double>(stats_.total_tokens);
}

double DirectIndex::collection_prob(std::string_view term) const {
    auto id = term_id(term);
    if (!id) return 0.0;
    return collection_prob(*id);
}

PairPresence DirectIndex::pair_presence(std::string_view w, std::string_view u) const {
    PairPresence out;
    out.n_docs = static_cast<std::uint32_t>(docs_.size());
    auto wid = term_id(w);
    auto uid = term_id(u);
    if (wid) out.n_w = stats_.doc_presence[*wid];
    if (uid) out.n_u = stats_.doc_presence[*uid];
    if (!wid || !uid) return out;
    if (*wid == *uid) {
        out.n_wu = out.n_w;
        return out;
    }
    std::uint32_t both = 0;
    for (const auto& doc : docs_) {
        if (doc.count_of(*wid) > 0 && doc.count_of(*uid) > 0) ++both;
    }
    out.n_wu = both;
    return out;
}

void DirectIndex::rebuild_stats() {
    stats_.term_counts.assign(terms_.size(), 0);
    stats_.doc_presence.assign(terms_.size(), 0);
    stats_.total_tokens = 0;
    stats_.doc_count = static_cast<std::uint32_t>(docs_.size());
    for (const auto& doc : docs_) {
        for (const auto& tc : doc.counts) {
            stats_.term_counts[tc.term] += tc.count;
            stats_.doc_presence[tc.term] += 1;
        }
        stats_.total_tokens += doc.length;
    }
    stats_.avdl = stats_.doc_count == 0
                      ? 0.0
                      : static_cast<double>(stats_.total_tokens) / static_cast<double>(stats_.doc_count);
}

void IndexBuilder::add_document(std::string docno, std::span<const std::string> tokens) {
    auto [it, inserted] = seen_docnos_.emplace(docno, static_cast<std::uint32_t>(docs_.size()));
    if (!inserted) {
        throw Error(errc::format, "duplicate DOCNO '" + docno + "'");
    }
    Document doc;
    doc.docno = std::move(docno);
    doc.length = tokens.size();

    std::unordered_map<TermId, std::uint32_t> counts;
    counts.reserve(tokens.size());
    for (const auto& token : tokens) {
        auto [tit, fresh] = build_ids_.emplace(token, static_cast<TermId>(build_terms_.size()));
        if (fresh) build_terms_.push_back(token);
        counts[tit->second] += 1;
    }
    doc.counts.reserve(counts.size());
    for (const auto& [term, count] : counts) doc.counts.push_back({term, count});
    std::sort(doc.counts.begin(), doc.counts.end(),
              [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
    docs_.push_back(std::move(doc));
}

DirectIndex IndexBuilder::build() {
    DirectIndex index;

    // Canonical term ids: position in the lexicographically sorted dictionary.
    std::vector<TermId> order(build_terms_.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](TermId a, TermId b) { return build_terms_[a] < build_terms_[b]; });
    std::vector<TermId> remap(build_terms_.size());
    index.terms_.resize(build_terms_.size());
    for (TermId new_id = 0; new_id < order.size(); ++new_id) {
        remap[order[new_id]] = new_id;
        index.terms_[new_id] = std::move(build_terms_[order[new_id]]);
        index.term_ids_.emplace(index.terms_[new_id], new_id);
    }

    index.docs_ = std::move(docs_);
    for (auto& doc : index.docs_) {
        for (auto& tc : doc.counts) tc.term = remap[tc.term];
        std::sort(doc.counts.begin(), doc.counts.end(),
                  [](const TermCount& a, const TermCount& b) { return a.term < b.term; });
    }

    index.rebuild_stats();
    build_terms_.clear();
    build_ids_.clear();
    seen_docnos_.clear();
    return index;
}

// --- TREC ingestion ---------------------------------------------------------

namespace {

struct TagScanner {
    std::string_view text;
    std::size_t pos = 0;

    // Finds the next occurrence of <name> or </name> (case-insensitive,
    // optional whitespace inside the brackets) at or after `from`.
    // Returns the offsets of '<' and one past '>'.
    struct Tag {
        std::size_t begin;
        std::size_t end;
        bool closing;
        std::string name;
    };

    static bool tag_at(std::string_view text, std::size_t lt, Tag& out) {
        std::size_t i = lt + 1;
        bool closing = false;
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        if (i < text.size() && text[i] == '/') {
            closing = true;
            ++i;
            while (i < text.size() && (text[i] == ' ' || text[i] == '\t')) ++i;
        }
        std::string name;
        while (i < text.size() && (std::isalnum(static_cast<unsigned char>(text[i])) || text[i] == '_' ||
                                   text[i] == '-')) {
            char c = text[i];
            if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
            name.push_back(c);
            ++i;
        }
        if (name.empty()) return false;
        while (i < text.size() && (text[i] == ' ' || text[i] == '\t' || text[i] == '\r' || text[i] == '\n')) ++i;
        if (i >= text.size() || text[i] != '>') return false;
        out = Tag{lt, i + 1, closing, std::move(name)};
        return true;
    }

    std::optional<Tag> next_named(std::size_t from, std::string_view name, bool closing) const {
        for (std::size_t lt = text.find('<', from); lt != std::string_view::npos;
             lt = text.find('<', lt + 1)) {
            Tag tag;
            if (tag_at(text, lt, tag) && tag.closing == closing && tag.name == name) return tag;
        }
        return std::nullopt;
    }
};

std::string trim(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(b, e - b + 1));
}

// Replaces every <...> tag span with a space so markup never reaches the
// tokenizer.
std::string strip_markup(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    std::size_t i = 0;
    while (i < s.size()) {
        if (s[i] == '<') {
            TagScanner::Tag tag;
            if (TagScanner::tag_at(s, i, tag)) {
                out.push_back(' ');
                i = tag.end;
                continue;
            }
        }
        out.push_back(s[i]);
        ++i;
    }
    return out;
}

[[noreturn]] void ingest_error(std::size_t offset, const std::string& context, const std::string& message) {
    std::string where = context.empty() ? "before any DOCNO" : "after docno '" + context + "'";
    throw Error(errc::format,
                "malformed TREC record at byte offset " + std::to_string(offset) + " (" + where + "): " + message);
}

}  // namespace

DirectIndex ingest_trec(std::istream& in, const StopList& stoplist) {
    std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    TagScanner scan{data};

    IndexBuilder builder;
    std::string last_docno;
    std::size_t pos = 0;

    while (true) {
        auto open = scan.next_named(pos, "doc", false);
        if (!open) {
            // No further records; any stray closing tag is unbalanced.
            auto stray = scan.next_named(pos, "doc", true);
            if (stray) ingest_error(stray->begin, last_docno, "</DOC> without matching <DOC>");
            break;
        }
        auto close = scan.next_named(open->end, "doc", true);
        if (!close) ingest_error(open->begin, last_docno, "<DOC> without matching </DOC>");
        auto nested = scan.next_named(open->end, "doc", false);
        if (nested && nested->begin < close->begin) {
            ingest_error(nested->begin, last_docno, "nested <DOC> before </DOC>");
        }

        auto docno_open = scan.next_named(open->end, "docno", false);
        if (!docno_open || docno_open->begin >= close->begin) {
            ingest_error(open->begin, last_docno, "record has no <DOCNO>");
        }
        auto docno_close = scan.next_named(docno_open->end, "docno", true);
        if (!docno_close || docno_close->begin >= close->begin) {
            ingest_error(docno_open->begin, last_docno, "<DOCNO> without matching </DOCNO>");
        }
        auto second = scan.next_named(docno_close->end, "docno", false);
        if (second && second->begin < close->begin) {
            ingest_error(second->begin, last_docno, "duplicate <DOCNO> in record");
        }
        std::string docno =
            trim(std::string_view(data.data() + docno_open->end, docno_close->begin - docno_open->end));
        if (docno.empty()) ingest_error(docno_open->begin, last_docno, "empty DOCNO");

        // Everything inside the record except the DOCNO element is text.
        std::string text;
        text.append(data, open->end, docno_open->begin - open->end);
        text.push_back(' ');
        text.append(data, docno_close->end, close->begin - docno_close->end);

        auto tokens = preprocess(strip_markup(text), stoplist);
        try {
            builder.add_document(docno, tokens);
        } catch (const Error& e) {
            ingest_error(open->begin, last_docno, e.what());
        }
        last_docno = std::move(docno);
        pos = close->end;
    }

    return builder.build();
}

DirectIndex ingest_trec_file(const std::string& path, const StopList& stoplist) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open collection file: " + path);
    return ingest_trec(in, stoplist);
}

// --- snapshot ----------------------------------------------------------------

void DirectIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io, "cannot write index snapshot: " + path);

    binio::write_bytes(out, kIndexMagic, 4);
    binio::write_u32(out, kIndexVersion);
    binio::write_u32(out, static_cast<std::uint32_t>(terms_.size()));
    binio::write_u32(out, static_cast<std::uint32_t>(docs_.size()));
    binio::write_u64(out, stats_.total_tokens);
    for (const auto& term : terms_) binio::write_string(out, term);
    for (const auto& doc : docs_) {
        binio::write_string(out, doc.docno);
        binio::write_u64(out, doc.length);
        binio::write_u32(out, static_cast<std::uint32_t>(doc.counts.size()));
        for (const auto& tc : doc.counts) {
            binio::write_u32(out, tc.term);
            binio::write_u32(out, tc.count);
        }
    }
    if (!out) throw Error(errc::io, "short write while saving index snapshot: " + path);
}

DirectIndex DirectIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open index snapshot: " + path);

    char magic[4];
    binio::read_bytes(in, magic, 4, "index magic");
    if (std::memcmp(magic, kIndexMagic, 4) != 0) {
        throw Error(errc::format, "not an index snapshot (bad magic): " + path);
    }
    std::uint32_t version = binio::read_u32(in, "index version");
    if (version != kIndexVersion) {
        throw Error(errc::format, "unsupported index snapshot version " + std::to_string(version));
    }

    DirectIndex index;
    std::uint32_t term_count = binio::read_u32(in, "term count");
    std::uint32_t doc_count = binio::read_u32(in, "document count");
    std::uint64_t total_tokens = binio::read_u64(in, "token count");

    index.terms_.reserve(term_count);
    for (std::uint32_t i = 0; i < term_count; ++i) {
        index.terms_.push_back(binio::read_string(in, "term"));
        if (i > 0 && !(index.terms_[i - 1] < index.terms_[i])) {
            throw Error(errc::format, "index snapshot dictionary is not sorted: " + path);
        }
        index.term_ids_.emplace(index.terms_.back(), i);
    }

    index.docs_.reserve(doc_count);
    for (std::uint32_t i = 0; i < doc_count; ++i) {
        Document doc;
        doc.docno = binio::read_string(in, "docno");
        doc.length = binio::read_u64(in, "document length");
        std::uint32_t distinct = binio::read_u32(in, "distinct term count");
        doc.counts.reserve(distinct);
        std::uint64_t sum = 0;
        for (std::uint32_t j = 0; j < distinct; ++j) {
            TermId term = binio::read_u32(in, "term id");
            std::uint32_t count = binio::read_u32(in, "term frequency");
            if (term >= term_count || count == 0) {
                throw Error(errc::format, "corrupt document record in snapshot: " + path);
            }
            if (j > 0 && term <= doc.counts.back().term) {
                throw Error(errc::format, "document terms not sorted in snapshot: " + path);
            }
            doc.counts.push_back({term, count});
            sum += count;
        }
        if (sum != doc.length) {
            throw Error(errc::format, "document length mismatch in snapshot: " + path);
        }
        index.docs_.push_back(std::move(doc));
    }

    index.rebuild_stats();
    if (index.stats_.total_tokens != total_tokens) {
        throw Error(errc::format, "token count mismatch in snapshot: " + path);
    }
    return index;
}

}  // namespace ltrank
