#include "ltrank/neighbors.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "ltrank/binio.hpp"
#include "ltrank/errors.hpp"
#include "ltrank/parallel.hpp"

namespace ltrank {

namespace {
constexpr char kCacheMagic[4] = {'L', 'T', 'N', 'B'};
constexpr std::uint32_t kCacheVersion = 1;
}  // namespace

std::optional<std::uint32_t> NeighborIndex::row_id(std::string_view term) const {
    auto it = ids_.find(std::string(term));
    if (it == ids_.end()) return std::nullopt;
    return it->second;
}

double NeighborIndex::stored_cos(std::string_view a, std::string_view b) const {
    auto ra = row_id(a);
    auto rb = row_id(b);
    if (!ra || !rb) return 0.0;
    const auto& row = rows_[*ra];
    auto it = std::lower_bound(row.begin(), row.end(), *rb,
                               [](const Neighbor& n, std::uint32_t id) { return n.term < id; });
    if (it == row.end() || it->term != *rb) return 0.0;
    return it->cos;
}

NeighborIndex build_neighbor_index(const EmbeddingTable& table, const std::vector<std::string>& vocab,
                                   double threshold, unsigned workers, const NeighborCacheKey& key) {
    if (!(threshold > 0.0 && threshold <= 1.0)) {
        throw Error(errc::config, "neighbor threshold must be in (0, 1], got " + std::to_string(threshold));
    }

    NeighborIndex index;
    index.threshold_ = threshold;
    index.key_ = key;
    index.key_.threshold = threshold;

    // Rows exist for the embedded subset of the vocabulary, in sorted order.
    for (const auto& term : vocab) {
        if (table.contains(term)) index.terms_.push_back(term);
    }
    std::sort(index.terms_.begin(), index.terms_.end());
    index.terms_.erase(std::unique(index.terms_.begin(), index.terms_.end()), index.terms_.end());
    const std::size_t n = index.terms_.size();
    for (std::uint32_t i = 0; i < n; ++i) index.ids_.emplace(index.terms_[i], i);

    const std::uint32_t dim = table.dim();
    std::vector<float> unit(n * static_cast<std::size_t>(dim));
    for (std::size_t i = 0; i < n; ++i) {
        auto v = table.vector(index.terms_[i]);
        double norm2 = 0.0;
        for (float x : v) norm2 += static_cast<double>(x) * static_cast<double>(x);
        double inv = 1.0 / std::sqrt(norm2);
        for (std::uint32_t d = 0; d < dim; ++d) {
            unit[i * dim + d] = static_cast<float>(static_cast<double>(v[d]) * inv);
        }
    }

    index.rows_.resize(n);
    index.normalizers_.assign(n, 0.0);

    parallel_for(n, workers, [&](std::size_t i) {
        const float* a = unit.data() + i * dim;
        auto& row = index.rows_[i];
        double z = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            double cos;
            if (j == i) {
                cos = 1.0;
            } else {
                const float* b = unit.data() + j * dim;
                double dot = 0.0;
                for (std::uint32_t d = 0; d < dim; ++d) {
                    dot += static_cast<double>(a[d]) * static_cast<double>(b[d]);
                }
                cos = dot > 1.0 ? 1.0 : (dot < -1.0 ? -1.0 : dot);
                if (cos < threshold) continue;
            }
            row.push_back({static_cast<std::uint32_t>(j), cos});
            z += cos;
        }
        index.normalizers_[i] = z;
    });

    return index;
}

std::uint64_t hash_vocab(const std::vector<std::string>& vocab) {
    std::vector<std::string> sorted(vocab);
    std::sort(sorted.begin(), sorted.end());
    sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (const auto& term : sorted) {
        h = binio::fnv1a64(term.data(), term.size(), h);
        h = binio::fnv1a64("\n", 1, h);
    }
    return h;
}

void NeighborIndex::save(const std::string& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(errc::io, "cannot write neighbor cache: " + path);

    binio::write_bytes(out, kCacheMagic, 4);
    binio::write_u32(out, kCacheVersion);
    binio::write_f64(out, threshold_);
    binio::write_u64(out, key_.embedding_hash);
    binio::write_u64(out, key_.vocab_hash);
    binio::write_u32(out, static_cast<std::uint32_t>(terms_.size()));
    for (const auto& term : terms_) binio::write_string(out, term);
    for (std::uint32_t i = 0; i < terms_.size(); ++i) {
        binio::write_u32(out, static_cast<std::uint32_t>(rows_[i].size()));
        for (const auto& nbr : rows_[i]) {
            binio::write_u32(out, nbr.term);
            binio::write_f64(out, nbr.cos);
        }
        binio::write_f64(out, normalizers_[i]);
    }
    if (!out) throw Error(errc::io, "short write while saving neighbor cache: " + path);
}

NeighborIndex NeighborIndex::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(errc::io, "cannot open neighbor cache: " + path);

    char magic[4];
    binio::read_bytes(in, magic, 4, "cache magic");
    if (std::memcmp(magic, kCacheMagic, 4) != 0) {
        throw Error(errc::format, "not a neighbor cache (bad magic): " + path);
    }
    std::uint32_t version = binio::read_u32(in, "cache version");
    if (version != kCacheVersion) {
        throw Error(errc::format, "unsupported neighbor cache version " + std::to_string(version));
    }

    NeighborIndex index;
    index.threshold_ = binio::read_f64(in, "threshold");
    index.key_.threshold = index.threshold_;
    index.key_.embedding_hash = binio::read_u64(in, "embedding hash");
    index.key_.vocab_hash = binio::read_u64(in, "vocab hash");

    std::uint32_t n = binio::read_u32(in, "term count");
    index.terms_.reserve(n);
    for (std::uint32_t i = 0; i < n; ++i) {
        index.terms_.push_back(binio::read_string(in, "term"));
        if (i > 0 && !(index.terms_[i - 1] < index.terms_[i])) {
            throw Error(errc::format, "neighbor cache dictionary is not sorted: " + path);
        }
        index.ids_.emplace(index.terms_.back(), i);
    }
    index.rows_.resize(n);
    index.normalizers_.assign(n, 0.0);
    for (std::uint32_t i = 0; i < n; ++i) {
        std::uint32_t len = binio::read_u32(in, "row length");
        auto& row = index.rows_[i];
        row.reserve(len);
        for (std::uint32_t j = 0; j < len; ++j) {
            Neighbor nbr;
            nbr.term = binio::read_u32(in, "neighbor id");
            nbr.cos = binio::read_f64(in, "neighbor cosine");
            if (nbr.term >= n || (j > 0 && nbr.term <= row.back().term)) {
                throw Error(errc::format, "corrupt neighbor row in cache: " + path);
            }
            row.push_back(nbr);
        }
        index.normalizers_[i] = binio::read_f64(in, "normalizer");
    }
    return index;
}

std::optional<NeighborCacheKey> NeighborIndex::peek_key(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) return std::nullopt;
    char magic[4];
    in.read(magic, 4);
    if (in.gcount() != 4 || std::memcmp(magic, kCacheMagic, 4) != 0) return std::nullopt;
    try {
        std::uint32_t version = binio::read_u32(in, "cache version");
        if (version != kCacheVersion) return std::nullopt;
        NeighborCacheKey key;
        key.threshold = binio::read_f64(in, "threshold");
        key.embedding_hash = binio::read_u64(in, "embedding hash");
        key.vocab_hash = binio::read_u64(in, "vocab hash");
        return key;
    } catch (const Error&) {
        return std::nullopt;
    }
}

}  // namespace ltrank
