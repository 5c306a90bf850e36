#include "ltrank/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <unordered_set>

#include "ltrank/binio.hpp"
#include "ltrank/errors.hpp"
#include "ltrank/evaluation.hpp"
#include "ltrank/parallel.hpp"

namespace ltrank {

StopList load_stoplist(const std::string& path) {
    if (path.empty()) return StopList{};
    return StopList::from_file(path);
}

namespace {

std::string format_percent(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f%%", fraction * 100.0);
    return buf;
}

std::string model_config_line(const SearchOptions& opt) {
    std::ostringstream line;
    line << "ltrank run tag=" << opt.run_tag << " model=" << model_kind_name(opt.params.kind)
         << " mu=" << opt.params.mu;
    if (model_uses_neighbors(opt.params.kind)) {
        line << " T=" << opt.params.threshold;
        line << " cache=" << opt.cache;
    }
    if (opt.params.kind == ModelKind::wetlm_alpha) line << " alpha=" << opt.params.alpha;
    line << " topK=" << opt.params.top_k << " index=" << opt.index << " queries=" << opt.queries;
    if (!opt.stoplist.empty()) line << " stoplist=" << opt.stoplist;
    return line.str();
}

}  // namespace

void cmd_build_index(const BuildIndexOptions& opt, std::ostream& out) {
    StopList stoplist = load_stoplist(opt.stoplist);
    DirectIndex index = ingest_trec_file(opt.collection, stoplist);
    index.save(opt.output);
    out << "indexed " << index.stats().doc_count << " documents\n"
        << "total tokens " << index.stats().total_tokens << "\n"
        << "vocabulary " << index.vocab_size() << "\n"
        << "avdl " << index.stats().avdl << "\n"
        << "snapshot " << opt.output << "\n";
}

void cmd_embed_prep(const EmbedPrepOptions& opt, std::ostream& out) {
    if (!(opt.threshold > 0.0 && opt.threshold <= 1.0)) {
        throw Error(errc::config, "threshold must be in (0, 1], got " + std::to_string(opt.threshold));
    }
    DirectIndex index = DirectIndex::load(opt.index);

    std::vector<std::vector<std::string>> query_terms;
    std::unordered_set<std::string> filter(index.terms().begin(), index.terms().end());
    if (!opt.queries.empty()) {
        StopList stoplist = load_stoplist(opt.stoplist);
        for (const auto& query : read_queries_file(opt.queries, stoplist)) {
            query_terms.push_back(query.terms);
            // Vectors for out-of-collection query terms are kept so coverage
            // can be reported over the full query vocabulary.
            for (const auto& term : query.terms) filter.insert(term);
        }
    }

    EmbeddingLoadReport report;
    EmbeddingTable table = load_word2vec_file(opt.embeddings, filter, &report);
    out << "embedding entries " << report.file_entries << ", kept " << report.kept << " (filtered "
        << report.filtered_out << ", zero/non-finite " << report.zero_rejected << ", collisions "
        << report.lowercase_collisions << ")\n";

    CoverageReport coverage = coverage_stats(table, index, query_terms);
    out << "vocabulary coverage " << format_percent(coverage.type_fraction()) << " of types, "
        << format_percent(coverage.token_fraction()) << " of token occurrences\n";
    if (!opt.queries.empty()) {
        out << "query coverage " << format_percent(coverage.query_term_fraction())
            << " of query terms, " << format_percent(coverage.uncovered_query_fraction())
            << " of queries with no embedded term\n";
    }

    NeighborCacheKey key;
    key.embedding_hash = binio::fnv1a64_file(opt.embeddings);
    key.vocab_hash = hash_vocab(index.terms());
    key.threshold = opt.threshold;

    if (auto existing = NeighborIndex::peek_key(opt.output); existing && *existing == key) {
        out << "neighbor cache " << opt.output << " is up to date; skipping recomputation\n";
        return;
    }

    // The neighbor rows cover the collection vocabulary only, so the cache
    // stays valid whatever query set is used later.
    NeighborIndex neighbors = build_neighbor_index(table, index.terms(), opt.threshold, opt.workers, key);
    neighbors.save(opt.output);

    std::size_t pairs = 0;
    for (std::uint32_t row = 0; row < neighbors.size(); ++row) pairs += neighbors.neighbors(row).size();
    out << "neighbor rows " << neighbors.size() << ", stored pairs " << pairs << ", T=" << opt.threshold
        << "\n"
        << "cache " << opt.output << "\n";
}

RunResult run_search(const DirectIndex& index, const std::vector<Query>& queries,
                     const ModelParams& params, const NeighborIndex* neighbors,
                     const std::string& run_tag, unsigned workers,
                     std::vector<std::string>* diagnostics) {
    Scorer scorer(index, params, neighbors);

    std::vector<RankOutcome> outcomes(queries.size());
    parallel_for(queries.size(), workers, [&](std::size_t i) { outcomes[i] = scorer.rank(queries[i]); });

    RunResult run;
    run.run_tag = run_tag;
    for (std::size_t i = 0; i < queries.size(); ++i) {
        const Query& query = queries[i];
        RankOutcome& outcome = outcomes[i];
        if (diagnostics) {
            if (outcome.empty_query) {
                diagnostics->push_back("query " + query.qid + ": no terms survived preprocessing");
            } else if (outcome.no_usable_terms) {
                diagnostics->push_back("query " + query.qid +
                                       ": no usable terms, all documents scored 0");
            }
        }
        auto& entries = run.per_query[query.qid];
        entries.reserve(outcome.docs.size());
        for (auto& sd : outcome.docs) entries.push_back({std::move(sd.docno), sd.score});
    }
    return run;
}

namespace {

const NeighborIndex* load_cache_for(SearchOptions& opt, std::optional<NeighborIndex>& storage) {
    if (!model_uses_neighbors(opt.params.kind)) return nullptr;
    if (opt.cache.empty()) {
        throw Error(errc::config, std::string(model_kind_name(opt.params.kind)) +
                                      " requires a neighbor cache (run embed-prep first)");
    }
    storage.emplace(NeighborIndex::load(opt.cache));
    if (opt.threshold_explicit && storage->threshold() != opt.params.threshold) {
        throw Error(errc::config, "cache " + opt.cache + " was built with T=" +
                                      std::to_string(storage->threshold()) + " but T=" +
                                      std::to_string(opt.params.threshold) + " was requested");
    }
    opt.params.threshold = storage->threshold();
    return &*storage;
}

}  // namespace

void cmd_search(const SearchOptions& options, std::ostream& out) {
    SearchOptions opt = options;
    opt.params.validate();
    DirectIndex index = DirectIndex::load(opt.index);
    StopList stoplist = load_stoplist(opt.stoplist);
    std::vector<Query> queries = read_queries_file(opt.queries, stoplist);

    std::optional<NeighborIndex> cache;
    const NeighborIndex* neighbors = load_cache_for(opt, cache);

    std::vector<std::string> diagnostics;
    RunResult run = run_search(index, queries, opt.params, neighbors, opt.run_tag, opt.workers,
                               &diagnostics);
    write_run_file(run, opt.output, opt.no_header ? "" : model_config_line(opt));

    for (const auto& message : diagnostics) out << "warning: " << message << "\n";
    out << "ran " << queries.size() << " queries, wrote " << opt.output << "\n";
}

std::vector<SweepRow> cmd_sweep(const SweepOptions& options, std::ostream& out) {
    if (options.mu_grid.empty()) throw Error(errc::config, "mu grid must not be empty");
    for (double mu : options.mu_grid) {
        if (!(mu > 0.0)) throw Error(errc::config, "mu grid values must be > 0");
    }

    SearchOptions opt = options.search;
    DirectIndex index = DirectIndex::load(opt.index);
    StopList stoplist = load_stoplist(opt.stoplist);
    std::vector<Query> queries = read_queries_file(opt.queries, stoplist);
    Qrels qrels = read_qrels_file(options.qrels);

    std::optional<NeighborIndex> cache;
    const NeighborIndex* neighbors = load_cache_for(opt, cache);

    std::vector<SweepRow> rows;
    rows.reserve(options.mu_grid.size());
    for (double mu : options.mu_grid) {
        ModelParams params = opt.params;
        params.mu = mu;
        params.validate();
        RunResult run = run_search(index, queries, params, neighbors, opt.run_tag, opt.workers);
        EvalSummary summary = evaluate_run(run, qrels, options.k);
        rows.push_back({mu, summary.map, summary.mean_p_at_k});
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        if (rows[i].map > rows[best].map) best = i;
    }

    out << "model " << model_kind_name(opt.params.kind) << "\n";
    out << "      mu      MAP     P@" << options.k << "\n";
    for (std::size_t i = 0; i < rows.size(); ++i) {
        char line[128];
        std::snprintf(line, sizeof(line), "%s %7.5g  %6.2f%%  %6.2f%%", i == best ? "*" : " ",
                      rows[i].mu, rows[i].map * 100.0, rows[i].p_at_k * 100.0);
        out << line << "\n";
    }
    out << "best MAP " << format_percent(rows[best].map) << " at mu=" << rows[best].mu << "\n";

    if (!options.table_output.empty()) {
        std::ofstream tsv(options.table_output);
        if (!tsv) throw Error(errc::io, "cannot write sweep table: " + options.table_output);
        tsv << "mu\tmap\tp_at_" << options.k << "\n";
        for (const auto& row : rows) {
            char line[128];
            std::snprintf(line, sizeof(line), "%g\t%.6f\t%.6f", row.mu, row.map, row.p_at_k);
            tsv << line << "\n";
        }
    }
    return rows;
}

EvalSummary cmd_eval(const EvalOptions& opt, std::ostream& out) {
    RunResult run = read_run_file(opt.run);
    Qrels qrels = read_qrels_file(opt.qrels);
    EvalSummary summary = evaluate_run(run, qrels, opt.k);

    if (opt.per_query) {
        out << "qid          AP     P@" << opt.k << "\n";
        for (const auto& qm : summary.per_query) {
            char line[128];
            std::snprintf(line, sizeof(line), "%-10s %.4f  %.4f", qm.qid.c_str(), qm.ap, qm.p_at_k);
            out << line << "\n";
        }
    }
    out << "queries evaluated " << summary.evaluated;
    if (!summary.skipped_qids.empty()) {
        out << " (skipped, no relevant docs:";
        for (const auto& qid : summary.skipped_qids) out << ' ' << qid;
        out << ")";
    }
    out << "\n";
    out << "MAP  " << format_percent(summary.map) << "\n";
    out << "P@" << opt.k << " " << format_percent(summary.mean_p_at_k) << "\n";

    if (!opt.table_output.empty()) {
        std::ofstream tsv(opt.table_output);
        if (!tsv) throw Error(errc::io, "cannot write eval table: " + opt.table_output);
        tsv << "qid\tap\tp_at_" << opt.k << "\n";
        for (const auto& qm : summary.per_query) {
            char line[160];
            std::snprintf(line, sizeof(line), "%s\t%.6f\t%.6f", qm.qid.c_str(), qm.ap, qm.p_at_k);
            tsv << line << "\n";
        }
    }
    return summary;
}

CompareReport cmd_compare(const CompareOptions& opt, std::ostream& out) {
    RunResult run_a = read_run_file(opt.run_a);
    RunResult run_b = read_run_file(opt.run_b);
    Qrels qrels = read_qrels_file(opt.qrels);

    std::vector<std::string> only_a;
    std::vector<std::string> only_b;
    for (const auto& [qid, _] : run_a.per_query) {
        if (!run_b.per_query.count(qid)) only_a.push_back(qid);
    }
    for (const auto& [qid, _] : run_b.per_query) {
        if (!run_a.per_query.count(qid)) only_b.push_back(qid);
    }
    if (!only_a.empty() || !only_b.empty()) {
        std::ostringstream msg;
        msg << "runs cover different query sets;";
        if (!only_a.empty()) {
            msg << " only in " << opt.run_a << ":";
            for (const auto& qid : only_a) msg << ' ' << qid;
            msg << ";";
        }
        if (!only_b.empty()) {
            msg << " only in " << opt.run_b << ":";
            for (const auto& qid : only_b) msg << ' ' << qid;
        }
        throw Error(errc::eval, msg.str());
    }

    EvalSummary summary_a = evaluate_run(run_a, qrels);
    EvalSummary summary_b = evaluate_run(run_b, qrels);

    CompareReport report;
    report.map_a = summary_a.map;
    report.map_b = summary_b.map;

    std::unordered_map<std::string, double> ap_b;
    for (const auto& qm : summary_b.per_query) ap_b.emplace(qm.qid, qm.ap);
    for (const auto& qm : summary_a.per_query) {
        auto it = ap_b.find(qm.qid);
        if (it == ap_b.end()) continue;
        report.qids.push_back(qm.qid);
        report.ap_a.push_back(qm.ap);
        report.ap_b.push_back(it->second);
    }

    TTestResult test = paired_t_test(report.ap_a, report.ap_b);
    report.t = test.t;
    report.p = test.p;
    report.degenerate = test.degenerate;
    report.significant = !test.degenerate && test.p < opt.significance;

    if (opt.per_query) {
        out << "qid          AP(A)   AP(B)   diff\n";
        for (std::size_t i = 0; i < report.qids.size(); ++i) {
            char line[160];
            std::snprintf(line, sizeof(line), "%-10s %.4f  %.4f  %+.4f", report.qids[i].c_str(),
                          report.ap_a[i], report.ap_b[i], report.ap_a[i] - report.ap_b[i]);
            out << line << "\n";
        }
    }
    out << "MAP A " << format_percent(report.map_a) << " (" << opt.run_a << ")\n";
    out << "MAP B " << format_percent(report.map_b) << " (" << opt.run_b << ")\n";
    out << "delta " << format_percent(report.map_a - report.map_b) << " over " << report.qids.size()
        << " paired queries\n";
    char stats[128];
    std::snprintf(stats, sizeof(stats), "t = %.6f, p = %.6g", report.t, report.p);
    out << stats << (report.degenerate ? " (degenerate: zero-variance differences)" : "") << "\n";
    out << "significant at " << opt.significance << ": " << (report.significant ? "yes" : "no") << "\n";

    if (!opt.table_output.empty()) {
        std::ofstream tsv(opt.table_output);
        if (!tsv) throw Error(errc::io, "cannot write comparison table: " + opt.table_output);
        tsv << "qid\tap_a\tap_b\tdiff\n";
        for (std::size_t i = 0; i < report.qids.size(); ++i) {
            char line[200];
            std::snprintf(line, sizeof(line), "%s\t%.6f\t%.6f\t%.6f", report.qids[i].c_str(),
                          report.ap_a[i], report.ap_b[i], report.ap_a[i] - report.ap_b[i]);
            tsv << line << "\n";
        }
    }
    return report;
}

}  // namespace ltrank
