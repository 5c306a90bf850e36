#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "ltrank/evaluation.hpp"
#include "ltrank/models.hpp"

namespace ltrank {

struct BuildIndexOptions {
    std::string collection;
    std::string stoplist;  // empty: no stop words
    std::string output;    // index snapshot path
};

struct EmbedPrepOptions {
    std::string index;       // index snapshot path
    std::string embeddings;  // word2vec binary file
    std::string queries;     // optional; extends coverage reporting to query terms
    std::string stoplist;
    std::string output;  // neighbor cache path
    double threshold = 0.7;
    unsigned workers = 0;
};

struct SearchOptions {
    std::string index;
    std::string queries;
    std::string stoplist;
    std::string cache;  // neighbor cache, required for wetlm kinds
    std::string output;  // run file path
    std::string run_tag = "ltrank";
    ModelParams params;
    bool threshold_explicit = false;  // threshold came from the command line
    bool no_header = false;           // omit the provenance comment line
    unsigned workers = 0;
};

struct SweepOptions {
    SearchOptions search;      // shared inputs; search.params.mu ignored
    std::string qrels;
    std::vector<double> mu_grid;
    std::string table_output;  // machine-readable TSV path (optional)
    std::uint32_t k = 10;
};

struct EvalOptions {
    std::string run;
    std::string qrels;
    std::uint32_t k = 10;
    bool per_query = false;
    std::string table_output;  // optional TSV path
};

struct CompareOptions {
    std::string run_a;
    std::string run_b;
    std::string qrels;
    double significance = 0.01;
    bool per_query = false;
    std::string table_output;  // optional TSV path
};

struct SweepRow {
    double mu = 0.0;
    double map = 0.0;
    double p_at_k = 0.0;
};

struct CompareReport {
    double map_a = 0.0;
    double map_b = 0.0;
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;
    bool significant = false;
    std::vector<std::string> qids;  // paired order
    std::vector<double> ap_a;
    std::vector<double> ap_b;
};

void cmd_build_index(const BuildIndexOptions& opt, std::ostream& out);
void cmd_embed_prep(const EmbedPrepOptions& opt, std::ostream& out);
void cmd_search(const SearchOptions& opt, std::ostream& out);
std::vector<SweepRow> cmd_sweep(const SweepOptions& opt, std::ostream& out);
EvalSummary cmd_eval(const EvalOptions& opt, std::ostream& out);
CompareReport cmd_compare(const CompareOptions& opt, std::ostream& out);

/// Builds the TREC run for a query set entirely in memory. Queries run in
/// parallel; output order is fixed by qid, so results do not depend on the
/// worker count.
RunResult run_search(const DirectIndex& index, const std::vector<Query>& queries,
                     const ModelParams& params, const NeighborIndex* neighbors,
                     const std::string& run_tag, unsigned workers,
                     std::vector<std::string>* diagnostics = nullptr);

StopList load_stoplist(const std::string& path);  // empty path: empty list

}  // namespace ltrank
