#pragma once

#include <cstdint>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ltrank {

/// Relevance judgments: (qid, docno) -> grade, grade > 0 means relevant.
class Qrels {
  public:
    /// Throws on duplicate (qid, docno) pairs or negative grades.
    void add(const std::string& qid, const std::string& docno, int grade);

    bool has_query(std::string_view qid) const;
    int grade(std::string_view qid, std::string_view docno) const;  // 0 when unjudged
    std::uint32_t relevant_count(std::string_view qid) const;
    std::vector<std::string> qids() const;  // sorted
    std::size_t judgment_count() const { return judgments_; }

  private:
    std::map<std::string, std::unordered_map<std::string, int>> by_query_;
    std::map<std::string, std::uint32_t> relevant_;
    std::size_t judgments_ = 0;
};

/// Parses whitespace-delimited "qid 0 docno grade" lines; parse failures
/// and duplicate pairs are reported with their line number.
Qrels read_qrels(std::istream& in);
Qrels read_qrels_file(const std::string& path);

struct RunEntry {
    std::string docno;
    double score = 0.0;
};

/// Ranked results for a set of queries. Entries are stored in rank order
/// (rank i+1 at position i) with non-increasing scores.
struct RunResult {
    std::string run_tag = "ltrank";
    std::map<std::string, std::vector<RunEntry>> per_query;  // qid -> ranked docs
};

/// Writes "qid Q0 docno rank score runTag" lines, scores with 6 decimals,
/// sorted by qid then rank. A non-empty header is emitted first as a
/// '#'-prefixed comment line.
void write_run(const RunResult& run, std::ostream& out, const std::string& header = "");
void write_run_file(const RunResult& run, const std::string& path, const std::string& header = "");

/// Parses a run file ('#' comment lines are skipped). Validates that ranks
/// are contiguous from 1 and scores non-increasing per query.
RunResult read_run(std::istream& in);
RunResult read_run_file(const std::string& path);

/// Mean over all judged-relevant documents of the precision at each
/// retrieved relevant document's rank; unretrieved relevant documents
/// contribute 0. Requires the query to have judged-relevant documents.
double average_precision(std::span<const std::string> ranked, std::string_view qid, const Qrels& qrels);

/// Relevant documents among the first k positions divided by k; missing
/// positions count as non-relevant.
double precision_at_k(std::span<const std::string> ranked, std::string_view qid, const Qrels& qrels,
                      std::uint32_t k = 10);

struct QueryMetrics {
    std::string qid;
    double ap = 0.0;
    double p_at_k = 0.0;
};

struct EvalSummary {
    double map = 0.0;
    double mean_p_at_k = 0.0;
    std::uint32_t evaluated = 0;               // queries with relevant docs
    std::vector<std::string> skipped_qids;     // run queries without relevant docs
    std::vector<QueryMetrics> per_query;       // evaluated queries, qid order
};

/// MAP and mean P@k over the run's queries that have at least one
/// judged-relevant document; the rest are excluded and reported.
EvalSummary evaluate_run(const RunResult& run, const Qrels& qrels, std::uint32_t k = 10);

struct TTestResult {
    double t = 0.0;
    double p = 1.0;
    bool degenerate = false;  // zero-variance differences with nonzero mean
};

/// Paired two-sided t-test over per-query metric values (sample standard
/// deviation, n-1 degrees of freedom). Identical samples give p = 1;
/// zero-variance nonzero differences are flagged with an infinite t.
TTestResult paired_t_test(std::span<const double> a, std::span<const double> b);

}  // namespace ltrank
