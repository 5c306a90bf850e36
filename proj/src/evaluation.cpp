#include "ltrank/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "ltrank/errors.hpp"
#include "ltrank/students_t.hpp"

namespace ltrank {

void Qrels::add(const std::string& qid, const std::string& docno, int grade) {
    if (grade < 0) throw Error(errc::format, "negative relevance grade for (" + qid + ", " + docno + ")");
    auto [it, fresh] = by_query_[qid].emplace(docno, grade);
    if (!fresh) {
        throw Error(errc::format, "duplicate qrels pair (" + qid + ", " + docno + ")");
    }
    if (grade > 0) relevant_[qid] += 1;
    else relevant_.try_emplace(qid, 0);
    ++judgments_;
}

bool Qrels::has_query(std::string_view qid) const {
    return by_query_.count(std::string(qid)) > 0;
}

int Qrels::grade(std::string_view qid, std::string_view docno) const {
    auto qit = by_query_.find(std::string(qid));
    if (qit == by_query_.end()) return 0;
    auto dit = qit->second.find(std::string(docno));
    return dit == qit->second.end() ? 0 : dit->second;
}

std::uint32_t Qrels::relevant_count(std::string_view qid) const {
    auto it = relevant_.find(std::string(qid));
    return it == relevant_.end() ? 0 : it->second;
}

std::vector<std::string> Qrels::qids() const {
    std::vector<std::string> out;
    out.reserve(by_query_.size());
    for (const auto& [qid, _] : by_query_) out.push_back(qid);
    return out;
}

Qrels read_qrels(std::istream& in) {
    Qrels qrels;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string qid, iteration, docno;
        long long grade;
        if (!(ls >> qid)) continue;  // blank line
        if (qid[0] == '#') continue;
        std::string extra;
        if (!(ls >> iteration >> docno >> grade) || (ls >> extra)) {
            throw Error(errc::format, "malformed qrels line " + std::to_string(line_no) + ": '" + line + "'");
        }
        if (grade < 0 || grade > std::numeric_limits<int>::max()) {
            throw Error(errc::format, "bad relevance grade on qrels line " + std::to_string(line_no));
        }
        try {
            qrels.add(qid, docno, static_cast<int>(grade));
        } catch (const Error& e) {
            throw Error(errc::format, std::string(e.what()) + " at qrels line " + std::to_string(line_no));
        }
    }
    return qrels;
}

Qrels read_qrels_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open qrels file: " + path);
    return read_qrels(in);
}

void write_run(const RunResult& run, std::ostream& out, const std::string& header) {
    if (!header.empty()) out << "# " << header << "\n";
    char score_buf[64];
    for (const auto& [qid, entries] : run.per_query) {
        std::uint32_t rank = 1;
        for (const auto& entry : entries) {
            std::snprintf(score_buf, sizeof(score_buf), "%.6f", entry.score);
            out << qid << " Q0 " << entry.docno << ' ' << rank << ' ' << score_buf << ' '
                << run.run_tag << "\n";
            ++rank;
        }
    }
}

void write_run_file(const RunResult& run, const std::string& path, const std::string& header) {
    std::ofstream out(path);
    if (!out) throw Error(errc::io, "cannot write run file: " + path);
    write_run(run, out, header);
    if (!out) throw Error(errc::io, "short write on run file: " + path);
}

RunResult read_run(std::istream& in) {
    RunResult run;
    std::string line;
    std::size_t line_no = 0;
    bool tag_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        std::istringstream ls(line);
        std::string qid, q0, docno, tag;
        long long rank;
        double score;
        if (!(ls >> qid)) continue;
        if (qid[0] == '#') continue;
        std::string extra;
        if (!(ls >> q0 >> docno >> rank >> score >> tag) || (ls >> extra)) {
            throw Error(errc::format, "malformed run line " + std::to_string(line_no) + ": '" + line + "'");
        }
        auto& entries = run.per_query[qid];
        if (rank != static_cast<long long>(entries.size()) + 1) {
            throw Error(errc::format, "non-contiguous rank " + std::to_string(rank) + " for query '" +
                                          qid + "' at run line " + std::to_string(line_no));
        }
        if (!entries.empty() && score > entries.back().score) {
            throw Error(errc::format, "increasing score at run line " + std::to_string(line_no) +
                                          " for query '" + qid + "'");
        }
        entries.push_back({docno, score});
        if (!tag_seen) {
            run.run_tag = tag;
            tag_seen = true;
        }
    }
    return run;
}

RunResult read_run_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(errc::io, "cannot open run file: " + path);
    return read_run(in);
}

double average_precision(std::span<const std::string> ranked, std::string_view qid, const Qrels& qrels) {
    if (!qrels.has_query(qid)) {
        throw Error(errc::eval, "query '" + std::string(qid) + "' is absent from the qrels");
    }
    std::uint32_t total_relevant = qrels.relevant_count(qid);
    if (total_relevant == 0) {
        throw Error(errc::eval, "query '" + std::string(qid) + "' has no relevant documents");
    }
    double sum = 0.0;
    std::uint32_t hits = 0;
    for (std::size_t i = 0; i < ranked.size(); ++i) {
        if (qrels.grade(qid, ranked[i]) > 0) {
            ++hits;
            sum += static_cast<double>(hits) / static_cast<double>(i + 1);
        }
    }
    return sum / static_cast<double>(total_relevant);
}

double precision_at_k(std::span<const std::string> ranked, std::string_view qid, const Qrels& qrels,
                      std::uint32_t k) {
    if (k == 0) throw Error(errc::eval, "precision_at_k requires k > 0");
    if (!qrels.has_query(qid)) {
        throw Error(errc::eval, "query '" + std::string(qid) + "' is absent from the qrels");
    }
    std::uint32_t hits = 0;
    std::size_t limit = std::min<std::size_t>(k, ranked.size());
    for (std::size_t i = 0; i < limit; ++i) {
        if (qrels.grade(qid, ranked[i]) > 0) ++hits;
    }
    return static_cast<double>(hits) / static_cast<double>(k);
}

EvalSummary evaluate_run(const RunResult& run, const Qrels& qrels, std::uint32_t k) {
    EvalSummary summary;
    double ap_sum = 0.0;
    double p_sum = 0.0;
    for (const auto& [qid, entries] : run.per_query) {
        if (!qrels.has_query(qid) || qrels.relevant_count(qid) == 0) {
            summary.skipped_qids.push_back(qid);
            continue;
        }
        std::vector<std::string> ranked;
        ranked.reserve(entries.size());
        for (const auto& entry : entries) ranked.push_back(entry.docno);
        QueryMetrics qm;
        qm.qid = qid;
        qm.ap = average_precision(ranked, qid, qrels);
        qm.p_at_k = precision_at_k(ranked, qid, qrels, k);
        ap_sum += qm.ap;
        p_sum += qm.p_at_k;
        summary.per_query.push_back(std::move(qm));
    }
    summary.evaluated = static_cast<std::uint32_t>(summary.per_query.size());
    if (summary.evaluated == 0) {
        throw Error(errc::eval, "no run query has judged-relevant documents");
    }
    summary.map = ap_sum / summary.evaluated;
    summary.mean_p_at_k = p_sum / summary.evaluated;
    return summary;
}

TTestResult paired_t_test(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw Error(errc::eval, "paired t-test requires equally sized samples");
    }
    std::size_t n = a.size();
    if (n < 2) throw Error(errc::eval, "paired t-test requires at least 2 pairs");

    double mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
    mean /= static_cast<double>(n);

    double ss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double d = (a[i] - b[i]) - mean;
        ss += d * d;
    }
    double variance = ss / static_cast<double>(n - 1);

    TTestResult result;
    if (variance == 0.0) {
        if (mean == 0.0) {
            result.t = 0.0;
            result.p = 1.0;
        } else {
            result.t = mean > 0 ? std::numeric_limits<double>::infinity()
                                : -std::numeric_limits<double>::infinity();
            result.p = 0.0;
            result.degenerate = true;
        }
        return result;
    }
    result.t = mean / std::sqrt(variance / static_cast<double>(n));
    result.p = student_t_two_sided_p(result.t, static_cast<double>(n - 1));
    return result;
}

}  // namespace ltrank
