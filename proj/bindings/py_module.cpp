#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "ltrank/commands.hpp"
#include "ltrank/embeddings.hpp"
#include "ltrank/errors.hpp"
#include "ltrank/evaluation.hpp"
#include "ltrank/index.hpp"
#include "ltrank/models.hpp"
#include "ltrank/neighbors.hpp"
#include "ltrank/students_t.hpp"
#include "ltrank/text_pipeline.hpp"

namespace py = pybind11;
using namespace ltrank;

namespace {

StopList stoplist_from(const std::vector<std::string>& words) {
    StopList list;
    for (const auto& w : words) list.insert(w);
    return list;
}

ModelParams params_from(const std::string& model, double mu, double threshold, double alpha,
                        std::uint32_t top_k) {
    auto kind = parse_model_kind(model);
    if (!kind) throw Error(errc::config, "unknown model '" + model + "'");
    ModelParams params;
    params.kind = *kind;
    params.mu = mu;
    params.threshold = threshold;
    params.alpha = alpha;
    params.top_k = top_k;
    params.validate();
    return params;
}

}  // namespace

PYBIND11_MODULE(_ltrank, m) {
    m.doc() = "In-memory query-likelihood retrieval with embedding-based translation models";

    py::register_exception<Error>(m, "LtrankError");

    // text pipeline
    m.def("tokenize", [](const std::string& raw) { return tokenize(raw); });
    m.def(
        "preprocess",
        [](const std::string& raw, const std::vector<std::string>& stop_words) {
            return preprocess(raw, stoplist_from(stop_words));
        },
        py::arg("raw"), py::arg("stop_words") = std::vector<std::string>{});
    m.def("load_stoplist", [](const std::string& path) {
        StopList list = StopList::from_file(path);
        return list.size();
    });

    // index
    py::class_<PairPresence>(m, "PairPresence")
        .def_readonly("n_w", &PairPresence::n_w)
        .def_readonly("n_u", &PairPresence::n_u)
        .def_readonly("n_wu", &PairPresence::n_wu)
        .def_readonly("n_docs", &PairPresence::n_docs);

    py::class_<DirectIndex>(m, "DirectIndex")
        .def_property_readonly("doc_count",
                               [](const DirectIndex& ix) { return ix.stats().doc_count; })
        .def_property_readonly("total_tokens",
                               [](const DirectIndex& ix) { return ix.stats().total_tokens; })
        .def_property_readonly("vocab_size", [](const DirectIndex& ix) { return ix.vocab_size(); })
        .def_property_readonly("avdl", [](const DirectIndex& ix) { return ix.stats().avdl; })
        .def("terms", [](const DirectIndex& ix) { return ix.terms(); })
        .def("collection_prob",
             [](const DirectIndex& ix, const std::string& term) { return ix.collection_prob(term); })
        .def("pair_presence", [](const DirectIndex& ix, const std::string& w, const std::string& u) {
            return ix.pair_presence(w, u);
        })
        .def("save", &DirectIndex::save)
        .def_static("load", &DirectIndex::load);

    m.def(
        "build_index",
        [](const std::vector<std::pair<std::string, std::vector<std::string>>>& docs) {
            IndexBuilder builder;
            for (const auto& [docno, tokens] : docs) builder.add_document(docno, tokens);
            return builder.build();
        },
        py::arg("docs"), "Build an index from (docno, tokens) pairs");
    m.def(
        "ingest_trec",
        [](const std::string& path, const std::string& stoplist_path) {
            return ingest_trec_file(path, load_stoplist(stoplist_path));
        },
        py::arg("path"), py::arg("stoplist_path") = std::string());

    // embeddings and neighbors
    py::class_<EmbeddingTable>(m, "EmbeddingTable")
        .def_property_readonly("dim", &EmbeddingTable::dim)
        .def("__len__", &EmbeddingTable::size)
        .def("__contains__",
             [](const EmbeddingTable& t, const std::string& term) { return t.contains(term); })
        .def("vector", [](const EmbeddingTable& t, const std::string& term) {
            auto v = t.vector(term);
            return std::vector<float>(v.begin(), v.end());
        });

    m.def(
        "load_word2vec",
        [](const std::string& path, const std::optional<std::vector<std::string>>& vocab) {
            std::optional<std::unordered_set<std::string>> filter;
            if (vocab) filter.emplace(vocab->begin(), vocab->end());
            return load_word2vec_file(path, filter, nullptr);
        },
        py::arg("path"), py::arg("vocab") = std::nullopt);

    m.def("cosine", [](const std::vector<double>& a, const std::vector<double>& b) {
        return cosine(std::span<const double>(a), std::span<const double>(b));
    });

    py::class_<NeighborIndex>(m, "NeighborIndex")
        .def_property_readonly("threshold", &NeighborIndex::threshold)
        .def("__len__", &NeighborIndex::size)
        .def("neighbors",
             [](const NeighborIndex& nbr, const std::string& term) {
                 std::vector<std::pair<std::string, double>> out;
                 auto row = nbr.row_id(term);
                 if (row) {
                     for (const auto& n : nbr.neighbors(*row)) out.emplace_back(nbr.term(n.term), n.cos);
                 }
                 return out;
             })
        .def("normalizer",
             [](const NeighborIndex& nbr, const std::string& term) {
                 auto row = nbr.row_id(term);
                 return row ? nbr.normalizer(*row) : 0.0;
             })
        .def("save", &NeighborIndex::save)
        .def_static("load", &NeighborIndex::load);

    m.def(
        "build_neighbor_index",
        [](const EmbeddingTable& table, const std::vector<std::string>& vocab, double threshold,
           unsigned workers) { return build_neighbor_index(table, vocab, threshold, workers); },
        py::arg("table"), py::arg("vocab"), py::arg("threshold"), py::arg("workers") = 0);

    py::class_<CoverageReport>(m, "CoverageReport")
        .def_property_readonly("type_fraction", &CoverageReport::type_fraction)
        .def_property_readonly("token_fraction", &CoverageReport::token_fraction)
        .def_property_readonly("query_term_fraction", &CoverageReport::query_term_fraction)
        .def_property_readonly("uncovered_query_fraction", &CoverageReport::uncovered_query_fraction);

    m.def("coverage_stats", [](const EmbeddingTable& table, const DirectIndex& index,
                               const std::vector<std::vector<std::string>>& queries) {
        return coverage_stats(table, index, queries);
    });

    // scoring
    m.def(
        "rank",
        [](const DirectIndex& index, const std::vector<std::string>& terms, const std::string& model,
           double mu, double threshold, double alpha, std::uint32_t top_k,
           const NeighborIndex* neighbors) {
            ModelParams params = params_from(model, mu, threshold, alpha, top_k);
            Query query{"q", terms};
            RankOutcome outcome = rank_documents(query, index, neighbors, params);
            std::vector<std::pair<std::string, double>> out;
            out.reserve(outcome.docs.size());
            for (const auto& sd : outcome.docs) out.emplace_back(sd.docno, sd.score);
            return out;
        },
        py::arg("index"), py::arg("terms"), py::arg("model") = "dirichlet", py::arg("mu") = 44.0,
        py::arg("threshold") = 0.7, py::arg("alpha") = 0.45, py::arg("top_k") = 1000,
        py::arg("neighbors") = nullptr,
        "Rank all documents for one query; returns (docno, score) pairs");

    m.def(
        "dirichlet_term_prob",
        [](const DirectIndex& index, std::size_t doc, const std::string& term, double mu) {
            return dirichlet_term_prob(term, index.documents().at(doc), index, mu);
        },
        py::arg("index"), py::arg("doc"), py::arg("term"), py::arg("mu"));

    // evaluation
    py::class_<Qrels>(m, "Qrels")
        .def(py::init<>())
        .def("add", &Qrels::add)
        .def("relevant_count",
             [](const Qrels& q, const std::string& qid) { return q.relevant_count(qid); })
        .def_static("read", &read_qrels_file);

    m.def("average_precision",
          [](const std::vector<std::string>& ranked, const std::string& qid, const Qrels& qrels) {
              return average_precision(ranked, qid, qrels);
          });
    m.def(
        "precision_at_k",
        [](const std::vector<std::string>& ranked, const std::string& qid, const Qrels& qrels,
           std::uint32_t k) { return precision_at_k(ranked, qid, qrels, k); },
        py::arg("ranked"), py::arg("qid"), py::arg("qrels"), py::arg("k") = 10);
    m.def(
        "evaluate_run",
        [](const std::string& run_path, const std::string& qrels_path, std::uint32_t k) {
            EvalSummary summary = evaluate_run(read_run_file(run_path), read_qrels_file(qrels_path), k);
            py::dict out;
            out["map"] = summary.map;
            out["p_at_k"] = summary.mean_p_at_k;
            out["evaluated"] = summary.evaluated;
            out["skipped"] = summary.skipped_qids;
            return out;
        },
        py::arg("run_path"), py::arg("qrels_path"), py::arg("k") = 10);
    m.def("paired_t_test", [](const std::vector<double>& a, const std::vector<double>& b) {
        TTestResult r = paired_t_test(a, b);
        return py::make_tuple(r.t, r.p, r.degenerate);
    });
    m.def("student_t_two_sided_p", &student_t_two_sided_p);

    m.attr("__version__") = "0.1.0";
}
