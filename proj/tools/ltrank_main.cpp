#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ltrank/commands.hpp"
#include "ltrank/errors.hpp"

namespace {

std::vector<double> default_mu_grid() {
    std::vector<double> grid;
    for (int mu = 12; mu <= 88; mu += 4) grid.push_back(mu);
    return grid;
}

void add_model_options(CLI::App* cmd, ltrank::SearchOptions& opt, std::string& model_name,
                       bool require_mu) {
    cmd->add_option("--model", model_name,
                    "Ranking model: dirichlet, dirichlet-closed, dirichlet-terrier, tlm-mi, wetlm, "
                    "wetlm-alpha")
        ->default_val("dirichlet");
    auto* mu = cmd->add_option("--mu", opt.params.mu, "Dirichlet smoothing parameter");
    if (require_mu) mu->required();
    cmd->add_option("--threshold,-T", opt.params.threshold, "Cosine threshold T")
        ->default_val(0.7);
    cmd->add_option("--alpha", opt.params.alpha, "Self-translation weight alpha")->default_val(0.45);
    cmd->add_option("--top-k", opt.params.top_k, "Result list size")->default_val(1000);
    cmd->add_option("--cache", opt.cache, "Neighbor cache file (wetlm kinds)");
    cmd->add_option("--stoplist", opt.stoplist, "Stop list file");
    cmd->add_option("--workers", opt.workers, "Worker threads (0 = all cores)")->default_val(0);
    cmd->add_option("--run-tag", opt.run_tag, "Run tag written to the run file")->default_val("ltrank");
    cmd->add_flag("--no-header", opt.no_header,
                  "Omit the provenance comment line (strict TREC run format)");
}

void resolve_model(const CLI::App* cmd, const std::string& model_name, ltrank::SearchOptions& opt) {
    auto kind = ltrank::parse_model_kind(model_name);
    if (!kind) throw ltrank::Error(ltrank::errc::config, "unknown model '" + model_name + "'");
    opt.params.kind = *kind;
    opt.threshold_explicit = cmd->count("--threshold") > 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"ltrank: language-model retrieval with embedding-based translation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Read options from an INI/TOML file");

    // build-index
    ltrank::BuildIndexOptions build_opt;
    auto* build = app.add_subcommand("build-index", "Ingest a TREC collection into an index snapshot");
    build->add_option("--collection", build_opt.collection, "TREC collection file")->required();
    build->add_option("--stoplist", build_opt.stoplist, "Stop list file");
    build->add_option("--output,-o", build_opt.output, "Index snapshot path")->required();

    // embed-prep
    ltrank::EmbedPrepOptions prep_opt;
    auto* prep = app.add_subcommand("embed-prep", "Build the thresholded cosine neighbor cache");
    prep->add_option("--index", prep_opt.index, "Index snapshot")->required();
    prep->add_option("--embeddings", prep_opt.embeddings, "word2vec binary file")->required();
    prep->add_option("--queries", prep_opt.queries, "Query file (extends the coverage report)");
    prep->add_option("--stoplist", prep_opt.stoplist, "Stop list file");
    prep->add_option("--threshold,-T", prep_opt.threshold, "Cosine threshold T")->default_val(0.7);
    prep->add_option("--workers", prep_opt.workers, "Worker threads (0 = all cores)")->default_val(0);
    prep->add_option("--output,-o", prep_opt.output, "Neighbor cache path")->required();

    // search
    ltrank::SearchOptions search_opt;
    std::string search_model;
    auto* search = app.add_subcommand("search", "Rank documents for a query file, write a TREC run");
    search->add_option("--index", search_opt.index, "Index snapshot")->required();
    search->add_option("--queries", search_opt.queries, "Query file")->required();
    search->add_option("--output,-o", search_opt.output, "Run file path")->required();
    add_model_options(search, search_opt, search_model, /*require_mu=*/true);

    // sweep
    ltrank::SweepOptions sweep_opt;
    std::string sweep_model;
    std::vector<double> sweep_grid;
    auto* sweep = app.add_subcommand("sweep", "Evaluate a mu grid, print MAP and P@10 per value");
    sweep->add_option("--index", sweep_opt.search.index, "Index snapshot")->required();
    sweep->add_option("--queries", sweep_opt.search.queries, "Query file")->required();
    sweep->add_option("--qrels", sweep_opt.qrels, "Relevance judgments")->required();
    sweep->add_option("--grid", sweep_grid, "mu values (default: 12 to 88 step 4)");
    sweep->add_option("--tsv", sweep_opt.table_output, "Machine-readable output path");
    sweep->add_option("--k", sweep_opt.k, "Precision cutoff")->default_val(10);
    add_model_options(sweep, sweep_opt.search, sweep_model, /*require_mu=*/false);

    // eval
    ltrank::EvalOptions eval_opt;
    auto* eval = app.add_subcommand("eval", "Score a run file against qrels (MAP, P@k)");
    eval->add_option("--run", eval_opt.run, "Run file")->required();
    eval->add_option("--qrels", eval_opt.qrels, "Relevance judgments")->required();
    eval->add_option("--k", eval_opt.k, "Precision cutoff")->default_val(10);
    eval->add_flag("--per-query", eval_opt.per_query, "Print per-query metrics");
    eval->add_option("--tsv", eval_opt.table_output, "Machine-readable output path");

    // compare
    ltrank::CompareOptions cmp_opt;
    auto* cmp = app.add_subcommand("compare", "Paired t-test between two runs over per-query AP");
    cmp->add_option("--run-a", cmp_opt.run_a, "First run file")->required();
    cmp->add_option("--run-b", cmp_opt.run_b, "Second run file")->required();
    cmp->add_option("--qrels", cmp_opt.qrels, "Relevance judgments")->required();
    cmp->add_option("--significance", cmp_opt.significance, "Significance threshold")
        ->default_val(0.01);
    cmp->add_flag("--per-query", cmp_opt.per_query, "Print per-query AP pairs");
    cmp->add_option("--tsv", cmp_opt.table_output, "Machine-readable output path");

    CLI11_PARSE(app, argc, argv);

    try {
        if (build->parsed()) {
            ltrank::cmd_build_index(build_opt, std::cout);
        } else if (prep->parsed()) {
            ltrank::cmd_embed_prep(prep_opt, std::cout);
        } else if (search->parsed()) {
            resolve_model(search, search_model, search_opt);
            ltrank::cmd_search(search_opt, std::cout);
        } else if (sweep->parsed()) {
            resolve_model(sweep, sweep_model, sweep_opt.search);
            sweep_opt.mu_grid = sweep_grid.empty() ? default_mu_grid() : sweep_grid;
            ltrank::cmd_sweep(sweep_opt, std::cout);
        } else if (eval->parsed()) {
            ltrank::cmd_eval(eval_opt, std::cout);
        } else if (cmp->parsed()) {
            ltrank::cmd_compare(cmp_opt, std::cout);
        }
    } catch (const ltrank::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
