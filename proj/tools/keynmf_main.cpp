#include <CLI11.hpp>
#include <iostream>

#include "keynmf/pipeline.hpp"

namespace {

// Exit codes: 0 success, 1 runtime failure, 2 usage/validation.
constexpr int kRuntimeError = 1;

void add_tokenizer_flags(CLI::App* cmd, keynmf::TokenizerOptions& tok) {
    cmd->add_option_function<std::string>(
           "--lexicon",
           [&tok](const std::string& v) { tok.lexicon = v; },
           "Lexicon file for dictionary segmentation (one token per line)")
        ->check(CLI::ExistingFile);
    cmd->add_option_function<std::string>(
           "--stopwords", [&tok](const std::string& v) { tok.stopwords = v; },
           "Stopword file (one token per line, '#' comments)")
        ->check(CLI::ExistingFile);
}

void add_solver_flags(CLI::App* cmd, keynmf::SolverConfig& solver) {
    cmd->add_option("--k", solver.k, "Number of topics (common presets: 10, 25, 50)")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--max-iter", solver.max_iter, "Maximum solver iterations")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--rel-tol", solver.rel_tol, "Relative loss-decrease stopping tolerance");
    cmd->add_option("--seed", solver.seed, "Seed for all randomness in the run");
    cmd->add_option_function<std::string>(
           "--init",
           [&solver](const std::string& v) {
               solver.init = v == "seeded-random" ? keynmf::NmfInit::SeededRandom
                                                  : keynmf::NmfInit::Nndsvd;
           },
           "NMF initialization: nndsvd | seeded-random")
        ->check(CLI::IsMember({"nndsvd", "seeded-random"}));
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"KeyNMF: contextual keyword topic models with dynamic slicing and "
                 "novelty/resonance information dynamics"};
    app.require_subcommand(1);

    keynmf::FitOptions fit;
    auto* cmd_fit = app.add_subcommand("fit", "Fit a topic model from a JSONL corpus");
    cmd_fit->add_option("--corpus", fit.corpus, "Corpus JSONL file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_fit->add_option("--embeddings", fit.embeddings,
                        "Provider: test:SEED | precomputed:PATH | http:URL")
        ->required();
    cmd_fit->add_option("--n-keywords", fit.n_keywords, "Keywords per document (default 15)")
        ->check(CLI::PositiveNumber);
    cmd_fit->add_flag("--dedupe", fit.dedupe, "Keep only the first observation of each id");
    cmd_fit->add_option("--out", fit.out, "Output model directory")->required();
    add_tokenizer_flags(cmd_fit, fit.tokenizer);
    add_solver_flags(cmd_fit, fit.solver);

    keynmf::DynamicOptions dyn;
    auto* cmd_dynamic =
        app.add_subcommand("dynamic", "Per-slice topic dynamics from a fitted model");
    cmd_dynamic->add_option("--model", dyn.model_dir, "Model directory from 'fit'")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd_dynamic->add_option("--slice-width", dyn.slice_width,
                            "Slice width, e.g. 6h, 1d (default 6h)");
    cmd_dynamic->add_option_function<std::string>(
        "--origin", [&dyn](const std::string& v) { dyn.origin = v; },
        "Slice origin (ISO-8601); default: earliest timestamp, hour-truncated");
    cmd_dynamic->add_option("--out", dyn.out, "Output directory")->required();

    keynmf::InfodynOptions infodyn;
    auto* cmd_infodyn =
        app.add_subcommand("infodyn", "Novelty/transience/resonance signals");
    cmd_infodyn->add_option("--dynamic", infodyn.dynamic_dir, "Directory from 'dynamic'")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd_infodyn->add_option("--window", infodyn.window, "JSD window (default 12)")
        ->check(CLI::PositiveNumber);
    cmd_infodyn->add_option("--span", infodyn.span, "Smoothing span (default 56)")
        ->check(CLI::PositiveNumber);
    cmd_infodyn->add_option("--degree", infodyn.degree, "Smoothing polynomial degree")
        ->check(CLI::NonNegativeNumber);
    cmd_infodyn
        ->add_option_function<std::string>(
            "--events", [&infodyn](const std::string& v) { infodyn.events = v; },
            "Event annotation JSONL ({label, start, end}) echoed into the output")
        ->check(CLI::ExistingFile);
    cmd_infodyn->add_option("--out", infodyn.out, "Output directory")->required();

    keynmf::EvalOptions eval;
    auto* cmd_eval = app.add_subcommand("eval", "Topic-quality metrics for a fitted model");
    cmd_eval->add_option("--model", eval.model_dir, "Model directory from 'fit'")
        ->required()
        ->check(CLI::ExistingDirectory);
    cmd_eval->add_option("--corpus", eval.corpus, "Reference corpus JSONL")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_eval->add_option("--embeddings", eval.embeddings, "External embedding provider")
        ->required();
    cmd_eval->add_option("--top-k", eval.top_k, "Words per topic description (default 10)")
        ->check(CLI::PositiveNumber);
    cmd_eval->add_option("--seed", eval.seed, "Seed (test provider)");
    cmd_eval->add_flag("--dedupe", eval.dedupe, "Keep only the first observation of each id");
    cmd_eval->add_option("--out", eval.out, "Output metrics JSON path")->required();
    add_tokenizer_flags(cmd_eval, eval.tokenizer);

    keynmf::SweepOptions sweep;
    auto* cmd_sweep =
        app.add_subcommand("sweep", "Metrics across a range of keyword counts");
    cmd_sweep->add_option("--corpus", sweep.corpus, "Corpus JSONL file")
        ->required()
        ->check(CLI::ExistingFile);
    cmd_sweep->add_option("--embeddings", sweep.embeddings, "Embedding provider")->required();
    cmd_sweep->add_option("--n-from", sweep.n_from, "Range start (default 5)")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--n-to", sweep.n_to, "Range end, inclusive (default 100)")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_option("--n-step", sweep.n_step, "Range step (default 5)")
        ->check(CLI::PositiveNumber);
    cmd_sweep->add_flag("--dedupe", sweep.dedupe, "Keep only the first observation of each id");
    cmd_sweep->add_option("--out", sweep.out, "Output CSV path")->required();
    add_tokenizer_flags(cmd_sweep, sweep.tokenizer);
    add_solver_flags(cmd_sweep, sweep.solver);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // usage/validation failures exit 2
    }

    try {
        if (cmd_fit->parsed()) keynmf::run_fit(fit);
        if (cmd_dynamic->parsed()) keynmf::run_dynamic(dyn);
        if (cmd_infodyn->parsed()) keynmf::run_infodyn(infodyn);
        if (cmd_eval->parsed()) keynmf::run_eval(eval);
        if (cmd_sweep->parsed()) keynmf::run_sweep(sweep);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kRuntimeError;
    }
    return 0;
}
