#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "keynmf/dynamic.hpp"
#include "keynmf/embed.hpp"
#include "keynmf/infodyn.hpp"
#include "keynmf/keywords.hpp"
#include "keynmf/metrics.hpp"
#include "keynmf/nmf.hpp"

namespace py = pybind11;
using namespace keynmf;

namespace {

SolverConfig make_config(int k, int max_iter, double rel_tol, const std::string& init,
                         std::uint64_t seed) {
    SolverConfig cfg;
    cfg.k = k;
    cfg.max_iter = max_iter;
    cfg.rel_tol = rel_tol;
    if (init == "seeded-random")
        cfg.init = NmfInit::SeededRandom;
    else if (init == "nndsvd")
        cfg.init = NmfInit::Nndsvd;
    else
        throw Error("unknown init '" + init + "' (expected nndsvd | seeded-random)");
    cfg.seed = seed;
    return cfg;
}

KeywordMatrix keyword_matrix_of(const Eigen::MatrixXd& m) {
    KeywordMatrix km;
    for (Eigen::Index c = 0; c < m.cols(); ++c)
        km.vocabulary.push_back("w" + std::to_string(c));
    for (Eigen::Index r = 0; r < m.rows(); ++r)
        km.doc_ids.push_back("d" + std::to_string(r));
    km.cells = m.sparseView();
    return km;
}

TopicDescriptions descriptions_of(const std::vector<std::vector<std::string>>& topics) {
    return TopicDescriptions{topics};
}

std::vector<TokenizedDocument> corpus_of(const std::vector<std::vector<std::string>>& docs) {
    std::vector<TokenizedDocument> out;
    for (std::size_t i = 0; i < docs.size(); ++i)
        out.push_back({"d" + std::to_string(i), docs[i]});
    return out;
}

}  // namespace

PYBIND11_MODULE(_keynmf, m) {
    m.doc() = "KeyNMF: keyword topic models with dynamic slicing and information dynamics";
    m.attr("__version__") = KEYNMF_VERSION;

    py::register_exception<Error>(m, "KeynmfError");

    m.def("cosine_similarity", &cosine_similarity, py::arg("a"), py::arg("b"));

    m.def(
        "test_embed",
        [](const std::vector<std::string>& texts, std::uint64_t seed, int dim) {
            TestEmbedder embedder(seed, dim);
            return embed_batch(embedder, texts);
        },
        py::arg("texts"), py::arg("seed") = 0, py::arg("dim") = 64,
        "Deterministic offline embedder used for tests and reproducible runs");

    m.def(
        "extract_keywords",
        [](const std::vector<std::string>& tokens, const Eigen::VectorXd& doc_vec,
           const std::unordered_map<std::string, Eigen::VectorXd>& word_vecs, int n) {
            return extract_keywords({"doc", tokens}, doc_vec, word_vecs, n).entries;
        },
        py::arg("tokens"), py::arg("doc_vector"), py::arg("word_vectors"),
        py::arg("n") = 15,
        "Top-n keywords: positive-cosine tokens ranked by similarity to the document");

    m.def(
        "fit_nmf",
        [](const Eigen::MatrixXd& matrix, int k, int max_iter, double rel_tol,
           const std::string& init, std::uint64_t seed) {
            auto model =
                fit_nmf(keyword_matrix_of(matrix), make_config(k, max_iter, rel_tol, init, seed));
            py::dict out;
            out["W"] = model.W;
            out["H"] = model.H;
            out["loss"] = model.final_loss;
            out["iterations"] = model.iterations_run;
            out["loss_history"] = model.loss_history;
            return out;
        },
        py::arg("matrix"), py::arg("k"), py::arg("max_iter") = 200,
        py::arg("rel_tol") = 1e-4, py::arg("init") = "nndsvd", py::arg("seed") = 0,
        "Non-negative factorization matrix ~ W @ H by coordinate descent");

    m.def(
        "solve_h_fixed_w",
        [](const Eigen::MatrixXd& matrix, const Eigen::MatrixXd& w, int max_iter,
           double rel_tol) {
            auto cfg = make_config(static_cast<int>(w.cols()), max_iter, rel_tol, "nndsvd", 0);
            return solve_h_fixed_w(matrix.sparseView(), w, cfg);
        },
        py::arg("matrix"), py::arg("W"), py::arg("max_iter") = 200,
        py::arg("rel_tol") = 1e-4, "Least-squares non-negative H for a frozen W");

    m.def(
        "fit_dynamic",
        [](const Eigen::MatrixXd& matrix, const std::vector<std::vector<std::size_t>>& slices,
           int k, int max_iter, double rel_tol, const std::string& init, std::uint64_t seed) {
            std::map<std::int64_t, std::vector<std::size_t>> slice_map;
            for (std::size_t i = 0; i < slices.size(); ++i)
                slice_map[static_cast<std::int64_t>(i)] = slices[i];
            auto dyn = fit_dynamic(keyword_matrix_of(matrix), slice_map,
                                   make_config(k, max_iter, rel_tol, init, seed));
            py::dict out;
            out["W"] = dyn.base.W;
            out["H"] = dyn.base.H;
            out["importance"] = dyn.importance;
            out["p_hat"] = dyn.p_hat;
            out["h_t"] = dyn.h_t;
            out["degenerate_slices"] = dyn.degenerate_slices;
            return out;
        },
        py::arg("matrix"), py::arg("slices"), py::arg("k"), py::arg("max_iter") = 200,
        py::arg("rel_tol") = 1e-4, py::arg("init") = "nndsvd", py::arg("seed") = 0,
        "Global fit plus per-slice H_t refits; slices list row indices per slice");

    m.def("jsd", &jsd, py::arg("p"), py::arg("q"),
          "Jensen-Shannon divergence, base 2, in [0, 1]");
    m.def("novelty", &novelty, py::arg("series"), py::arg("t"), py::arg("n"));
    m.def("transience", &transience, py::arg("series"), py::arg("t"), py::arg("n"));

    m.def(
        "resonance_series",
        [](const Eigen::MatrixXd& p_hat, int n, int span, int degree) {
            auto s = resonance_series(p_hat, n);
            if (span > 0) smooth_signals(s, span, degree);
            py::dict out;
            out["novelty"] = s.novelty;
            out["transience"] = s.transience;
            out["resonance"] = s.resonance;
            out["novelty_smooth"] = s.novelty_smooth;
            out["resonance_smooth"] = s.resonance_smooth;
            out["window"] = s.window;
            out["span"] = s.span;
            return out;
        },
        py::arg("p_hat"), py::arg("n") = 12, py::arg("span") = 0, py::arg("degree") = 2,
        "Novelty/transience/resonance per slice; absent edge points are None. "
        "span > 0 additionally fills the smoothed variants");

    m.def("adaptive_filter", &adaptive_filter, py::arg("signal"), py::arg("span"),
          py::arg("degree") = 2,
          "Overlapping-segment polynomial smoother with linear cross-fade");

    m.def(
        "diversity",
        [](const std::vector<std::vector<std::string>>& topics) {
            return diversity(descriptions_of(topics));
        },
        py::arg("topics"), "Unique words over total word slots across topic descriptions");

    m.def(
        "embedding_coherence",
        [](const std::vector<std::vector<std::string>>& topics,
           const std::unordered_map<std::string, Eigen::VectorXd>& word_vecs) {
            if (word_vecs.empty()) throw Error("word_vectors is empty");
            int dim = static_cast<int>(word_vecs.begin()->second.size());
            MapProvider provider(word_vecs, dim);
            return embedding_coherence(descriptions_of(topics), provider);
        },
        py::arg("topics"), py::arg("word_vectors"),
        "Mean pairwise cosine among each topic's words, averaged over topics");

    m.def(
        "train_internal_embeddings",
        [](const std::vector<std::vector<std::string>>& docs, int dim, int window) {
            return train_internal_embeddings(corpus_of(docs), dim, window);
        },
        py::arg("docs"), py::arg("dim"), py::arg("window") = 10,
        "PPMI + truncated-SVD word vectors trained on a tokenized corpus");

    m.def(
        "npmi_coherence",
        [](const std::vector<std::vector<std::string>>& topics,
           const std::vector<std::vector<std::string>>& reference, int window) {
            return npmi_coherence(descriptions_of(topics), corpus_of(reference), window);
        },
        py::arg("topics"), py::arg("reference"), py::arg("window") = 10,
        "Mean pairwise NPMI from sliding-window co-occurrence counts");
}
