#include "keynmf/metrics.hpp"

#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <map>
#include <set>

namespace keynmf {

namespace {

void check_descriptions(const TopicDescriptions& desc) {
    if (desc.topics.empty()) throw Error("topic descriptions are empty");
    for (const auto& words : desc.topics) {
        if (words.empty()) throw Error("a topic description has no words");
        std::set<std::string> distinct(words.begin(), words.end());
        if (distinct.size() != words.size())
            throw Error("a topic description contains repeated words");
    }
}

std::vector<std::string> all_distinct_words(const TopicDescriptions& desc) {
    std::set<std::string> words;
    for (const auto& topic : desc.topics) words.insert(topic.begin(), topic.end());
    return {words.begin(), words.end()};
}

}  // namespace

double diversity(const TopicDescriptions& desc) {
    check_descriptions(desc);
    std::set<std::string> unique;
    std::size_t slots = 0;
    for (const auto& topic : desc.topics) {
        unique.insert(topic.begin(), topic.end());
        slots += topic.size();
    }
    return static_cast<double>(unique.size()) / static_cast<double>(slots);
}

std::vector<double> embedding_coherence_per_topic(const TopicDescriptions& desc,
                                                  EmbeddingProvider& provider) {
    check_descriptions(desc);
    auto words = all_distinct_words(desc);
    auto vectors = embed_batch(provider, words);
    std::unordered_map<std::string, EmbeddingVector> vec_of;
    for (std::size_t i = 0; i < words.size(); ++i) vec_of[words[i]] = vectors[i];

    std::vector<double> per_topic;
    per_topic.reserve(desc.topics.size());
    for (const auto& topic : desc.topics) {
        double total = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < topic.size(); ++i) {
            for (std::size_t j = i + 1; j < topic.size(); ++j) {
                total += cosine_similarity(vec_of.at(topic[i]), vec_of.at(topic[j]));
                ++pairs;
            }
        }
        per_topic.push_back(pairs > 0 ? total / pairs
                                      : std::numeric_limits<double>::quiet_NaN());
    }
    return per_topic;
}

double embedding_coherence(const TopicDescriptions& desc, EmbeddingProvider& provider) {
    auto per_topic = embedding_coherence_per_topic(desc, provider);
    double total = 0.0;
    int counted = 0;
    for (double v : per_topic) {
        if (!std::isnan(v)) {
            total += v;
            ++counted;
        }
    }
    if (counted == 0) throw Error("embedding_coherence: no topic has two or more words");
    return total / counted;
}

std::unordered_map<std::string, EmbeddingVector> train_internal_embeddings(
    const std::vector<TokenizedDocument>& docs, int dim, int window) {
    if (docs.empty()) throw Error("train_internal_embeddings: empty corpus");
    if (dim < 2) throw Error("train_internal_embeddings: dim must be >= 2");
    if (window < 1) throw Error("train_internal_embeddings: window must be >= 1");

    std::map<std::string, int> index_of;
    for (const auto& doc : docs)
        for (const auto& token : doc.tokens) index_of.emplace(token, 0);
    int v = 0;
    for (auto& [word, idx] : index_of) idx = v++;
    if (v < dim)
        throw Error("train_internal_embeddings: vocabulary size " + std::to_string(v) +
                    " is smaller than dim " + std::to_string(dim));

    // symmetric-window co-occurrence counts, within document
    DenseMatrix counts = DenseMatrix::Zero(v, v);
    for (const auto& doc : docs) {
        const auto& t = doc.tokens;
        for (std::size_t i = 0; i < t.size(); ++i) {
            int a = index_of.at(t[i]);
            std::size_t end = std::min(t.size(), i + 1 + static_cast<std::size_t>(window));
            for (std::size_t j = i + 1; j < end; ++j) {
                int b = index_of.at(t[j]);
                counts(a, b) += 1.0;
                counts(b, a) += 1.0;
            }
        }
    }

    double total = counts.sum();
    if (total <= 0.0)
        throw Error("train_internal_embeddings: no co-occurrences in the corpus");
    Eigen::VectorXd marginal = counts.rowwise().sum() / total;

    DenseMatrix ppmi = DenseMatrix::Zero(v, v);
    for (int i = 0; i < v; ++i) {
        for (int j = 0; j < v; ++j) {
            if (counts(i, j) <= 0.0) continue;
            double pij = counts(i, j) / total;
            double pmi = std::log(pij / (marginal[i] * marginal[j]));
            if (pmi > 0.0) ppmi(i, j) = pmi;
        }
    }

    Eigen::BDCSVD<DenseMatrix> svd(ppmi, Eigen::ComputeThinU);
    DenseMatrix vectors =
        svd.matrixU().leftCols(dim) *
        svd.singularValues().head(dim).cwiseSqrt().asDiagonal();

    std::unordered_map<std::string, EmbeddingVector> out;
    out.reserve(index_of.size());
    for (const auto& [word, idx] : index_of) out[word] = vectors.row(idx).transpose();
    return out;
}

namespace {

struct WindowCounts {
    std::unordered_map<std::string, std::int64_t> word;
    std::map<std::pair<std::string, std::string>, std::int64_t> pair;
    std::int64_t total = 0;
};

WindowCounts count_windows(const std::vector<TokenizedDocument>& reference, int window,
                           const std::set<std::string>& of_interest) {
    WindowCounts counts;
    for (const auto& doc : reference) {
        const auto& t = doc.tokens;
        if (t.empty()) continue;
        std::size_t n_windows =
            t.size() > static_cast<std::size_t>(window) ? t.size() - window + 1 : 1;
        std::size_t width = std::min(t.size(), static_cast<std::size_t>(window));
        for (std::size_t s = 0; s < n_windows; ++s) {
            ++counts.total;
            std::set<std::string> present;
            for (std::size_t i = s; i < s + width; ++i)
                if (of_interest.count(t[i])) present.insert(t[i]);
            for (const auto& w : present) ++counts.word[w];
            for (auto it = present.begin(); it != present.end(); ++it)
                for (auto jt = std::next(it); jt != present.end(); ++jt)
                    ++counts.pair[{*it, *jt}];
        }
    }
    return counts;
}

}  // namespace

std::vector<double> npmi_coherence_per_topic(const TopicDescriptions& desc,
                                             const std::vector<TokenizedDocument>& reference,
                                             int window) {
    check_descriptions(desc);
    if (reference.empty()) throw Error("npmi_coherence: empty reference corpus");
    if (window < 1) throw Error("npmi_coherence: window must be >= 1");

    auto words = all_distinct_words(desc);
    auto counts = count_windows(reference, window, {words.begin(), words.end()});
    const double total = static_cast<double>(counts.total);
    constexpr double kEps = 1e-12;

    std::vector<double> per_topic;
    per_topic.reserve(desc.topics.size());
    for (const auto& topic : desc.topics) {
        double sum = 0.0;
        int pairs = 0;
        for (std::size_t i = 0; i < topic.size(); ++i) {
            for (std::size_t j = i + 1; j < topic.size(); ++j) {
                auto key = topic[i] < topic[j] ? std::make_pair(topic[i], topic[j])
                                               : std::make_pair(topic[j], topic[i]);
                auto it = counts.pair.find(key);
                double value;
                if (it == counts.pair.end() || it->second == 0) {
                    value = -1.0;
                } else {
                    double pij = it->second / total;
                    double pi = counts.word.at(topic[i]) / total;
                    double pj = counts.word.at(topic[j]) / total;
                    value = std::log(pij / (pi * pj + kEps)) / (-std::log(pij) + kEps);
                    value = std::clamp(value, -1.0, 1.0);
                }
                sum += value;
                ++pairs;
            }
        }
        per_topic.push_back(pairs > 0 ? sum / pairs
                                      : std::numeric_limits<double>::quiet_NaN());
    }
    return per_topic;
}

double npmi_coherence(const TopicDescriptions& desc,
                      const std::vector<TokenizedDocument>& reference, int window) {
    auto per_topic = npmi_coherence_per_topic(desc, reference, window);
    double total = 0.0;
    int counted = 0;
    for (double v : per_topic) {
        if (!std::isnan(v)) {
            total += v;
            ++counted;
        }
    }
    if (counted == 0) throw Error("npmi_coherence: no topic has two or more words");
    return total / counted;
}

}  // namespace keynmf
