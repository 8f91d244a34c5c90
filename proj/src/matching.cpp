#include "uerc/matching.hpp"

#include <cmath>
#include <string>

#include "uerc/imaging.hpp"

namespace uerc {

namespace {

void check_lengths(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size()) {
        throw Error("descriptor length mismatch: " + std::to_string(a.size()) + " vs " +
                    std::to_string(b.size()));
    }
}

}  // namespace

std::string_view to_string(Metric metric) {
    switch (metric) {
        case Metric::cosine: return "cosine";
        case Metric::chi_square: return "chisq";
        case Metric::euclidean: return "l2";
    }
    return "unknown";
}

Metric parse_metric(std::string_view text) {
    if (text == "cosine") return Metric::cosine;
    if (text == "chisq") return Metric::chi_square;
    if (text == "l2") return Metric::euclidean;
    throw Error("unknown distance '" + std::string(text) + "'");
}

std::string_view to_string(FlipMode mode) {
    switch (mode) {
        case FlipMode::off: return "off";
        case FlipMode::sum: return "sum";
        case FlipMode::classifier: return "classifier";
    }
    return "unknown";
}

FlipMode parse_flip_mode(std::string_view text) {
    if (text == "off") return FlipMode::off;
    if (text == "sum") return FlipMode::sum;
    if (text == "classifier") return FlipMode::classifier;
    throw Error("unknown flip mode '" + std::string(text) + "'");
}

double cosine_similarity(std::span<const float> a, std::span<const float> b) {
    check_lengths(a, b);
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        dot += static_cast<double>(a[i]) * b[i];
        na += static_cast<double>(a[i]) * a[i];
        nb += static_cast<double>(b[i]) * b[i];
    }
    if (na == 0.0 || nb == 0.0) throw Error("cosine similarity of a zero vector");
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double chi_square_distance(std::span<const float> a, std::span<const float> b) {
    check_lengths(a, b);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] < 0.0f || b[i] < 0.0f) throw Error("chi-square distance needs non-negative entries");
        const double diff = static_cast<double>(a[i]) - b[i];
        d += diff * diff / (static_cast<double>(a[i]) + b[i] + 1e-10);
    }
    return d;
}

double euclidean_distance(std::span<const float> a, std::span<const float> b) {
    check_lengths(a, b);
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double diff = static_cast<double>(a[i]) - b[i];
        d += diff * diff;
    }
    return std::sqrt(d);
}

MatchScore compare(Metric metric, std::span<const float> a, std::span<const float> b) {
    switch (metric) {
        case Metric::cosine: return {cosine_similarity(a, b), Polarity::similarity};
        case Metric::chi_square: return {chi_square_distance(a, b), Polarity::distance};
        case Metric::euclidean: return {euclidean_distance(a, b), Polarity::distance};
    }
    throw Error("unknown metric");
}

std::vector<double> zscore_normalize(std::span<const double> scores) {
    if (scores.size() < 2) throw DegenerateScoresError("z-score needs at least two scores");
    double mean = 0.0;
    for (double s : scores) mean += s;
    mean /= static_cast<double>(scores.size());
    double var = 0.0;
    for (double s : scores) var += (s - mean) * (s - mean);
    var /= static_cast<double>(scores.size());
    const double sigma = std::sqrt(var);
    if (!(sigma > 0.0)) throw DegenerateScoresError("score row is constant; z-score undefined");
    std::vector<double> out(scores.size());
    for (std::size_t i = 0; i < scores.size(); ++i) out[i] = (scores[i] - mean) / sigma;
    return out;
}

std::vector<double> fuse_sum(const std::vector<std::vector<double>>& rows) {
    if (rows.empty()) throw Error("fusion needs at least one score row");
    std::vector<double> out(rows.front().size(), 0.0);
    for (const auto& row : rows) {
        if (row.size() != out.size()) throw Error("score rows to fuse differ in length");
        for (std::size_t i = 0; i < row.size(); ++i) out[i] += row[i];
    }
    return out;
}

std::vector<double> similarity_row(const DescriptorVector& probe,
                                   std::span<const DescriptorVector> gallery, Metric metric) {
    std::vector<double> row;
    row.reserve(gallery.size());
    for (const auto& g : gallery) row.push_back(compare(metric, probe, g).similarity());
    return row;
}

std::vector<double> fuse_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.size() == 1) return rows.front();
    std::vector<std::vector<double>> normalized;
    normalized.reserve(rows.size());
    for (const auto& r : rows) normalized.push_back(zscore_normalize(r));
    return fuse_sum(normalized);
}

std::vector<double> flip_aware_scores(const DescriptorVector& probe,
                                      const DescriptorVector& flipped_probe,
                                      std::span<const DescriptorVector> gallery, Metric metric) {
    if (gallery.empty()) throw Error("flip-aware scoring needs a nonempty gallery");
    return fuse_sum({zscore_normalize(similarity_row(probe, gallery, metric)),
                     zscore_normalize(similarity_row(flipped_probe, gallery, metric))});
}

std::vector<double> flip_aware_scores(const GrayImage& probe,
                                      std::span<const DescriptorVector> gallery,
                                      const Extractor& extract, Metric metric, FlipMode mode) {
    if (gallery.empty()) throw Error("flip-aware scoring needs a nonempty gallery");
    if (mode == FlipMode::off) return similarity_row(extract(probe), gallery, metric);
    if (mode != FlipMode::sum) throw Error("flip_aware_scores supports flip modes off and sum");
    return flip_aware_scores(extract(probe), extract(flip_horizontal(probe)), gallery, metric);
}

std::vector<double> ensemble_scores(const GrayImage& probe, std::span<const EnsembleMember> members) {
    if (members.empty()) throw Error("ensemble needs at least one extractor");
    const GrayImage flipped = flip_horizontal(probe);
    std::vector<std::vector<double>> rows;
    for (const auto& m : members) {
        if (m.gallery.size() != members.front().gallery.size()) {
            throw Error("ensemble members score galleries of different sizes");
        }
        rows.push_back(zscore_normalize(similarity_row(m.extract(probe), m.gallery, m.metric)));
        rows.push_back(zscore_normalize(similarity_row(m.extract(flipped), m.gallery, m.metric)));
    }
    return fuse_sum(rows);
}

}  // namespace uerc
