#pragma once

#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "uerc/descriptors.hpp"
#include "uerc/image.hpp"

namespace uerc {

enum class Polarity { similarity, distance };

struct MatchScore {
    double value = 0.0;
    Polarity polarity = Polarity::similarity;

    // Distances become similarities by negation.
    double similarity() const { return polarity == Polarity::similarity ? value : -value; }
};

enum class Metric { cosine, chi_square, euclidean };

std::string_view to_string(Metric metric);
Metric parse_metric(std::string_view text);  // "cosine", "chisq", "l2"

double cosine_similarity(std::span<const float> a, std::span<const float> b);

// sum (a_i - b_i)^2 / (a_i + b_i + 1e-10); entries must be non-negative.
double chi_square_distance(std::span<const float> a, std::span<const float> b);

double euclidean_distance(std::span<const float> a, std::span<const float> b);

MatchScore compare(Metric metric, std::span<const float> a, std::span<const float> b);

inline MatchScore compare(Metric metric, const DescriptorVector& a, const DescriptorVector& b) {
    return compare(metric, a.values, b.values);
}

// (s - mean) / sigma with the population standard deviation. Throws
// DegenerateScoresError for constant rows.
std::vector<double> zscore_normalize(std::span<const double> scores);

std::vector<double> fuse_sum(const std::vector<std::vector<double>>& rows);

// Similarity of one probe descriptor against every gallery descriptor.
std::vector<double> similarity_row(const DescriptorVector& probe,
                                   std::span<const DescriptorVector> gallery, Metric metric);

// One row: passed through untouched. Several rows: each z-scored, then summed.
std::vector<double> fuse_rows(const std::vector<std::vector<double>>& rows);

enum class FlipMode { off, sum, classifier };

std::string_view to_string(FlipMode mode);
FlipMode parse_flip_mode(std::string_view text);

using Extractor = std::function<DescriptorVector(const GrayImage&)>;

// Original and mirrored probe rows, each z-scored and summed. Descriptor-level
// form for callers that already hold both probe descriptors.
std::vector<double> flip_aware_scores(const DescriptorVector& probe,
                                      const DescriptorVector& flipped_probe,
                                      std::span<const DescriptorVector> gallery, Metric metric);

// Image-level form. FlipMode::off returns the plain similarity row of the
// unflipped probe.
std::vector<double> flip_aware_scores(const GrayImage& probe,
                                      std::span<const DescriptorVector> gallery,
                                      const Extractor& extract, Metric metric,
                                      FlipMode mode = FlipMode::sum);

struct EnsembleMember {
    Extractor extract;
    Metric metric = Metric::cosine;
    std::vector<DescriptorVector> gallery;
};

// For each member, original and flipped rows are z-scored; all rows summed.
std::vector<double> ensemble_scores(const GrayImage& probe, std::span<const EnsembleMember> members);

}  // namespace uerc
