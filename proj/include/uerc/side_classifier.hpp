#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "uerc/descriptors.hpp"
#include "uerc/image.hpp"
#include "uerc/side.hpp"

namespace uerc {

// Linear left/right ear classifier over HOG features of a 30x60 image.
// Positive decision values mean right.
struct SideModel {
    std::vector<double> weights;
    double bias = 0.0;

    double decision(std::span<const float> features) const;
};

struct SideTrainingParams {
    double lambda = 1e-4;
    int epochs = 50;
    std::uint64_t seed = 42;
};

inline constexpr int kSideImageWidth = 30;
inline constexpr int kSideImageHeight = 60;

std::size_t side_feature_length();

// Resize to 30x60 and extract HOG with default parameters.
std::vector<float> side_features(const GrayImage& img);

// Hinge-loss sub-gradient descent with L2 regularization (Pegasos step sizes,
// bias folded in as a constant feature). Deterministic for a given seed.
SideModel train_side_classifier(std::span<const GrayImage> images, std::span<const Side> labels,
                                const SideTrainingParams& params = {});

SideModel train_side_classifier_on_features(const std::vector<std::vector<float>>& features,
                                            std::span<const Side> labels,
                                            const SideTrainingParams& params = {});

// Mean hinge loss max(0, 1 - y f(x)) over a feature set.
double side_hinge_loss(const SideModel& model, const std::vector<std::vector<float>>& features,
                       std::span<const Side> labels);

Side predict_side(const SideModel& model, const GrayImage& img);

}  // namespace uerc
