#include "uerc/side_classifier.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <string>

#include "uerc/imaging.hpp"

namespace uerc {

std::string_view to_string(Side side) {
    switch (side) {
        case Side::left: return "left";
        case Side::right: return "right";
        case Side::unknown: return "unknown";
    }
    return "unknown";
}

Side parse_side(std::string_view text) {
    if (text == "left") return Side::left;
    if (text == "right") return Side::right;
    if (text == "unknown") return Side::unknown;
    throw Error("unknown side '" + std::string(text) + "'");
}

double SideModel::decision(std::span<const float> features) const {
    if (features.size() != weights.size()) {
        throw Error("side model expects " + std::to_string(weights.size()) + " features, got " +
                    std::to_string(features.size()));
    }
    double s = bias;
    for (std::size_t i = 0; i < weights.size(); ++i) s += weights[i] * features[i];
    return s;
}

std::size_t side_feature_length() { return hog_descriptor_length(kSideImageWidth, kSideImageHeight); }

std::vector<float> side_features(const GrayImage& img) {
    return hog_descriptor(resize_bilinear(img, kSideImageWidth, kSideImageHeight)).values;
}

namespace {

double label_sign(Side s) {
    switch (s) {
        case Side::right: return 1.0;
        case Side::left: return -1.0;
        case Side::unknown: break;
    }
    throw Error("side classifier training labels must be left or right");
}

}  // namespace

SideModel train_side_classifier_on_features(const std::vector<std::vector<float>>& features,
                                            std::span<const Side> labels,
                                            const SideTrainingParams& params) {
    if (features.size() != labels.size()) throw Error("feature and label counts differ");
    std::size_t n_left = 0, n_right = 0;
    for (Side s : labels) {
        label_sign(s);
        (s == Side::left ? n_left : n_right)++;
    }
    if (n_left == 0 || n_right == 0) {
        throw Error("side classifier needs at least one left and one right example");
    }
    if (!(params.lambda > 0.0) || params.epochs < 1) throw Error("invalid side training parameters");
    const std::size_t dim = features.front().size();
    for (const auto& f : features) {
        if (f.size() != dim) throw Error("side training features differ in length");
    }

    // Augmented weight vector: dim weights followed by the bias.
    std::vector<double> w(dim + 1, 0.0);
    std::vector<std::size_t> order(features.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(params.seed);
    std::uint64_t t = 0;
    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        // Fisher-Yates on raw engine output keeps the order portable.
        for (std::size_t i = order.size(); i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
        for (std::size_t idx : order) {
            ++t;
            const double eta = 1.0 / (params.lambda * static_cast<double>(t));
            const auto& x = features[idx];
            const double y = label_sign(labels[idx]);
            double margin = w[dim];
            for (std::size_t i = 0; i < dim; ++i) margin += w[i] * x[i];
            margin *= y;
            const double shrink = 1.0 - eta * params.lambda;
            for (double& wi : w) wi *= shrink;
            if (margin < 1.0) {
                for (std::size_t i = 0; i < dim; ++i) w[i] += eta * y * x[i];
                w[dim] += eta * y;
            }
        }
    }
    SideModel model;
    model.bias = w[dim];
    w.pop_back();
    model.weights = std::move(w);
    return model;
}

SideModel train_side_classifier(std::span<const GrayImage> images, std::span<const Side> labels,
                                const SideTrainingParams& params) {
    std::vector<std::vector<float>> features;
    features.reserve(images.size());
    for (const auto& img : images) features.push_back(side_features(img));
    return train_side_classifier_on_features(features, labels, params);
}

double side_hinge_loss(const SideModel& model, const std::vector<std::vector<float>>& features,
                       std::span<const Side> labels) {
    if (features.empty() || features.size() != labels.size()) throw Error("bad feature/label sets");
    double loss = 0.0;
    for (std::size_t i = 0; i < features.size(); ++i) {
        loss += std::max(0.0, 1.0 - label_sign(labels[i]) * model.decision(features[i]));
    }
    return loss / static_cast<double>(features.size());
}

Side predict_side(const SideModel& model, const GrayImage& img) {
    return model.decision(side_features(img)) >= 0.0 ? Side::right : Side::left;
}

}  // namespace uerc
