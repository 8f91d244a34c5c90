#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "uerc/image.hpp"
#include "uerc/protocol.hpp"

namespace fixtures {

inline uerc::GrayImage random_gray(int w, int h, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, 255);
    uerc::GrayImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

inline uerc::ColorImage random_color(int w, int h, std::mt19937_64& rng) {
    std::uniform_int_distribution<int> d(0, 255);
    uerc::ColorImage img(w, h);
    for (auto& v : img.data) v = static_cast<std::uint8_t>(d(rng));
    return img;
}

inline uerc::ManifestEntry entry(std::string id, std::string subject,
                                 uerc::PartitionLabel part = uerc::PartitionLabel::test) {
    uerc::ManifestEntry e;
    e.image_id = std::move(id);
    e.subject_id = std::move(subject);
    e.partition = part;
    e.path = e.image_id + ".png";
    return e;
}

// Matrix with the given ids and row-major scores.
inline uerc::SimilarityMatrix matrix(std::vector<std::string> probes, std::vector<std::string> gallery,
                                     std::vector<float> scores) {
    uerc::SimilarityMatrix m;
    m.probe_ids = std::move(probes);
    m.gallery_ids = std::move(gallery);
    m.scores = std::move(scores);
    return m;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("uerc_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace fixtures
