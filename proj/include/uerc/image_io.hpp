#pragma once

#include <filesystem>

#include "uerc/image.hpp"

namespace uerc {

// Decodes PNG, JPEG and the other formats OpenCV's codecs understand. Gray
// files come back with R = G = B.
ColorImage load_image(const std::filesystem::path& path);

void save_image(const std::filesystem::path& path, const ColorImage& img);
void save_image(const std::filesystem::path& path, const GrayImage& img);

}  // namespace uerc
