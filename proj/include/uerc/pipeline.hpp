#pragma once

#include <string>

#include "uerc/descriptors.hpp"
#include "uerc/image.hpp"
#include "uerc/imaging.hpp"

namespace uerc {

// Image -> descriptor recipes used by the command-line tool.
//   lbp:       grayscale, resize to size x size, uniform LBP
//   hog:       grayscale, resize to size x size, HOG
//   chainlets: ear ROI preprocessing, background masked out, chainlets
//              (an empty ROI mask falls back to the unmasked equalized image)
struct DescriptorPipeline {
    DescriptorKind kind = DescriptorKind::lbp;
    int size = 100;
    LbpParams lbp;
    HogParams hog;
    ChainletParams chainlets;
    PreprocessParams preprocess;

    std::string fingerprint() const;
    std::size_t length() const;

    DescriptorVector extract(const ColorImage& img) const;
};

DescriptorPipeline default_pipeline(DescriptorKind kind);

}  // namespace uerc
