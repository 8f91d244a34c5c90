#include "uerc/pipeline.hpp"

namespace uerc {

std::string DescriptorPipeline::fingerprint() const {
    const std::string dims = ",size=" + std::to_string(size) + "x" + std::to_string(size);
    switch (kind) {
        case DescriptorKind::lbp: return lbp.fingerprint() + dims;
        case DescriptorKind::hog: return hog.fingerprint() + dims;
        case DescriptorKind::chainlets: return chainlets.fingerprint() + dims + ",roi=clahe-otsu-skin";
        case DescriptorKind::external: break;
    }
    throw Error("external descriptors are produced outside the toolkit");
}

std::size_t DescriptorPipeline::length() const {
    switch (kind) {
        case DescriptorKind::lbp: return lbp_descriptor_length(size, size, lbp);
        case DescriptorKind::hog: return hog_descriptor_length(size, size, hog);
        case DescriptorKind::chainlets: return chainlets_descriptor_length(size, size, chainlets);
        case DescriptorKind::external: break;
    }
    throw Error("external descriptors are produced outside the toolkit");
}

DescriptorVector DescriptorPipeline::extract(const ColorImage& img) const {
    switch (kind) {
        case DescriptorKind::lbp:
            return lbp_descriptor(resize_bilinear(to_grayscale(img), size, size), lbp);
        case DescriptorKind::hog:
            return hog_descriptor(resize_bilinear(to_grayscale(img), size, size), hog);
        case DescriptorKind::chainlets: {
            PreprocessParams pp = preprocess;
            pp.size = size;
            const PreprocessResult roi = preprocess_uccs(img, pp);
            const GrayImage input = roi.mask.count() == 0 ? roi.image : apply_mask(roi.image, roi.mask);
            return chainlets_descriptor(input, chainlets);
        }
        case DescriptorKind::external: break;
    }
    throw Error("external descriptors are produced outside the toolkit");
}

DescriptorPipeline default_pipeline(DescriptorKind kind) {
    DescriptorPipeline p;
    p.kind = kind;
    return p;
}

}  // namespace uerc
