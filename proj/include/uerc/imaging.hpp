#pragma once

#include <limits>

#include "uerc/image.hpp"

namespace uerc {

GrayImage to_grayscale(const ColorImage& img);

// Bilinear resampling with pixel-center alignment and edge clamping.
GrayImage resize_bilinear(const GrayImage& img, int width, int height);
ColorImage resize_bilinear(const ColorImage& img, int width, int height);

GrayImage flip_horizontal(const GrayImage& img);
ColorImage flip_horizontal(const ColorImage& img);

struct ClaheParams {
    int tiles = 8;  // tiles per axis
    // Clip limit as a multiple of the uniform bin height (tile pixels / 256).
    // Infinity disables clipping.
    double clip = 2.0;

    static constexpr double no_clip = std::numeric_limits<double>::infinity();
};

// Contrast limited adaptive histogram equalization. Each tile maps intensity v
// to 255 * cdf(v) / n over its clipped histogram; mappings of the four nearest
// tile centers are blended bilinearly.
GrayImage clahe(const GrayImage& img, const ClaheParams& params = {});

// Threshold maximizing between-class variance. Returns -1 when no threshold
// separates two classes (constant image).
int otsu_level(const GrayImage& img);

// Pixels strictly above the Otsu level; all-false for a constant image.
BinaryMask otsu_threshold(const GrayImage& img);

// 3x3 square structuring element; pixels outside the image count as false.
BinaryMask dilate(const BinaryMask& mask);
BinaryMask erode(const BinaryMask& mask);
BinaryMask open(const BinaryMask& mask);

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b);

// Largest 8-connected region. Ties go to the region whose first pixel comes
// first in row-major order.
BinaryMask largest_component(const BinaryMask& mask);

struct SkinBounds {
    double hue_min = 0.0;  // degrees
    double hue_max = 50.0;
    double sat_min = 0.15;
    double sat_max = 0.90;
    double val_min = 0.20;
    double val_max = 0.95;
};

struct Hsv {
    double h;  // [0, 360)
    double s;  // [0, 1]
    double v;  // [0, 1]
};

Hsv rgb_to_hsv(std::uint8_t r, std::uint8_t g, std::uint8_t b);

BinaryMask hsv_skin_mask(const ColorImage& img, const SkinBounds& bounds = {});

struct PreprocessParams {
    int size = 100;
    ClaheParams clahe;
    SkinBounds skin;
};

struct PreprocessResult {
    GrayImage image;           // equalized size x size image
    BinaryMask morph_mask;     // threshold -> dilate -> open
    BinaryMask component_mask; // largest region of morph_mask
    BinaryMask mask;           // component_mask AND skin mask
};

// Ear region-of-interest extraction: grayscale, resize, CLAHE, Otsu,
// dilation, opening, largest region, skin-tone filter.
PreprocessResult preprocess_uccs(const ColorImage& img, const PreprocessParams& params = {});

// Zeroes every pixel outside the mask.
GrayImage apply_mask(const GrayImage& img, const BinaryMask& mask);

}  // namespace uerc
