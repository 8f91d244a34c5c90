#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "uerc/image.hpp"

namespace uerc {

enum class DescriptorKind { lbp, hog, chainlets, external };

std::string_view to_string(DescriptorKind kind);
DescriptorKind parse_descriptor_kind(std::string_view text);

struct DescriptorVector {
    std::vector<float> values;
    DescriptorKind kind = DescriptorKind::external;
    std::string source_image_id;
};

// ---------------------------------------------------------------------------
// Uniform local binary patterns

struct LbpParams {
    int patch = 16;
    int step = 4;
    int radius = 2;
    int neighbors = 8;

    void validate() const;
    std::string fingerprint() const;
};

// Bit i is set when the bilinearly sampled neighbour at angle 2*pi*i/P
// (counterclockwise from east, image y pointing down) is >= the center.
// Sample offsets within 1e-9 of a lattice point snap onto it.
int lbp_code(const GrayImage& img, int cx, int cy, int radius = 2, int neighbors = 8);

// Number of circular 0/1 transitions in an 8-bit pattern.
int circular_transitions(int code);

// 0..57 for the uniform 8-bit patterns in ascending code order, 58 otherwise.
int uniform_bin(int code);

inline constexpr int kUniformBins = 59;

std::size_t lbp_descriptor_length(int width, int height, const LbpParams& p = {});

// Sliding-window patches, each summarised by an L1-normalised 59-bin histogram
// of uniform codes over the centers whose sampling circle fits in the patch.
DescriptorVector lbp_descriptor(const GrayImage& img, const LbpParams& p = {});

// ---------------------------------------------------------------------------
// Histogram of oriented gradients

struct HogParams {
    int cell = 8;
    int block = 2;  // cells per block side, stride one cell
    int bins = 9;   // unsigned orientations over [0, 180)

    void validate() const;
    std::string fingerprint() const;
};

std::size_t hog_descriptor_length(int width, int height, const HogParams& p = {});

DescriptorVector hog_descriptor(const GrayImage& img, const HogParams& p = {});

// ---------------------------------------------------------------------------
// Edges, chain codes and chainlets

struct EdgeThresholds {
    double low = 40.0;
    double high = 100.0;
};

// Sobel magnitude scaled by 1/4, non-maximum suppression and hysteresis.
BinaryMask edge_map(const GrayImage& img, const EdgeThresholds& t = {});

struct Point {
    int x = 0;
    int y = 0;
    bool operator==(const Point&) const = default;
};

// Direction codes: 0 = east, counterclockwise, with y pointing down in the
// image (code 2 moves to the row above).
inline constexpr std::array<Point, 8> kChainSteps = {
    Point{1, 0}, Point{1, -1}, Point{0, -1}, Point{-1, -1},
    Point{-1, 0}, Point{-1, 1}, Point{0, 1}, Point{1, 1},
};

struct ChainCode {
    Point start;
    std::vector<int> moves;

    // Visited pixels, start included.
    std::vector<Point> path() const;
};

// Follows every 8-connected edge component from its first unvisited pixel in
// row-major order. Each edge pixel lands in exactly one traced chain; chains
// with fewer than min_moves moves are dropped from the result.
std::vector<ChainCode> trace_chains(const BinaryMask& edges, int min_moves = 2);

// r_i = (a_i - a_{i-1}) mod 8 for i = 1..n-1.
std::vector<int> relative_chain_code(const ChainCode& chain);

struct ChainletParams {
    int cell = 8;
    int block = 2;
    int block_stride = 1;
    int bins = 8;
    EdgeThresholds edges;

    void validate() const;
    std::string fingerprint() const;
};

std::size_t chainlets_descriptor_length(int width, int height, const ChainletParams& p = {});

// Per-cell histograms of relative chain codes (attributed to the pixel where
// the move ends), grouped into overlapping L2-normalised blocks.
DescriptorVector chainlets_descriptor(const GrayImage& img, const ChainletParams& p = {});

inline constexpr double kNormEpsilon = 1e-6;

}  // namespace uerc
