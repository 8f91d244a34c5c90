#include "uerc/descriptors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>

namespace uerc {

namespace {

double lerp(double a, double b, double w) { return a + w * (b - a); }

double snap(double v) {
    const double r = std::round(v);
    return std::abs(v - r) < 1e-9 ? r : v;
}

struct Offset {
    double dx;
    double dy;
};

std::vector<Offset> circle_offsets(int radius, int neighbors) {
    std::vector<Offset> out(neighbors);
    for (int i = 0; i < neighbors; ++i) {
        const double theta = 2.0 * std::numbers::pi * i / neighbors;
        out[i] = {snap(radius * std::cos(theta)), snap(-radius * std::sin(theta))};
    }
    return out;
}

double sample(const GrayImage& img, double x, double y) {
    const int x0 = static_cast<int>(std::floor(x));
    const int y0 = static_cast<int>(std::floor(y));
    const int x1 = std::min(x0 + 1, img.width - 1);
    const int y1 = std::min(y0 + 1, img.height - 1);
    const double wx = x - x0, wy = y - y0;
    const double top = lerp(img.at(x0, y0), img.at(x1, y0), wx);
    const double bot = lerp(img.at(x0, y1), img.at(x1, y1), wx);
    return lerp(top, bot, wy);
}

int code_at(const GrayImage& img, int cx, int cy, const std::vector<Offset>& offsets) {
    const double center = img.at(cx, cy);
    int code = 0;
    for (std::size_t i = 0; i < offsets.size(); ++i) {
        if (sample(img, cx + offsets[i].dx, cy + offsets[i].dy) >= center) code |= 1 << i;
    }
    return code;
}

struct UniformTable {
    std::array<int, 256> bin{};
    UniformTable() {
        int next = 0;
        for (int c = 0; c < 256; ++c) bin[c] = circular_transitions(c) <= 2 ? next++ : -1;
        for (int& b : bin) {
            if (b < 0) b = next;
        }
    }
};

const UniformTable& uniform_table() {
    static const UniformTable table;
    return table;
}

// Scales v in place to v / sqrt(|v|^2 + eps^2).
void l2_normalize(std::vector<float>::iterator first, std::vector<float>::iterator last) {
    double sq = 0.0;
    for (auto it = first; it != last; ++it) sq += static_cast<double>(*it) * *it;
    const double norm = std::sqrt(sq + kNormEpsilon * kNormEpsilon);
    for (auto it = first; it != last; ++it) *it = static_cast<float>(*it / norm);
}

// Concatenates overlapping blocks of per-cell histograms in row-major block
// order; cells inside a block are also row-major.
std::vector<float> block_normalize(const std::vector<double>& cells, int ncx, int ncy, int bins,
                                   int block, int stride) {
    const int nbx = (ncx - block) / stride + 1;
    const int nby = (ncy - block) / stride + 1;
    const std::size_t block_len = static_cast<std::size_t>(block) * block * bins;
    std::vector<float> out;
    out.reserve(static_cast<std::size_t>(nbx) * nby * block_len);
    for (int by = 0; by < nby; ++by) {
        for (int bx = 0; bx < nbx; ++bx) {
            const auto begin = out.size();
            for (int cy = by * stride; cy < by * stride + block; ++cy) {
                for (int cx = bx * stride; cx < bx * stride + block; ++cx) {
                    const std::size_t base = (static_cast<std::size_t>(cy) * ncx + cx) * bins;
                    for (int b = 0; b < bins; ++b) out.push_back(static_cast<float>(cells[base + b]));
                }
            }
            l2_normalize(out.begin() + static_cast<std::ptrdiff_t>(begin), out.end());
        }
    }
    return out;
}

std::size_t block_count(int len, int cell, int block, int stride) {
    const int cells = len / cell;
    return cells < block ? 0 : static_cast<std::size_t>((cells - block) / stride + 1);
}

}  // namespace

std::string_view to_string(DescriptorKind kind) {
    switch (kind) {
        case DescriptorKind::lbp: return "lbp";
        case DescriptorKind::hog: return "hog";
        case DescriptorKind::chainlets: return "chainlets";
        case DescriptorKind::external: return "external";
    }
    return "unknown";
}

DescriptorKind parse_descriptor_kind(std::string_view text) {
    if (text == "lbp") return DescriptorKind::lbp;
    if (text == "hog") return DescriptorKind::hog;
    if (text == "chainlets") return DescriptorKind::chainlets;
    if (text == "external") return DescriptorKind::external;
    throw Error("unknown descriptor kind '" + std::string(text) + "'");
}

// ---------------------------------------------------------------------------

void LbpParams::validate() const {
    if (radius < 1) throw Error("LBP radius must be >= 1");
    if (neighbors != 8) throw Error("the 59-bin uniform mapping requires 8 neighbours");
    if (patch < 2 * radius + 1) throw Error("LBP patch must be at least 2R+1 pixels");
    if (step < 1) throw Error("LBP step must be >= 1");
}

std::string LbpParams::fingerprint() const {
    return "lbp:patch=" + std::to_string(patch) + ",step=" + std::to_string(step) +
           ",radius=" + std::to_string(radius) + ",neighbors=" + std::to_string(neighbors);
}

int lbp_code(const GrayImage& img, int cx, int cy, int radius, int neighbors) {
    if (neighbors < 1 || neighbors > 30) throw Error("LBP neighbour count must be in [1, 30]");
    if (cx - radius < 0 || cy - radius < 0 || cx + radius >= img.width ||
        cy + radius >= img.height) {
        throw Error("LBP center (" + std::to_string(cx) + "," + std::to_string(cy) +
                    ") is closer than the radius to the image border");
    }
    return code_at(img, cx, cy, circle_offsets(radius, neighbors));
}

int circular_transitions(int code) {
    int t = 0;
    for (int i = 0; i < 8; ++i) {
        const int a = (code >> i) & 1;
        const int b = (code >> ((i + 1) % 8)) & 1;
        t += a != b;
    }
    return t;
}

int uniform_bin(int code) {
    if (code < 0 || code > 255) throw Error("LBP code " + std::to_string(code) + " out of range");
    return uniform_table().bin[code];
}

std::size_t lbp_descriptor_length(int width, int height, const LbpParams& p) {
    p.validate();
    if (width < p.patch || height < p.patch) return 0;
    const std::size_t nx = (width - p.patch) / p.step + 1;
    const std::size_t ny = (height - p.patch) / p.step + 1;
    return nx * ny * kUniformBins;
}

DescriptorVector lbp_descriptor(const GrayImage& img, const LbpParams& p) {
    p.validate();
    if (img.width < p.patch || img.height < p.patch) {
        throw Error("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " is smaller than one " + std::to_string(p.patch) + "px patch");
    }
    const int r = p.radius;
    const auto offsets = circle_offsets(r, p.neighbors);
    std::vector<std::uint8_t> bins(img.data.size(), 0);
    for (int y = r; y < img.height - r; ++y) {
        for (int x = r; x < img.width - r; ++x) {
            bins[static_cast<std::size_t>(y) * img.width + x] =
                static_cast<std::uint8_t>(uniform_bin(code_at(img, x, y, offsets)));
        }
    }

    DescriptorVector out;
    out.kind = DescriptorKind::lbp;
    out.values.reserve(lbp_descriptor_length(img.width, img.height, p));
    const int inner = p.patch - 2 * r;
    const double per_center = 1.0 / (static_cast<double>(inner) * inner);
    for (int py = 0; py + p.patch <= img.height; py += p.step) {
        for (int px = 0; px + p.patch <= img.width; px += p.step) {
            std::array<int, kUniformBins> hist{};
            for (int y = py + r; y < py + p.patch - r; ++y) {
                for (int x = px + r; x < px + p.patch - r; ++x) {
                    ++hist[bins[static_cast<std::size_t>(y) * img.width + x]];
                }
            }
            for (int h : hist) out.values.push_back(static_cast<float>(h * per_center));
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

void HogParams::validate() const {
    if (cell < 1) throw Error("HOG cell must be >= 1");
    if (block < 1) throw Error("HOG block must be >= 1");
    if (bins < 1) throw Error("HOG bin count must be >= 1");
}

std::string HogParams::fingerprint() const {
    return "hog:cell=" + std::to_string(cell) + ",block=" + std::to_string(block) +
           ",bins=" + std::to_string(bins);
}

std::size_t hog_descriptor_length(int width, int height, const HogParams& p) {
    p.validate();
    return block_count(width, p.cell, p.block, 1) * block_count(height, p.cell, p.block, 1) *
           static_cast<std::size_t>(p.block) * p.block * p.bins;
}

DescriptorVector hog_descriptor(const GrayImage& img, const HogParams& p) {
    p.validate();
    const int ncx = img.width / p.cell;
    const int ncy = img.height / p.cell;
    if (ncx < p.block || ncy < p.block) {
        throw Error("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " is smaller than one HOG block");
    }
    const double bin_width = 180.0 / p.bins;
    std::vector<double> cells(static_cast<std::size_t>(ncx) * ncy * p.bins, 0.0);
    for (int y = 0; y < ncy * p.cell; ++y) {
        for (int x = 0; x < ncx * p.cell; ++x) {
            const double gx = static_cast<double>(img.at(std::min(x + 1, img.width - 1), y)) -
                              img.at(std::max(x - 1, 0), y);
            const double gy = static_cast<double>(img.at(x, std::min(y + 1, img.height - 1))) -
                              img.at(x, std::max(y - 1, 0));
            const double mag = std::hypot(gx, gy);
            if (mag == 0.0) continue;
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            angle = std::fmod(angle + 360.0, 180.0);
            // Bin b is centered on b * bin_width.
            const double f = angle / bin_width;
            const int b0 = static_cast<int>(std::floor(f)) % p.bins;
            const int b1 = (b0 + 1) % p.bins;
            const double frac = f - std::floor(f);
            const std::size_t base = (static_cast<std::size_t>(y / p.cell) * ncx + x / p.cell) * p.bins;
            cells[base + b0] += mag * (1.0 - frac);
            cells[base + b1] += mag * frac;
        }
    }
    DescriptorVector out;
    out.kind = DescriptorKind::hog;
    out.values = block_normalize(cells, ncx, ncy, p.bins, p.block, 1);
    return out;
}

// ---------------------------------------------------------------------------

BinaryMask edge_map(const GrayImage& img, const EdgeThresholds& t) {
    if (!(t.low >= 0.0) || !(t.low <= t.high)) {
        throw Error("edge thresholds must satisfy 0 <= low <= high");
    }
    const int w = img.width, h = img.height;
    auto px = [&](int x, int y) {
        return static_cast<double>(img.at(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1)));
    };
    std::vector<double> mag(img.data.size());
    std::vector<std::uint8_t> sector(img.data.size());
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const double gx = (px(x + 1, y - 1) + 2 * px(x + 1, y) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2 * px(x - 1, y) + px(x - 1, y + 1));
            const double gy = (px(x - 1, y + 1) + 2 * px(x, y + 1) + px(x + 1, y + 1)) -
                              (px(x - 1, y - 1) + 2 * px(x, y - 1) + px(x + 1, y - 1));
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            mag[i] = std::hypot(gx, gy) / 4.0;
            double angle = std::atan2(gy, gx) * 180.0 / std::numbers::pi;
            angle = std::fmod(angle + 360.0, 180.0);
            sector[i] = static_cast<std::uint8_t>(static_cast<int>(std::floor((angle + 22.5) / 45.0)) % 4);
        }
    }

    // Step along the gradient for sectors 0, 45, 90 and 135 degrees (y down).
    constexpr Point forward[4] = {{1, 0}, {1, 1}, {0, 1}, {-1, 1}};
    auto mag_at = [&](int x, int y) {
        return x < 0 || y < 0 || x >= w || y >= h ? 0.0 : mag[static_cast<std::size_t>(y) * w + x];
    };
    std::vector<double> thin(img.data.size(), 0.0);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            const std::size_t i = static_cast<std::size_t>(y) * w + x;
            const double m = mag[i];
            if (m == 0.0) continue;
            const Point d = forward[sector[i]];
            if (m > mag_at(x - d.x, y - d.y) && m >= mag_at(x + d.x, y + d.y)) thin[i] = m;
        }
    }

    BinaryMask out(w, h);
    std::vector<int> stack;
    for (int i = 0; i < w * h; ++i) {
        if (thin[i] >= t.high && thin[i] > 0.0 && !out.data[i]) {
            out.data[i] = 1;
            stack.push_back(i);
        }
    }
    while (!stack.empty()) {
        const int p = stack.back();
        stack.pop_back();
        const int x = p % w, y = p / w;
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                const int nx = x + dx, ny = y + dy;
                if (!out.contains(nx, ny)) continue;
                const int q = ny * w + nx;
                if (!out.data[q] && thin[q] >= t.low && thin[q] > 0.0) {
                    out.data[q] = 1;
                    stack.push_back(q);
                }
            }
        }
    }
    return out;
}

std::vector<Point> ChainCode::path() const {
    std::vector<Point> out;
    out.reserve(moves.size() + 1);
    Point p = start;
    out.push_back(p);
    for (int m : moves) {
        p.x += kChainSteps[m].x;
        p.y += kChainSteps[m].y;
        out.push_back(p);
    }
    return out;
}

std::vector<ChainCode> trace_chains(const BinaryMask& edges, int min_moves) {
    const int w = edges.width, h = edges.height;
    std::vector<std::uint8_t> visited(edges.data.size(), 0);
    std::vector<ChainCode> chains;
    for (int start = 0; start < w * h; ++start) {
        if (!edges.data[start] || visited[start]) continue;
        ChainCode chain;
        chain.start = {start % w, start / w};
        visited[start] = 1;
        Point cur = chain.start;
        int last = -1;
        for (;;) {
            // Prefer continuing straight, then the gentlest turn; the first
            // move scans east and onwards counterclockwise.
            int next = -1;
            for (int k = 0; k < 8 && next < 0; ++k) {
                int dir;
                if (last < 0) {
                    dir = k;
                } else {
                    const int turn = (k + 1) / 2 * (k % 2 == 1 ? 1 : -1);
                    dir = ((last + turn) % 8 + 8) % 8;
                }
                const int nx = cur.x + kChainSteps[dir].x, ny = cur.y + kChainSteps[dir].y;
                if (!edges.contains(nx, ny)) continue;
                const std::size_t q = static_cast<std::size_t>(ny) * w + nx;
                if (edges.data[q] && !visited[q]) next = dir;
            }
            if (next < 0) break;
            cur.x += kChainSteps[next].x;
            cur.y += kChainSteps[next].y;
            visited[static_cast<std::size_t>(cur.y) * w + cur.x] = 1;
            chain.moves.push_back(next);
            last = next;
        }
        if (static_cast<int>(chain.moves.size()) >= min_moves) chains.push_back(std::move(chain));
    }
    return chains;
}

std::vector<int> relative_chain_code(const ChainCode& chain) {
    if (chain.moves.size() < 2) throw Error("relative chain code needs at least 2 moves");
    std::vector<int> out(chain.moves.size() - 1);
    for (std::size_t i = 1; i < chain.moves.size(); ++i) {
        const int a = chain.moves[i], b = chain.moves[i - 1];
        if (a < 0 || a > 7 || b < 0 || b > 7) throw Error("chain direction code outside 0..7");
        out[i - 1] = ((a - b) % 8 + 8) % 8;
    }
    return out;
}

void ChainletParams::validate() const {
    if (cell < 1) throw Error("chainlet cell must be >= 1");
    if (block < 1) throw Error("chainlet block must be >= 1");
    if (block_stride < 1) throw Error("chainlet block stride must be >= 1");
    if (bins != 8) throw Error("chainlets use exactly 8 relative-direction bins");
}

std::string ChainletParams::fingerprint() const {
    char buf[64];
    std::snprintf(buf, sizeof buf, ",low=%g,high=%g", edges.low, edges.high);
    return "chainlets:cell=" + std::to_string(cell) + ",block=" + std::to_string(block) +
           ",stride=" + std::to_string(block_stride) + ",bins=" + std::to_string(bins) + buf;
}

std::size_t chainlets_descriptor_length(int width, int height, const ChainletParams& p) {
    p.validate();
    return block_count(width, p.cell, p.block, p.block_stride) *
           block_count(height, p.cell, p.block, p.block_stride) *
           static_cast<std::size_t>(p.block) * p.block * p.bins;
}

DescriptorVector chainlets_descriptor(const GrayImage& img, const ChainletParams& p) {
    p.validate();
    const int ncx = img.width / p.cell;
    const int ncy = img.height / p.cell;
    if (ncx < p.block || ncy < p.block) {
        throw Error("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " is smaller than one chainlet block");
    }
    std::vector<double> cells(static_cast<std::size_t>(ncx) * ncy * p.bins, 0.0);
    for (const ChainCode& chain : trace_chains(edge_map(img, p.edges))) {
        const auto rel = relative_chain_code(chain);
        const auto path = chain.path();
        for (std::size_t i = 0; i < rel.size(); ++i) {
            // rel[i] describes move i+1, which ends at path[i+2].
            const Point end = path[i + 2];
            const int cx = end.x / p.cell, cy = end.y / p.cell;
            if (cx >= ncx || cy >= ncy) continue;
            cells[(static_cast<std::size_t>(cy) * ncx + cx) * p.bins + rel[i]] += 1.0;
        }
    }
    DescriptorVector out;
    out.kind = DescriptorKind::chainlets;
    out.values = block_normalize(cells, ncx, ncy, p.bins, p.block, p.block_stride);
    return out;
}

}  // namespace uerc
