#include "uerc/imaging.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>
#include <vector>

namespace uerc {

namespace {

std::uint8_t clamp_u8(double v) {
    return static_cast<std::uint8_t>(std::clamp<long>(std::lround(v), 0, 255));
}

// a + w * (b - a) is exact when a == b.
double lerp(double a, double b, double w) { return a + w * (b - a); }

struct Axis {
    int lo;
    int hi;
    double w;
};

// Half-pixel-center source coordinate of destination index d, clamped to the
// valid source range.
Axis source_axis(int d, int src_len, int dst_len) {
    double s = (d + 0.5) * static_cast<double>(src_len) / dst_len - 0.5;
    s = std::clamp(s, 0.0, static_cast<double>(src_len - 1));
    int lo = static_cast<int>(std::floor(s));
    int hi = std::min(lo + 1, src_len - 1);
    return {lo, hi, s - lo};
}

template <int Channels>
std::vector<std::uint8_t> resize_plane(const std::vector<std::uint8_t>& src, int sw, int sh,
                                       int dw, int dh) {
    std::vector<std::uint8_t> out(static_cast<std::size_t>(dw) * dh * Channels);
    std::vector<Axis> xs(dw);
    for (int x = 0; x < dw; ++x) xs[x] = source_axis(x, sw, dw);
    for (int y = 0; y < dh; ++y) {
        Axis ay = source_axis(y, sh, dh);
        for (int x = 0; x < dw; ++x) {
            const Axis& ax = xs[x];
            for (int c = 0; c < Channels; ++c) {
                auto px = [&](int xx, int yy) {
                    return static_cast<double>(
                        src[(static_cast<std::size_t>(yy) * sw + xx) * Channels + c]);
                };
                double top = lerp(px(ax.lo, ay.lo), px(ax.hi, ay.lo), ax.w);
                double bot = lerp(px(ax.lo, ay.hi), px(ax.hi, ay.hi), ax.w);
                out[(static_cast<std::size_t>(y) * dw + x) * Channels + c] =
                    clamp_u8(lerp(top, bot, ay.w));
            }
        }
    }
    return out;
}

void check_target(int w, int h) {
    if (w < 1 || h < 1) {
        throw Error("resize target must be at least 1x1, got " + std::to_string(w) + "x" +
                    std::to_string(h));
    }
}

void check_same_dims(const BinaryMask& a, const BinaryMask& b) {
    if (a.width != b.width || a.height != b.height) {
        throw Error("mask dimensions differ");
    }
}

}  // namespace

GrayImage to_grayscale(const ColorImage& img) {
    GrayImage out(img.width, img.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const std::uint8_t* p = &img.data[3 * i];
        out.data[i] = clamp_u8(0.299 * p[0] + 0.587 * p[1] + 0.114 * p[2]);
    }
    return out;
}

GrayImage resize_bilinear(const GrayImage& img, int width, int height) {
    check_target(width, height);
    if (width == img.width && height == img.height) return img;
    return GrayImage(width, height,
                     resize_plane<1>(img.data, img.width, img.height, width, height));
}

ColorImage resize_bilinear(const ColorImage& img, int width, int height) {
    check_target(width, height);
    if (width == img.width && height == img.height) return img;
    return ColorImage(width, height,
                      resize_plane<3>(img.data, img.width, img.height, width, height));
}

GrayImage flip_horizontal(const GrayImage& img) {
    GrayImage out = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) out.at(img.width - 1 - x, y) = img.at(x, y);
    }
    return out;
}

ColorImage flip_horizontal(const ColorImage& img) {
    ColorImage out = img;
    for (int y = 0; y < img.height; ++y) {
        for (int x = 0; x < img.width; ++x) {
            std::copy_n(img.pixel(x, y), 3, out.pixel(img.width - 1 - x, y));
        }
    }
    return out;
}

GrayImage clahe(const GrayImage& img, const ClaheParams& params) {
    const int tiles = params.tiles;
    if (tiles < 1) throw Error("CLAHE tile count must be >= 1");
    if (!(params.clip > 0.0)) throw Error("CLAHE clip limit must be > 0");
    if (img.width < tiles || img.height < tiles) {
        throw Error("image " + std::to_string(img.width) + "x" + std::to_string(img.height) +
                    " is smaller than the " + std::to_string(tiles) + "x" +
                    std::to_string(tiles) + " tile grid");
    }

    auto bound = [tiles](int len, int i) { return static_cast<int>(static_cast<long>(i) * len / tiles); };

    // Tile lookup tables in floating point; rounding happens after blending.
    std::vector<std::array<double, 256>> luts(static_cast<std::size_t>(tiles) * tiles);
    for (int ty = 0; ty < tiles; ++ty) {
        for (int tx = 0; tx < tiles; ++tx) {
            const int x0 = bound(img.width, tx), x1 = bound(img.width, tx + 1);
            const int y0 = bound(img.height, ty), y1 = bound(img.height, ty + 1);
            std::array<double, 256> hist{};
            for (int y = y0; y < y1; ++y) {
                for (int x = x0; x < x1; ++x) hist[img.at(x, y)] += 1.0;
            }
            const double n = static_cast<double>(x1 - x0) * (y1 - y0);
            if (std::isfinite(params.clip)) {
                const double limit = params.clip * n / 256.0;
                double excess = 0.0;
                for (double& h : hist) {
                    if (h > limit) {
                        excess += h - limit;
                        h = limit;
                    }
                }
                const double share = excess / 256.0;
                for (double& h : hist) h += share;
            }
            auto& lut = luts[static_cast<std::size_t>(ty) * tiles + tx];
            double cdf = 0.0;
            for (int v = 0; v < 256; ++v) {
                cdf += hist[v];
                lut[v] = 255.0 * cdf / n;
            }
        }
    }

    // Neighbouring tile indices and blend weight along one axis.
    auto locate = [&](int len, int p) {
        auto center = [&](int i) { return (bound(len, i) + bound(len, i + 1) - 1) / 2.0; };
        if (p <= center(0)) return Axis{0, 0, 0.0};
        if (p >= center(tiles - 1)) return Axis{tiles - 1, tiles - 1, 0.0};
        int i = 0;
        while (p >= center(i + 1)) ++i;
        const double c0 = center(i), c1 = center(i + 1);
        return Axis{i, i + 1, (p - c0) / (c1 - c0)};
    };

    std::vector<Axis> xs(img.width);
    for (int x = 0; x < img.width; ++x) xs[x] = locate(img.width, x);

    GrayImage out(img.width, img.height);
    for (int y = 0; y < img.height; ++y) {
        const Axis ay = locate(img.height, y);
        for (int x = 0; x < img.width; ++x) {
            const Axis& ax = xs[x];
            const int v = img.at(x, y);
            auto lut = [&](int tx, int ty) { return luts[static_cast<std::size_t>(ty) * tiles + tx][v]; };
            const double top = lerp(lut(ax.lo, ay.lo), lut(ax.hi, ay.lo), ax.w);
            const double bot = lerp(lut(ax.lo, ay.hi), lut(ax.hi, ay.hi), ax.w);
            out.at(x, y) = clamp_u8(lerp(top, bot, ay.w));
        }
    }
    return out;
}

int otsu_level(const GrayImage& img) {
    std::array<double, 256> hist{};
    for (std::uint8_t v : img.data) hist[v] += 1.0;
    const double total = static_cast<double>(img.data.size());
    double sum_all = 0.0;
    for (int v = 0; v < 256; ++v) sum_all += v * hist[v];

    int best = -1;
    double best_var = 0.0;
    double w0 = 0.0, sum0 = 0.0;
    for (int t = 0; t < 255; ++t) {
        w0 += hist[t];
        sum0 += t * hist[t];
        const double w1 = total - w0;
        if (w0 == 0.0 || w1 == 0.0) continue;
        const double mu0 = sum0 / w0;
        const double mu1 = (sum_all - sum0) / w1;
        const double var = w0 * w1 * (mu0 - mu1) * (mu0 - mu1);
        if (var > best_var) {
            best_var = var;
            best = t;
        }
    }
    return best;
}

BinaryMask otsu_threshold(const GrayImage& img) {
    BinaryMask out(img.width, img.height);
    const int level = otsu_level(img);
    if (level < 0) return out;
    for (std::size_t i = 0; i < img.data.size(); ++i) out.data[i] = img.data[i] > level ? 1 : 0;
    return out;
}

BinaryMask dilate(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool any = false;
            for (int dy = -1; dy <= 1 && !any; ++dy) {
                for (int dx = -1; dx <= 1 && !any; ++dx) {
                    any = mask.contains(x + dx, y + dy) && mask.at(x + dx, y + dy);
                }
            }
            out.set(x, y, any);
        }
    }
    return out;
}

BinaryMask erode(const BinaryMask& mask) {
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool all = true;
            for (int dy = -1; dy <= 1 && all; ++dy) {
                for (int dx = -1; dx <= 1 && all; ++dx) {
                    all = mask.contains(x + dx, y + dy) && mask.at(x + dx, y + dy);
                }
            }
            out.set(x, y, all);
        }
    }
    return out;
}

BinaryMask open(const BinaryMask& mask) { return dilate(erode(mask)); }

BinaryMask mask_and(const BinaryMask& a, const BinaryMask& b) {
    check_same_dims(a, b);
    BinaryMask out(a.width, a.height);
    for (std::size_t i = 0; i < a.data.size(); ++i) out.data[i] = a.data[i] & b.data[i];
    return out;
}

BinaryMask largest_component(const BinaryMask& mask) {
    const int w = mask.width, h = mask.height;
    std::vector<int> label(mask.data.size(), -1);
    std::vector<std::size_t> sizes;
    std::vector<int> stack;
    for (int start = 0; start < w * h; ++start) {
        if (!mask.data[start] || label[start] >= 0) continue;
        const int id = static_cast<int>(sizes.size());
        std::size_t size = 0;
        label[start] = id;
        stack.push_back(start);
        while (!stack.empty()) {
            const int p = stack.back();
            stack.pop_back();
            ++size;
            const int px = p % w, py = p / w;
            for (int dy = -1; dy <= 1; ++dy) {
                for (int dx = -1; dx <= 1; ++dx) {
                    const int nx = px + dx, ny = py + dy;
                    if (!mask.contains(nx, ny)) continue;
                    const int q = ny * w + nx;
                    if (mask.data[q] && label[q] < 0) {
                        label[q] = id;
                        stack.push_back(q);
                    }
                }
            }
        }
        sizes.push_back(size);
    }

    BinaryMask out(w, h);
    if (sizes.empty()) return out;
    int best = 0;
    for (int i = 1; i < static_cast<int>(sizes.size()); ++i) {
        if (sizes[i] > sizes[best]) best = i;
    }
    for (std::size_t i = 0; i < label.size(); ++i) out.data[i] = label[i] == best ? 1 : 0;
    return out;
}

Hsv rgb_to_hsv(std::uint8_t r8, std::uint8_t g8, std::uint8_t b8) {
    const double r = r8 / 255.0, g = g8 / 255.0, b = b8 / 255.0;
    const double mx = std::max({r, g, b});
    const double mn = std::min({r, g, b});
    const double delta = mx - mn;
    Hsv out{0.0, mx > 0.0 ? delta / mx : 0.0, mx};
    if (delta > 0.0) {
        double h;
        if (mx == r) {
            h = 60.0 * std::fmod((g - b) / delta, 6.0);
        } else if (mx == g) {
            h = 60.0 * ((b - r) / delta + 2.0);
        } else {
            h = 60.0 * ((r - g) / delta + 4.0);
        }
        if (h < 0.0) h += 360.0;
        out.h = h;
    }
    return out;
}

BinaryMask hsv_skin_mask(const ColorImage& img, const SkinBounds& bounds) {
    BinaryMask out(img.width, img.height);
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        const std::uint8_t* p = &img.data[3 * i];
        const Hsv c = rgb_to_hsv(p[0], p[1], p[2]);
        out.data[i] = c.h >= bounds.hue_min && c.h <= bounds.hue_max && c.s >= bounds.sat_min &&
                      c.s <= bounds.sat_max && c.v >= bounds.val_min && c.v <= bounds.val_max;
    }
    return out;
}

PreprocessResult preprocess_uccs(const ColorImage& img, const PreprocessParams& params) {
    PreprocessResult r;
    const GrayImage gray = resize_bilinear(to_grayscale(img), params.size, params.size);
    r.image = clahe(gray, params.clahe);
    r.morph_mask = open(dilate(otsu_threshold(r.image)));
    r.component_mask = largest_component(r.morph_mask);
    const ColorImage small = resize_bilinear(img, params.size, params.size);
    r.mask = mask_and(r.component_mask, hsv_skin_mask(small, params.skin));
    return r;
}

GrayImage apply_mask(const GrayImage& img, const BinaryMask& mask) {
    if (img.width != mask.width || img.height != mask.height) {
        throw Error("mask dimensions differ from image");
    }
    GrayImage out = img;
    for (std::size_t i = 0; i < out.data.size(); ++i) {
        if (!mask.data[i]) out.data[i] = 0;
    }
    return out;
}

}  // namespace uerc
