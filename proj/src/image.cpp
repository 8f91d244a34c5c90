#include "uerc/image.hpp"

#include <algorithm>
#include <string>

namespace uerc {

namespace {

void check_dims(int w, int h) {
    if (w < 1 || h < 1) {
        throw Error("image dimensions must be positive, got " + std::to_string(w) + "x" +
                    std::to_string(h));
    }
}

}  // namespace

ColorImage::ColorImage(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b)
    : width(w), height(h) {
    check_dims(w, h);
    data.resize(static_cast<std::size_t>(w) * h * 3);
    for (std::size_t i = 0; i < data.size(); i += 3) {
        data[i] = r;
        data[i + 1] = g;
        data[i + 2] = b;
    }
}

ColorImage::ColorImage(int w, int h, std::vector<std::uint8_t> rgb)
    : width(w), height(h), data(std::move(rgb)) {
    check_dims(w, h);
    if (data.size() != static_cast<std::size_t>(w) * h * 3) {
        throw Error("color image data length does not match dimensions");
    }
}

GrayImage::GrayImage(int w, int h, std::uint8_t fill)
    : width(w), height(h) {
    check_dims(w, h);
    data.assign(static_cast<std::size_t>(w) * h, fill);
}

GrayImage::GrayImage(int w, int h, std::vector<std::uint8_t> values)
    : width(w), height(h), data(std::move(values)) {
    check_dims(w, h);
    if (data.size() != static_cast<std::size_t>(w) * h) {
        throw Error("gray image data length does not match dimensions");
    }
}

BinaryMask::BinaryMask(int w, int h, bool fill)
    : width(w), height(h) {
    check_dims(w, h);
    data.assign(static_cast<std::size_t>(w) * h, fill ? 1 : 0);
}

std::size_t BinaryMask::count() const {
    return static_cast<std::size_t>(std::count(data.begin(), data.end(), std::uint8_t{1}));
}

}  // namespace uerc
