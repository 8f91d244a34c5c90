#include "uerc/image_io.hpp"

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

namespace uerc {

ColorImage load_image(const std::filesystem::path& path) {
    const cv::Mat bgr = cv::imread(path.string(), cv::IMREAD_COLOR);
    if (bgr.empty()) throw Error("cannot decode image " + path.string());
    ColorImage out(bgr.cols, bgr.rows);
    for (int y = 0; y < bgr.rows; ++y) {
        const auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < bgr.cols; ++x) {
            std::uint8_t* p = out.pixel(x, y);
            p[0] = row[x][2];
            p[1] = row[x][1];
            p[2] = row[x][0];
        }
    }
    return out;
}

void save_image(const std::filesystem::path& path, const ColorImage& img) {
    cv::Mat bgr(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        auto* row = bgr.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            const std::uint8_t* p = img.pixel(x, y);
            row[x] = cv::Vec3b(p[2], p[1], p[0]);
        }
    }
    if (!cv::imwrite(path.string(), bgr)) throw Error("cannot write image " + path.string());
}

void save_image(const std::filesystem::path& path, const GrayImage& img) {
    cv::Mat gray(img.height, img.width, CV_8UC1, const_cast<std::uint8_t*>(img.data.data()));
    if (!cv::imwrite(path.string(), gray)) throw Error("cannot write image " + path.string());
}

}  // namespace uerc
