#include "memeclf/image.hpp"

#include <algorithm>
#include <cmath>

#include <opencv2/core.hpp>
#include <opencv2/imgcodecs.hpp>

#include "memeclf/errors.hpp"

namespace memeclf {

ImageTensor ImageTensor::filled(int h, int w, double value) {
    ImageTensor img;
    img.height = h;
    img.width = w;
    img.data.assign(static_cast<size_t>(h) * w * 3, value);
    return img;
}

ImageTensor load_and_resize(const std::string& image_ref, int target) {
    cv::Mat raw = cv::imread(image_ref, cv::IMREAD_COLOR);
    if (raw.empty()) throw DataError("cannot decode image: " + image_ref);

    ImageTensor img;
    img.height = raw.rows;
    img.width = raw.cols;
    img.data.resize(static_cast<size_t>(raw.rows) * raw.cols * 3);
    for (int y = 0; y < raw.rows; ++y) {
        const cv::Vec3b* row = raw.ptr<cv::Vec3b>(y);
        for (int x = 0; x < raw.cols; ++x) {
            // BGR -> RGB, scale to [0,1]
            img.at(y, x, 0) = row[x][2] / 255.0;
            img.at(y, x, 1) = row[x][1] / 255.0;
            img.at(y, x, 2) = row[x][0] / 255.0;
        }
    }
    if (img.height == target && img.width == target) return img;
    return bilinear_resize(img, target, target);
}

ImageTensor bilinear_resize(const ImageTensor& img, int out_h, int out_w) {
    if (out_h <= 0 || out_w <= 0)
        throw ArgumentError("bilinear_resize: non-positive output size");
    if (img.height == out_h && img.width == out_w) return img;

    ImageTensor out;
    out.height = out_h;
    out.width = out_w;
    out.data.resize(static_cast<size_t>(out_h) * out_w * 3);

    const double sy = static_cast<double>(img.height) / out_h;
    const double sx = static_cast<double>(img.width) / out_w;
    for (int y = 0; y < out_h; ++y) {
        // half-pixel-center mapping, clamped at borders
        double fy = (y + 0.5) * sy - 0.5;
        fy = std::clamp(fy, 0.0, static_cast<double>(img.height - 1));
        int y0 = static_cast<int>(fy);
        int y1 = std::min(y0 + 1, img.height - 1);
        double wy = fy - y0;
        for (int x = 0; x < out_w; ++x) {
            double fx = (x + 0.5) * sx - 0.5;
            fx = std::clamp(fx, 0.0, static_cast<double>(img.width - 1));
            int x0 = static_cast<int>(fx);
            int x1 = std::min(x0 + 1, img.width - 1);
            double wx = fx - x0;
            for (int c = 0; c < 3; ++c) {
                double top = img.at(y0, x0, c) * (1 - wx) + img.at(y0, x1, c) * wx;
                double bot = img.at(y1, x0, c) * (1 - wx) + img.at(y1, x1, c) * wx;
                out.at(y, x, c) = top * (1 - wy) + bot * wy;
            }
        }
    }
    return out;
}

ImageTensor crop(const ImageTensor& img, int top, int left, int h, int w) {
    if (top < 0 || left < 0 || h <= 0 || w <= 0 || top + h > img.height || left + w > img.width)
        throw ArgumentError("crop: rectangle (" + std::to_string(top) + "," + std::to_string(left) +
                            "," + std::to_string(h) + "," + std::to_string(w) +
                            ") outside image " + std::to_string(img.height) + "x" +
                            std::to_string(img.width));
    ImageTensor out;
    out.height = h;
    out.width = w;
    out.data.resize(static_cast<size_t>(h) * w * 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(top + y, left + x, c);
    return out;
}

ImageTensor flip_horizontal(const ImageTensor& img) {
    ImageTensor out = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(y, img.width - 1 - x, c);
    return out;
}

ImageTensor flip_vertical(const ImageTensor& img) {
    ImageTensor out = img;
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x)
            for (int c = 0; c < 3; ++c) out.at(y, x, c) = img.at(img.height - 1 - y, x, c);
    return out;
}

AugmentParams sample_augment(const ImageTensor& img, RngStream& rng) {
    AugmentParams p;
    p.area_scale = rng.uniform(0.8, 1.0);
    int side_h = static_cast<int>(std::lround(img.height * std::sqrt(p.area_scale)));
    int side_w = static_cast<int>(std::lround(img.width * std::sqrt(p.area_scale)));
    side_h = std::clamp(side_h, 1, img.height);
    side_w = std::clamp(side_w, 1, img.width);
    p.top = static_cast<int>(rng.uniform_int(0, img.height - side_h));
    p.left = static_cast<int>(rng.uniform_int(0, img.width - side_w));
    p.hflip = rng.bernoulli(0.5);
    p.vflip = rng.bernoulli(0.5);
    return p;
}

ImageTensor apply_augment(const ImageTensor& img, const AugmentParams& params) {
    int side_h = static_cast<int>(std::lround(img.height * std::sqrt(params.area_scale)));
    int side_w = static_cast<int>(std::lround(img.width * std::sqrt(params.area_scale)));
    side_h = std::clamp(side_h, 1, img.height - params.top);
    side_w = std::clamp(side_w, 1, img.width - params.left);

    ImageTensor out;
    if (side_h == img.height && side_w == img.width && params.top == 0 && params.left == 0) {
        out = img; // identity path, no interpolation
    } else {
        out = bilinear_resize(crop(img, params.top, params.left, side_h, side_w),
                              img.height, img.width);
    }
    if (params.hflip) out = flip_horizontal(out);
    if (params.vflip) out = flip_vertical(out);
    return out;
}

ImageTensor train_augment(const ImageTensor& img, RngStream& rng) {
    return apply_augment(img, sample_augment(img, rng));
}

std::array<ImageTensor, 5> five_crop(const ImageTensor& img, int crop_size) {
    if (crop_size <= 0 || crop_size > std::min(img.height, img.width))
        throw ArgumentError("five_crop: crop " + std::to_string(crop_size) +
                            " exceeds image " + std::to_string(img.height) + "x" +
                            std::to_string(img.width));
    const int bottom = img.height - crop_size;
    const int right = img.width - crop_size;
    const int cy = bottom / 2;
    const int cx = right / 2;
    return {crop(img, 0, 0, crop_size, crop_size),
            crop(img, 0, right, crop_size, crop_size),
            crop(img, bottom, 0, crop_size, crop_size),
            crop(img, bottom, right, crop_size, crop_size),
            crop(img, cy, cx, crop_size, crop_size)};
}

std::vector<double> tta_average(const std::vector<std::vector<double>>& preds) {
    if (preds.empty()) throw ArgumentError("tta_average: empty prediction list");
    const size_t width = preds[0].size();
    std::vector<double> mean(width, 0.0);
    for (const auto& row : preds) {
        if (row.size() != width)
            throw ArgumentError("tta_average: rows have unequal widths");
        for (size_t i = 0; i < width; ++i) mean[i] += row[i];
    }
    for (auto& v : mean) v /= static_cast<double>(preds.size());
    return mean;
}

void save_png(const ImageTensor& img, const std::string& path) {
    cv::Mat mat(img.height, img.width, CV_8UC3);
    for (int y = 0; y < img.height; ++y) {
        cv::Vec3b* row = mat.ptr<cv::Vec3b>(y);
        for (int x = 0; x < img.width; ++x) {
            auto to_byte = [](double v) {
                return static_cast<unsigned char>(std::clamp(std::lround(v * 255.0), 0L, 255L));
            };
            row[x][2] = to_byte(img.at(y, x, 0));
            row[x][1] = to_byte(img.at(y, x, 1));
            row[x][0] = to_byte(img.at(y, x, 2));
        }
    }
    if (!cv::imwrite(path, mat)) throw DataError("cannot write image: " + path);
}

} // namespace memeclf
