#ifndef MEMECLF_IMAGE_HPP
#define MEMECLF_IMAGE_HPP

#include <array>
#include <string>
#include <vector>

#include "memeclf/rng.hpp"

namespace memeclf {

// RGB image, HWC layout, values in [0, 1].
struct ImageTensor {
    int height = 0;
    int width = 0;
    std::vector<double> data; // height * width * 3

    static ImageTensor filled(int h, int w, double value);

    double at(int y, int x, int c) const { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
    double& at(int y, int x, int c) { return data[(static_cast<size_t>(y) * width + x) * 3 + c]; }
};

// Decodes a PNG/JPEG file and bilinear-resizes to target x target.
// Undecodable file -> data error naming the path.
ImageTensor load_and_resize(const std::string& image_ref, int target = 256);

ImageTensor bilinear_resize(const ImageTensor& img, int out_h, int out_w);

// Exact sub-rectangle copy, no interpolation.
ImageTensor crop(const ImageTensor& img, int top, int left, int h, int w);

ImageTensor flip_horizontal(const ImageTensor& img);
ImageTensor flip_vertical(const ImageTensor& img);

// Training augmentation: random-resized-crop back to the input size
// (area scale in [0.8, 1.0]), then horizontal / vertical flips with p=0.5.
struct AugmentParams {
    double area_scale = 1.0;
    int top = 0;
    int left = 0;
    bool hflip = false;
    bool vflip = false;

    static AugmentParams identity() { return {}; }
};

AugmentParams sample_augment(const ImageTensor& img, RngStream& rng);
ImageTensor apply_augment(const ImageTensor& img, const AugmentParams& params);
ImageTensor train_augment(const ImageTensor& img, RngStream& rng);

// Four corner crops + center crop, in order [TL, TR, BL, BR, C].
std::array<ImageTensor, 5> five_crop(const ImageTensor& img, int crop = 224);

// Elementwise mean of prediction rows; rows must be non-empty, equal width.
std::vector<double> tta_average(const std::vector<std::vector<double>>& preds);

// PNG writer for the synthetic corpus generator.
void save_png(const ImageTensor& img, const std::string& path);

} // namespace memeclf

#endif
