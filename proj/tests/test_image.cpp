#include <doctest.h>

#include <cmath>

#include "memeclf/errors.hpp"
#include "memeclf/image.hpp"
#include "helpers.hpp"

using namespace memeclf;

namespace {

// Gradient pattern with distinct values per pixel and channel.
ImageTensor gradient_image(int h, int w) {
    ImageTensor img = ImageTensor::filled(h, w, 0.0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            for (int c = 0; c < 3; ++c)
                img.at(y, x, c) = (y * w + x + c * 0.25) / (h * w + 1.0);
    return img;
}

} // namespace

TEST_SUITE("image") {

TEST_CASE("png save/load round-trips 8-bit values") {
    testutil::TempDir tmp("img1");
    ImageTensor img = ImageTensor::filled(16, 16, 0.0);
    RngStream rng(3);
    for (auto& v : img.data) v = std::round(rng.uniform01() * 255.0) / 255.0;
    save_png(img, tmp.str("a.png"));
    const ImageTensor back = load_and_resize(tmp.str("a.png"), 16);
    REQUIRE(back.height == 16);
    REQUIRE(back.width == 16);
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(back.data[i] == doctest::Approx(img.data[i]).epsilon(1e-9));
}

TEST_CASE("load resizes to the target square") {
    testutil::TempDir tmp("img2");
    save_png(gradient_image(64, 32), tmp.str("rect.png"));
    const ImageTensor img = load_and_resize(tmp.str("rect.png"), 256);
    CHECK(img.height == 256);
    CHECK(img.width == 256);
    for (double v : img.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }
}

TEST_CASE("an undecodable file names its path in the error") {
    testutil::TempDir tmp("img3");
    testutil::write_file(tmp.str("bogus.png"), "this is not a png");
    try {
        load_and_resize(tmp.str("bogus.png"), 64);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        CHECK(std::string(e.what()).find("bogus.png") != std::string::npos);
    }
}

TEST_CASE("bilinear resize is the identity at the same size") {
    const ImageTensor img = gradient_image(20, 24);
    const ImageTensor same = bilinear_resize(img, 20, 24);
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(same.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
}

TEST_CASE("crop copies the exact sub-rectangle") {
    const ImageTensor img = gradient_image(10, 10);
    const ImageTensor c = crop(img, 2, 3, 4, 5);
    REQUIRE(c.height == 4);
    REQUIRE(c.width == 5);
    for (int y = 0; y < 4; ++y)
        for (int x = 0; x < 5; ++x)
            for (int ch = 0; ch < 3; ++ch)
                CHECK(c.at(y, x, ch) == img.at(y + 2, x + 3, ch));
    CHECK_THROWS_AS(crop(img, 8, 8, 4, 4), ArgumentError);
}

TEST_CASE("flips are involutive and move the expected corner") {
    const ImageTensor img = gradient_image(6, 8);
    const ImageTensor h = flip_horizontal(img);
    CHECK(h.at(0, 0, 0) == img.at(0, 7, 0));
    const ImageTensor hh = flip_horizontal(h);
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(hh.data[i] == img.data[i]);

    const ImageTensor v = flip_vertical(img);
    CHECK(v.at(0, 0, 1) == img.at(5, 0, 1));
    const ImageTensor vv = flip_vertical(v);
    for (size_t i = 0; i < img.data.size(); ++i) CHECK(vv.data[i] == img.data[i]);
}

TEST_CASE("five-crop positions on a 256 image with 224 crop") {
    const ImageTensor img = gradient_image(256, 256);
    const auto crops = five_crop(img, 224);
    // [TL, TR, BL, BR, C]; center offset is (16, 16)
    CHECK(crops[0].at(0, 0, 0) == img.at(0, 0, 0));
    CHECK(crops[1].at(0, 0, 0) == img.at(0, 32, 0));
    CHECK(crops[2].at(0, 0, 0) == img.at(32, 0, 0));
    CHECK(crops[3].at(0, 0, 0) == img.at(32, 32, 0));
    CHECK(crops[4].at(0, 0, 0) == img.at(16, 16, 0));
    for (const auto& c : crops) {
        CHECK(c.height == 224);
        CHECK(c.width == 224);
    }
    CHECK_THROWS_AS(five_crop(img, 300), ArgumentError);
}

TEST_CASE("tta average is the elementwise mean") {
    const std::vector<std::vector<double>> preds = {{0.2, 0.4}, {0.6, 0.0}, {0.1, 0.8}};
    const std::vector<double> mean = tta_average(preds);
    CHECK(mean[0] == doctest::Approx(0.3));
    CHECK(mean[1] == doctest::Approx(0.4));
    CHECK_THROWS_AS(tta_average({}), ArgumentError);
    CHECK_THROWS_AS(tta_average({{0.1}, {0.1, 0.2}}), ArgumentError);
}

TEST_CASE("augmentation parameters stay in range and are deterministic") {
    const ImageTensor img = gradient_image(64, 64);
    RngStream rng1(77), rng2(77);
    for (int i = 0; i < 100; ++i) {
        const AugmentParams p = sample_augment(img, rng1);
        CHECK(p.area_scale >= 0.8);
        CHECK(p.area_scale <= 1.0);
        CHECK(p.top >= 0);
        CHECK(p.left >= 0);
        const AugmentParams q = sample_augment(img, rng2);
        CHECK(p.area_scale == q.area_scale);
        CHECK(p.top == q.top);
        CHECK(p.left == q.left);
        CHECK(p.hflip == q.hflip);
        CHECK(p.vflip == q.vflip);
    }
}

TEST_CASE("identity augment params reproduce the input") {
    const ImageTensor img = gradient_image(32, 32);
    const ImageTensor out = apply_augment(img, AugmentParams::identity());
    for (size_t i = 0; i < img.data.size(); ++i)
        CHECK(out.data[i] == doctest::Approx(img.data[i]).epsilon(1e-12));
}

TEST_CASE("train augment preserves the image size") {
    const ImageTensor img = gradient_image(48, 48);
    RngStream rng(5);
    for (int i = 0; i < 20; ++i) {
        const ImageTensor out = train_augment(img, rng);
        CHECK(out.height == 48);
        CHECK(out.width == 48);
    }
}

} // TEST_SUITE
