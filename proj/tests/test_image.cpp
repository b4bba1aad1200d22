#include "curator/errors.hpp"
#include "curator/image.hpp"
#include "curator/rng.hpp"

#include "testutil.hpp"

#include <doctest.h>

using namespace curator;

TEST_CASE("to_gray: all-white RGB maps to 255") {
    const RasterImage img = testutil::solid_rgb(3, 2, 255, 255, 255);
    const GrayPlane gray = to_gray(img);
    for (auto v : gray.pixels) CHECK(v == 255);
}

TEST_CASE("to_gray: pure red pixel maps to 76") {
    RasterImage img(1, 1, 3);
    img.set(0, 0, 0, 255);
    CHECK(to_gray(img).at(0, 0) == 76); // round(0.299 * 255)
}

TEST_CASE("to_gray: grayscale input is copied and conversion is idempotent") {
    Rng rng(7);
    RasterImage img(5, 4, 1);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng.next_below(256));
    const GrayPlane once = to_gray(img);
    CHECK(once.pixels == img.pixels);

    RasterImage again(5, 4, 1);
    again.pixels = once.pixels;
    CHECK(to_gray(again).pixels == once.pixels);
}

TEST_CASE("extract_channel picks the requested plane") {
    RasterImage img(1, 1, 3);
    img.set(0, 0, 0, 10);
    img.set(0, 0, 1, 20);
    img.set(0, 0, 2, 30);
    CHECK(extract_channel(img, Channel::R).at(0, 0) == 10);
    CHECK(extract_channel(img, Channel::G).at(0, 0) == 20);
    CHECK(extract_channel(img, Channel::B).at(0, 0) == 30);
}

TEST_CASE("extract_channel rejects grayscale input") {
    const RasterImage img(2, 2, 1);
    CHECK_THROWS_AS(extract_channel(img, Channel::G), NotColorImage);
}

TEST_CASE("histogram counts intensities") {
    GrayPlane plane(2, 2, 7);
    const Histogram256 h = histogram(plane);
    CHECK(h.bins[7] == 4);
    CHECK(h.total() == 4);

    GrayPlane two(2, 1);
    two.set(0, 0, 0);
    two.set(1, 0, 255);
    const Histogram256 h2 = histogram(two);
    CHECK(h2.bins[0] == 1);
    CHECK(h2.bins[255] == 1);
}

TEST_CASE("histogram total equals pixel count on random planes") {
    Rng rng(11);
    for (int trial = 0; trial < 10; ++trial) {
        const GrayPlane plane = testutil::random_plane(64, 64, rng);
        CHECK(histogram(plane).total() == 4096);
    }
}

TEST_CASE("normalize_histogram: point mass and two-bin split") {
    Histogram256 h;
    h.bins[7] = 4;
    CHECK(normalize_histogram(h).probs[7] == doctest::Approx(1.0));

    Histogram256 h2;
    h2.bins[0] = 1;
    h2.bins[255] = 1;
    const auto d = normalize_histogram(h2);
    CHECK(d.probs[0] == doctest::Approx(0.5));
    CHECK(d.probs[255] == doctest::Approx(0.5));
}

TEST_CASE("normalize_histogram sums to 1 on random histograms") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        const GrayPlane plane = testutil::random_plane(32, 32, rng);
        const auto d = normalize_histogram(histogram(plane));
        double sum = 0.0;
        for (double p : d.probs) {
            CHECK(p >= 0.0);
            CHECK(p <= 1.0);
            sum += p;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
    }
}

TEST_CASE("normalize_histogram rejects the empty histogram") {
    CHECK_THROWS_AS(normalize_histogram(Histogram256{}), EmptyHistogram);
}

namespace {

// Independent bilinear reference: same center-aligned convention, double
// output (no 8-bit quantization).
double reference_bilinear(const GrayPlane& src, int dw, int dh, int x, int y) {
    const double sx =
        std::clamp((x + 0.5) * src.width / dw - 0.5, 0.0, src.width - 1.0);
    const double sy =
        std::clamp((y + 0.5) * src.height / dh - 0.5, 0.0, src.height - 1.0);
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const int x1 = std::min(x0 + 1, src.width - 1);
    const int y1 = std::min(y0 + 1, src.height - 1);
    const double fx = sx - x0, fy = sy - y0;
    return (1 - fy) * ((1 - fx) * src.at(x0, y0) + fx * src.at(x1, y0)) +
           fy * ((1 - fx) * src.at(x0, y1) + fx * src.at(x1, y1));
}

} // namespace

TEST_CASE("resize_bilinear matches an independent reference within quantization") {
    GrayPlane src(16, 12);
    for (int y = 0; y < 12; ++y)
        for (int x = 0; x < 16; ++x)
            src.set(x, y, static_cast<std::uint8_t>((x * 255) / 15));

    const GrayPlane dst = resize_bilinear(src, 8, 8);
    for (int y = 0; y < 8; ++y)
        for (int x = 0; x < 8; ++x) {
            const double expected = reference_bilinear(src, 8, 8, x, y);
            CHECK(std::abs(dst.at(x, y) - expected) <= 0.5 + 1e-9);
        }
}

TEST_CASE("resize_bilinear to the same size is the identity") {
    Rng rng(17);
    const GrayPlane src = testutil::random_plane(9, 7, rng);
    CHECK(resize_bilinear(src, 9, 7).pixels == src.pixels);
}
