#include "curator/image.hpp"

#include "curator/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curator {

RasterImage::RasterImage(int w, int h, int c, std::uint8_t fill) {
    if (w < 1 || h < 1 || (c != 1 && c != 3))
        throw std::invalid_argument("RasterImage: bad dimensions or channel count");
    width = w;
    height = h;
    channels = c;
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h) *
                      static_cast<std::size_t>(c),
                  fill);
}

GrayPlane::GrayPlane(int w, int h, std::uint8_t fill) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("GrayPlane: bad dimensions");
    width = w;
    height = h;
    pixels.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h), fill);
}

std::uint64_t Histogram256::total() const {
    std::uint64_t sum = 0;
    for (auto b : bins) sum += b;
    return sum;
}

GrayPlane to_gray(const RasterImage& img) {
    GrayPlane out(img.width, img.height);
    if (img.channels == 1) {
        out.pixels = img.pixels;
        return out;
    }
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const double r = img.pixels[i * 3 + 0];
        const double g = img.pixels[i * 3 + 1];
        const double b = img.pixels[i * 3 + 2];
        const double y = 0.299 * r + 0.587 * g + 0.114 * b;
        const long q = std::lround(std::floor(y + 0.5)); // round half up
        out.pixels[i] = static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
    }
    return out;
}

GrayPlane extract_channel(const RasterImage& img, Channel channel) {
    if (img.channels != 3)
        throw NotColorImage("extract_channel: image is not 3-channel");
    GrayPlane out(img.width, img.height);
    const std::size_t c = static_cast<std::size_t>(channel);
    const std::size_t n = img.pixel_count();
    for (std::size_t i = 0; i < n; ++i)
        out.pixels[i] = img.pixels[i * 3 + c];
    return out;
}

Histogram256 histogram(const GrayPlane& plane) {
    Histogram256 h;
    for (auto v : plane.pixels) ++h.bins[v];
    return h;
}

IntensityDistribution normalize_histogram(const Histogram256& h) {
    const std::uint64_t total = h.total();
    if (total == 0)
        throw EmptyHistogram("normalize_histogram: histogram has zero total");
    IntensityDistribution d;
    for (int i = 0; i < 256; ++i)
        d.probs[i] = static_cast<double>(h.bins[i]) / static_cast<double>(total);
    return d;
}

namespace {

// Samples one plane bilinearly at center-aligned coordinates.
double sample_bilinear(const std::uint8_t* data, int w, int h, int stride,
                       double sx, double sy) {
    sx = std::clamp(sx, 0.0, static_cast<double>(w - 1));
    sy = std::clamp(sy, 0.0, static_cast<double>(h - 1));
    const int x0 = static_cast<int>(std::floor(sx));
    const int y0 = static_cast<int>(std::floor(sy));
    const int x1 = std::min(x0 + 1, w - 1);
    const int y1 = std::min(y0 + 1, h - 1);
    const double fx = sx - x0;
    const double fy = sy - y0;
    const double v00 = data[(static_cast<std::size_t>(y0) * w + x0) * stride];
    const double v10 = data[(static_cast<std::size_t>(y0) * w + x1) * stride];
    const double v01 = data[(static_cast<std::size_t>(y1) * w + x0) * stride];
    const double v11 = data[(static_cast<std::size_t>(y1) * w + x1) * stride];
    const double top = v00 + fx * (v10 - v00);
    const double bot = v01 + fx * (v11 - v01);
    return top + fy * (bot - top);
}

std::uint8_t quantize(double v) {
    const long q = std::lround(std::floor(v + 0.5));
    return static_cast<std::uint8_t>(std::clamp(q, 0L, 255L));
}

} // namespace

GrayPlane resize_bilinear(const GrayPlane& plane, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1)
        throw std::invalid_argument("resize_bilinear: bad target size");
    if (new_width == plane.width && new_height == plane.height) return plane;
    GrayPlane out(new_width, new_height);
    const double sx_scale = static_cast<double>(plane.width) / new_width;
    const double sy_scale = static_cast<double>(plane.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        const double sy = (y + 0.5) * sy_scale - 0.5;
        for (int x = 0; x < new_width; ++x) {
            const double sx = (x + 0.5) * sx_scale - 0.5;
            out.set(x, y, quantize(sample_bilinear(plane.pixels.data(), plane.width,
                                                   plane.height, 1, sx, sy)));
        }
    }
    return out;
}

RasterImage resize_bilinear(const RasterImage& img, int new_width, int new_height) {
    if (new_width < 1 || new_height < 1)
        throw std::invalid_argument("resize_bilinear: bad target size");
    if (new_width == img.width && new_height == img.height) return img;
    RasterImage out(new_width, new_height, img.channels);
    const double sx_scale = static_cast<double>(img.width) / new_width;
    const double sy_scale = static_cast<double>(img.height) / new_height;
    for (int y = 0; y < new_height; ++y) {
        const double sy = (y + 0.5) * sy_scale - 0.5;
        for (int x = 0; x < new_width; ++x) {
            const double sx = (x + 0.5) * sx_scale - 0.5;
            for (int c = 0; c < img.channels; ++c) {
                const double v =
                    sample_bilinear(img.pixels.data() + c, img.width, img.height,
                                    img.channels, sx, sy);
                out.set(x, y, c, quantize(v));
            }
        }
    }
    return out;
}

} // namespace curator
