#ifndef CURATOR_IMAGE_HPP
#define CURATOR_IMAGE_HPP

#include <array>
#include <cstdint>
#include <vector>

namespace curator {

/// 8-bit raster image, row-major, channel-interleaved. channels is 1
/// (grayscale) or 3 (RGB). Index of pixel (x, y), channel c:
/// (y * width + x) * channels + c.
struct RasterImage {
    int width = 0;
    int height = 0;
    int channels = 0;
    std::vector<std::uint8_t> pixels;

    RasterImage() = default;
    RasterImage(int w, int h, int c, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y, int c) const {
        return pixels[static_cast<std::size_t>(y * width + x) *
                          static_cast<std::size_t>(channels) +
                      static_cast<std::size_t>(c)];
    }
    void set(int x, int y, int c, std::uint8_t v) {
        pixels[static_cast<std::size_t>(y * width + x) *
                   static_cast<std::size_t>(channels) +
               static_cast<std::size_t>(c)] = v;
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

/// Single 8-bit intensity plane, row-major.
struct GrayPlane {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> pixels;

    GrayPlane() = default;
    GrayPlane(int w, int h, std::uint8_t fill = 0);

    std::uint8_t at(int x, int y) const {
        return pixels[static_cast<std::size_t>(y * width + x)];
    }
    void set(int x, int y, std::uint8_t v) {
        pixels[static_cast<std::size_t>(y * width + x)] = v;
    }
    std::size_t pixel_count() const {
        return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    }
};

/// Intensity counts, one bin per 8-bit value.
struct Histogram256 {
    std::array<std::uint64_t, 256> bins{};

    std::uint64_t total() const;
};

/// Normalized intensity histogram; probs sum to 1.
struct IntensityDistribution {
    std::array<double, 256> probs{};
};

enum class Channel { R = 0, G = 1, B = 2 };

/// Grayscale conversion with the standard luma weights
/// round(0.299 R + 0.587 G + 0.114 B), round half up. 1-channel input is
/// copied unchanged.
GrayPlane to_gray(const RasterImage& img);

/// Extracts one channel of a 3-channel image. Throws NotColorImage otherwise.
GrayPlane extract_channel(const RasterImage& img, Channel channel);

/// bins[v] = number of pixels with intensity v.
Histogram256 histogram(const GrayPlane& plane);

/// probs[i] = bins[i] / total. Throws EmptyHistogram when total is 0.
IntensityDistribution normalize_histogram(const Histogram256& h);

/// Bilinear resampling with pixel-center alignment
/// (src = (dst + 0.5) * scale - 0.5, clamped) and round-half-up
/// quantization back to 8 bits.
GrayPlane resize_bilinear(const GrayPlane& plane, int new_width, int new_height);
RasterImage resize_bilinear(const RasterImage& img, int new_width, int new_height);

} // namespace curator

#endif // CURATOR_IMAGE_HPP
