#ifndef CURATOR_MORPHOLOGY_HPP
#define CURATOR_MORPHOLOGY_HPP

#include "curator/image.hpp"

#include <cstdint>
#include <utility>
#include <vector>

namespace curator {

/// Flat structuring element. A square element of radius r covers the full
/// (2r+1)x(2r+1) window; a disk keeps offsets with dx^2 + dy^2 <= r^2.
struct StructuringElement {
    enum class Shape { Square, Disk };

    Shape shape = Shape::Square;
    int radius = 1;

    static StructuringElement square(int radius) { return {Shape::Square, radius}; }
    static StructuringElement disk(int radius) { return {Shape::Disk, radius}; }

    /// Center-relative (dx, dy) offsets of the footprint.
    std::vector<std::pair<int, int>> offsets() const;
};

/// Foreground/background grid; bits[y * width + x] != 0 means foreground.
struct BinaryMask {
    int width = 0;
    int height = 0;
    std::vector<std::uint8_t> bits;

    BinaryMask() = default;
    BinaryMask(int w, int h, bool fill = false);

    bool at(int x, int y) const {
        return bits[static_cast<std::size_t>(y * width + x)] != 0;
    }
    void set(int x, int y, bool v) {
        bits[static_cast<std::size_t>(y * width + x)] = v ? 1 : 0;
    }
    std::size_t foreground_count() const;
};

// Grayscale morphology. Borders are handled by edge replication; the element
// must satisfy radius < min(width, height) / 2 or ElementTooLarge is thrown.
GrayPlane erode_gray(const GrayPlane& plane, const StructuringElement& se);
GrayPlane dilate_gray(const GrayPlane& plane, const StructuringElement& se);

/// Closing = dilation followed by erosion with the same element.
GrayPlane close_gray(const GrayPlane& plane, const StructuringElement& se);

// Binary morphology, same border convention.
BinaryMask erode_mask(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate_mask(const BinaryMask& mask, const StructuringElement& se);
BinaryMask close_mask(const BinaryMask& mask, const StructuringElement& se);

/// Denoising stage parameters: close with close_se, erode with erode_se,
/// then smooth by bilinear downscale with smooth_factor and upscale back.
/// smooth_factor 1 skips the resampling entirely.
struct DenoiseParams {
    StructuringElement close_se = StructuringElement::square(2);
    StructuringElement erode_se = StructuringElement::square(1);
    double smooth_factor = 2.0;
};

/// Per-channel close + erode + down/up interpolation. Output dimensions
/// equal input dimensions. Requires a 3-channel image.
RasterImage denoise(const RasterImage& img, const DenoiseParams& params);

} // namespace curator

#endif // CURATOR_MORPHOLOGY_HPP
