#include "curator/morphology.hpp"

#include "curator/errors.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curator {

std::vector<std::pair<int, int>> StructuringElement::offsets() const {
    if (radius < 1)
        throw std::invalid_argument("StructuringElement: radius must be >= 1");
    std::vector<std::pair<int, int>> out;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            if (shape == Shape::Disk && dx * dx + dy * dy > radius * radius) continue;
            out.emplace_back(dx, dy);
        }
    }
    return out;
}

BinaryMask::BinaryMask(int w, int h, bool fill) {
    if (w < 1 || h < 1)
        throw std::invalid_argument("BinaryMask: bad dimensions");
    width = w;
    height = h;
    bits.assign(static_cast<std::size_t>(w) * static_cast<std::size_t>(h),
                fill ? 1 : 0);
}

std::size_t BinaryMask::foreground_count() const {
    std::size_t n = 0;
    for (auto b : bits)
        if (b) ++n;
    return n;
}

namespace {

void check_element(int w, int h, const StructuringElement& se, const char* op) {
    if (se.radius < 1)
        throw std::invalid_argument("StructuringElement: radius must be >= 1");
    if (2 * se.radius >= std::min(w, h))
        throw ElementTooLarge(std::string(op) + ": element radius " +
                              std::to_string(se.radius) +
                              " too large for plane " + std::to_string(w) + "x" +
                              std::to_string(h));
}

inline int clampi(int v, int lo, int hi) { return v < lo ? lo : (v > hi ? hi : v); }

template <bool TakeMax>
GrayPlane gray_morph(const GrayPlane& plane, const StructuringElement& se,
                     const char* op) {
    check_element(plane.width, plane.height, se, op);
    const auto offs = se.offsets();
    GrayPlane out(plane.width, plane.height);
    for (int y = 0; y < plane.height; ++y) {
        for (int x = 0; x < plane.width; ++x) {
            std::uint8_t best = TakeMax ? 0 : 255;
            for (auto [dx, dy] : offs) {
                const int sx = clampi(x + dx, 0, plane.width - 1);
                const int sy = clampi(y + dy, 0, plane.height - 1);
                const std::uint8_t v = plane.at(sx, sy);
                if (TakeMax ? v > best : v < best) best = v;
            }
            out.set(x, y, best);
        }
    }
    return out;
}

template <bool TakeMax>
BinaryMask mask_morph(const BinaryMask& mask, const StructuringElement& se,
                      const char* op) {
    check_element(mask.width, mask.height, se, op);
    const auto offs = se.offsets();
    BinaryMask out(mask.width, mask.height);
    for (int y = 0; y < mask.height; ++y) {
        for (int x = 0; x < mask.width; ++x) {
            bool acc = !TakeMax;
            for (auto [dx, dy] : offs) {
                const int sx = clampi(x + dx, 0, mask.width - 1);
                const int sy = clampi(y + dy, 0, mask.height - 1);
                const bool v = mask.at(sx, sy);
                if (TakeMax ? v : !v) {
                    acc = TakeMax;
                    break;
                }
            }
            out.set(x, y, acc);
        }
    }
    return out;
}

} // namespace

GrayPlane erode_gray(const GrayPlane& plane, const StructuringElement& se) {
    return gray_morph<false>(plane, se, "erode_gray");
}

GrayPlane dilate_gray(const GrayPlane& plane, const StructuringElement& se) {
    return gray_morph<true>(plane, se, "dilate_gray");
}

GrayPlane close_gray(const GrayPlane& plane, const StructuringElement& se) {
    return erode_gray(dilate_gray(plane, se), se);
}

BinaryMask erode_mask(const BinaryMask& mask, const StructuringElement& se) {
    return mask_morph<false>(mask, se, "erode_mask");
}

BinaryMask dilate_mask(const BinaryMask& mask, const StructuringElement& se) {
    return mask_morph<true>(mask, se, "dilate_mask");
}

BinaryMask close_mask(const BinaryMask& mask, const StructuringElement& se) {
    return erode_mask(dilate_mask(mask, se), se);
}

RasterImage denoise(const RasterImage& img, const DenoiseParams& params) {
    if (img.channels != 3)
        throw NotColorImage("denoise: image is not 3-channel");
    if (params.smooth_factor < 1.0)
        throw std::invalid_argument("denoise: smooth factor must be >= 1");

    RasterImage out(img.width, img.height, 3);
    for (int c = 0; c < 3; ++c) {
        GrayPlane plane = extract_channel(img, static_cast<Channel>(c));
        plane = close_gray(plane, params.close_se);
        plane = erode_gray(plane, params.erode_se);
        if (params.smooth_factor > 1.0) {
            const int dw = std::max(
                1, static_cast<int>(std::lround(img.width / params.smooth_factor)));
            const int dh = std::max(
                1, static_cast<int>(std::lround(img.height / params.smooth_factor)));
            plane = resize_bilinear(resize_bilinear(plane, dw, dh), img.width,
                                    img.height);
        }
        for (int y = 0; y < img.height; ++y)
            for (int x = 0; x < img.width; ++x)
                out.set(x, y, c, plane.at(x, y));
    }
    return out;
}

} // namespace curator
