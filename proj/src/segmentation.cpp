#include "curator/segmentation.hpp"

#include "curator/codec.hpp"
#include "curator/errors.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

namespace curator {

namespace {

// Exact threshold limit: the cross-multiplied variance comparison stays
// within unsigned __int128 as long as 65025 * N^6 / 4 < 2^127, i.e. for
// planes below roughly 400k pixels (HAM10000 frames are 270k).
constexpr std::uint64_t kExactOtsuPixelLimit = 400000;

struct OtsuObjective {
    // between-class variance ~ num / den with num = (s0*n1 - s1*n0)^2 and
    // den = n0 * n1 (the constant 1/N^2 cancels in comparisons)
    unsigned __int128 num = 0;
    std::uint64_t den = 1;
    long double approx = 0.0L;

    bool greater_than(const OtsuObjective& other, bool exact) const {
        if (exact)
            return num * other.den > other.num * den;
        return approx > other.approx;
    }
};

} // namespace

std::uint8_t otsu_threshold(const GrayPlane& plane) {
    const Histogram256 h = histogram(plane);

    int distinct = 0;
    for (auto b : h.bins)
        if (b) ++distinct;
    if (distinct < 2)
        throw DegeneratePlane("otsu_threshold: plane has fewer than 2 distinct intensities");

    const std::uint64_t total = h.total();
    std::uint64_t total_weighted = 0;
    for (int i = 0; i < 256; ++i)
        total_weighted += h.bins[i] * static_cast<std::uint64_t>(i);

    const bool exact = total <= kExactOtsuPixelLimit;

    int best_t = 0;
    OtsuObjective best; // zero objective; any positive candidate replaces it
    bool have_best = false;

    std::uint64_t n0 = 0;
    std::uint64_t s0 = 0;
    for (int t = 0; t < 256; ++t) {
        n0 += h.bins[t];
        s0 += h.bins[t] * static_cast<std::uint64_t>(t);
        const std::uint64_t n1 = total - n0;
        if (n0 == 0 || n1 == 0) continue;
        const std::uint64_t s1 = total_weighted - s0;

        OtsuObjective cand;
        // |s0*n1 - s1*n0| <= 255 * N^2, well inside int64 for any real image
        const std::int64_t diff = static_cast<std::int64_t>(s0 * n1) -
                                  static_cast<std::int64_t>(s1 * n0);
        const std::uint64_t mag =
            static_cast<std::uint64_t>(diff < 0 ? -diff : diff);
        cand.num = static_cast<unsigned __int128>(mag) * mag;
        cand.den = n0 * n1;
        if (!exact)
            cand.approx = static_cast<long double>(mag) * static_cast<long double>(mag) /
                          static_cast<long double>(cand.den);

        if (!have_best || cand.greater_than(best, exact)) {
            best = cand;
            best_t = t;
            have_best = true;
        }
    }
    return static_cast<std::uint8_t>(best_t);
}

BinaryMask apply_threshold(const GrayPlane& plane, std::uint8_t t, Polarity polarity) {
    BinaryMask mask(plane.width, plane.height);
    const std::size_t n = plane.pixel_count();
    for (std::size_t i = 0; i < n; ++i) {
        const bool fg = polarity == Polarity::ForegroundDark ? plane.pixels[i] <= t
                                                             : plane.pixels[i] >= t;
        mask.bits[i] = fg ? 1 : 0;
    }
    return mask;
}

namespace {

// Clockwise Moore neighborhood starting north.
constexpr std::array<std::pair<int, int>, 8> kMoore = {{{0, -1},
                                                        {1, -1},
                                                        {1, 0},
                                                        {1, 1},
                                                        {0, 1},
                                                        {-1, 1},
                                                        {-1, 0},
                                                        {-1, -1}}};

struct Component {
    std::size_t area = 0;
    std::size_t contour = 0;
    int x_min = 0, y_min = 0, x_max = 0, y_max = 0;
    int start_x = 0, start_y = 0; // first pixel in row-major order
};

int moore_index(int dx, int dy) {
    for (int i = 0; i < 8; ++i)
        if (kMoore[i].first == dx && kMoore[i].second == dy) return i;
    return 0;
}

// Moore-neighbor boundary trace. The walk state is (pixel, backtrack
// direction); the backtrack cell is the last background cell examined in the
// clockwise scan. The walk stops when a state repeats, which bounds it by
// 8 * area and covers the full closed contour. Returns the number of
// distinct boundary pixels visited. `state_bits` must be zeroed, one byte
// per pixel (one bit per backtrack direction).
std::size_t trace_contour(const std::vector<int>& labels, int w, int h, int label,
                          int sx, int sy, std::vector<std::uint8_t>& state_bits) {
    auto is_fg = [&](int x, int y) {
        return x >= 0 && x < w && y >= 0 && y < h &&
               labels[static_cast<std::size_t>(y) * w + x] == label;
    };

    std::size_t count = 0;
    auto enter = [&](int x, int y, int back) {
        std::uint8_t& m = state_bits[static_cast<std::size_t>(y) * w + x];
        if (m == 0) ++count;
        const std::uint8_t bit = static_cast<std::uint8_t>(1u << back);
        if (m & bit) return false; // state already seen: walk is closed
        m |= bit;
        return true;
    };

    int cx = sx, cy = sy;
    int back = moore_index(-1, 0); // start scans begin at the west neighbor
    enter(cx, cy, back);

    for (;;) {
        int found = -1;
        int prev = back;
        for (int k = 1; k <= 8; ++k) {
            const int idx = (back + k) % 8;
            if (is_fg(cx + kMoore[idx].first, cy + kMoore[idx].second)) {
                found = idx;
                break;
            }
            prev = idx;
        }
        if (found < 0) break; // isolated pixel

        // The previously examined (background) cell becomes the backtrack of
        // the new pixel; consecutive ring cells are 4-adjacent, so it lies in
        // the new pixel's Moore ring.
        const int px = cx + kMoore[prev].first;
        const int py = cy + kMoore[prev].second;
        cx += kMoore[found].first;
        cy += kMoore[found].second;
        back = moore_index(px - cx, py - cy);

        if (!enter(cx, cy, back)) break;
    }
    return count;
}

} // namespace

RegionOfInterest largest_component_roi(const BinaryMask& mask) {
    const int w = mask.width;
    const int h = mask.height;
    std::vector<int> labels(mask.bits.size(), 0);
    std::vector<Component> comps;

    // 8-connected labelling, row-major seed order.
    std::vector<std::pair<int, int>> stack;
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            if (!mask.at(x, y) || labels[static_cast<std::size_t>(y) * w + x] != 0)
                continue;
            const int label = static_cast<int>(comps.size()) + 1;
            Component comp;
            comp.start_x = x;
            comp.start_y = y;
            comp.x_min = comp.x_max = x;
            comp.y_min = comp.y_max = y;
            stack.clear();
            stack.emplace_back(x, y);
            labels[static_cast<std::size_t>(y) * w + x] = label;
            while (!stack.empty()) {
                auto [cx, cy] = stack.back();
                stack.pop_back();
                ++comp.area;
                comp.x_min = std::min(comp.x_min, cx);
                comp.x_max = std::max(comp.x_max, cx);
                comp.y_min = std::min(comp.y_min, cy);
                comp.y_max = std::max(comp.y_max, cy);
                for (auto [dx, dy] : kMoore) {
                    const int nx = cx + dx;
                    const int ny = cy + dy;
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    std::size_t idx = static_cast<std::size_t>(ny) * w + nx;
                    if (mask.bits[idx] && labels[idx] == 0) {
                        labels[idx] = label;
                        stack.emplace_back(nx, ny);
                    }
                }
            }
            comps.push_back(comp);
        }
    }

    if (comps.empty())
        throw EmptyMask("largest_component_roi: mask has no foreground pixel");

    std::vector<std::uint8_t> state_bits(mask.bits.size(), 0);
    for (std::size_t i = 0; i < comps.size(); ++i) {
        std::fill(state_bits.begin(), state_bits.end(), 0);
        comps[i].contour =
            trace_contour(labels, w, h, static_cast<int>(i) + 1, comps[i].start_x,
                          comps[i].start_y, state_bits);
    }

    // Longest contour; ties: larger area, then smallest (y_min, x_min).
    std::size_t best = 0;
    for (std::size_t i = 1; i < comps.size(); ++i) {
        const Component& a = comps[i];
        const Component& b = comps[best];
        if (a.contour != b.contour) {
            if (a.contour > b.contour) best = i;
        } else if (a.area != b.area) {
            if (a.area > b.area) best = i;
        } else if (std::pair(a.y_min, a.x_min) < std::pair(b.y_min, b.x_min)) {
            best = i;
        }
    }

    const Component& chosen = comps[best];
    RegionOfInterest roi;
    roi.mask = BinaryMask(w, h);
    const int label = static_cast<int>(best) + 1;
    for (std::size_t i = 0; i < labels.size(); ++i)
        roi.mask.bits[i] = labels[i] == label ? 1 : 0;
    roi.x_min = chosen.x_min;
    roi.y_min = chosen.y_min;
    roi.x_max = chosen.x_max;
    roi.y_max = chosen.y_max;
    roi.area = chosen.area;
    roi.contour = chosen.contour;
    return roi;
}

SegmentationProduct segment_lesion_detail(const RasterImage& img,
                                          const SegmentationConfig& cfg) {
    SegmentationProduct product;
    product.denoised = denoise(img, cfg.denoise);
    product.channel = extract_channel(product.denoised, cfg.channel);
    product.threshold = otsu_threshold(product.channel);
    product.mask = apply_threshold(product.channel, product.threshold, cfg.polarity);
    product.mask = close_mask(product.mask, cfg.mask_close_se);
    product.roi = largest_component_roi(product.mask);
    return product;
}

RegionOfInterest segment_lesion(const RasterImage& img, const SegmentationConfig& cfg) {
    return segment_lesion_detail(img, cfg).roi;
}

void write_segmentation_outputs(const SegmentationProduct& product,
                                const std::filesystem::path& stem, bool debug) {
    auto mask_to_plane = [](const BinaryMask& m) {
        GrayPlane p(m.width, m.height);
        for (std::size_t i = 0; i < m.bits.size(); ++i)
            p.pixels[i] = m.bits[i] ? 255 : 0;
        return p;
    };
    save_png(mask_to_plane(product.mask),
             std::filesystem::path(stem.string() + ".mask.png"));
    save_png(mask_to_plane(product.roi.mask),
             std::filesystem::path(stem.string() + ".roi.png"));
    if (debug)
        save_png(product.denoised,
                 std::filesystem::path(stem.string() + ".denoised.png"));
}

} // namespace curator
