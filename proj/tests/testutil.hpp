#ifndef CURATOR_TESTS_TESTUTIL_HPP
#define CURATOR_TESTS_TESTUTIL_HPP

#include "curator/image.hpp"
#include "curator/rng.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <string>

#include <unistd.h>

namespace testutil {

// Unique scratch directory under the build tree; removed on destruction.
class TempDir {
public:
    explicit TempDir(const std::string& tag) {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                ("curator_" + tag + "_" + std::to_string(++counter) + "_" +
                 std::to_string(static_cast<unsigned>(::getpid())));
        std::filesystem::create_directories(path_);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path_, ec);
    }
    const std::filesystem::path& path() const { return path_; }

private:
    std::filesystem::path path_;
};

inline curator::RasterImage solid_rgb(int w, int h, std::uint8_t r, std::uint8_t g,
                                      std::uint8_t b) {
    curator::RasterImage img(w, h, 3);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            img.set(x, y, 0, r);
            img.set(x, y, 1, g);
            img.set(x, y, 2, b);
        }
    return img;
}

inline void draw_disk(curator::RasterImage& img, double cx, double cy, double radius,
                      std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (int y = 0; y < img.height; ++y)
        for (int x = 0; x < img.width; ++x) {
            const double dx = x - cx;
            const double dy = y - cy;
            if (dx * dx + dy * dy <= radius * radius) {
                img.set(x, y, 0, r);
                img.set(x, y, 1, g);
                img.set(x, y, 2, b);
            }
        }
}

// Skin-toned field with a dark lesion disk; the workhorse synthetic frame.
inline curator::RasterImage lesion_image(int w, int h, double cx, double cy,
                                         double radius) {
    curator::RasterImage img = solid_rgb(w, h, 205, 170, 160);
    draw_disk(img, cx, cy, radius, 90, 55, 60);
    return img;
}

inline void add_noise(curator::RasterImage& img, curator::Rng& rng, double sigma) {
    for (auto& p : img.pixels) {
        const double v = p + sigma * rng.next_normal();
        p = static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
    }
}

inline curator::GrayPlane random_plane(int w, int h, curator::Rng& rng) {
    curator::GrayPlane plane(w, h);
    for (auto& p : plane.pixels)
        p = static_cast<std::uint8_t>(rng.next_below(256));
    return plane;
}

} // namespace testutil

#endif // CURATOR_TESTS_TESTUTIL_HPP
