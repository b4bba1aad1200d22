#ifndef CURATOR_CODEC_HPP
#define CURATOR_CODEC_HPP

#include "curator/image.hpp"

#include <filesystem>

namespace curator {

/// Decodes a PNG or JPEG file (sniffed by signature, not extension).
/// Color sources decode to 3 channels, grayscale to 1. Throws IoError for
/// missing/unreadable files, UnsupportedDepth for non-8-bit sources, and
/// DecodeError for corrupt data, alpha channels, or other formats.
RasterImage load_image(const std::filesystem::path& path);

/// Writes an image as PNG (debug/fixture output).
void save_png(const RasterImage& img, const std::filesystem::path& path);
void save_png(const GrayPlane& plane, const std::filesystem::path& path);

} // namespace curator

#endif // CURATOR_CODEC_HPP
