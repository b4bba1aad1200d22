#ifndef CURATOR_EMBEDDING_HPP
#define CURATOR_EMBEDDING_HPP

#include "curator/image.hpp"
#include "curator/metrics.hpp"

#include <filesystem>

namespace curator {

/// Reads an embeddings CSV with header `filename,v1,...,vd`. Throws
/// CsvParseError on malformed input, NoRecords when no data rows exist.
EmbeddingMatrix load_embeddings_csv(const std::filesystem::path& path);

/// Writes the matching CSV.
void save_embeddings_csv(const EmbeddingMatrix& m, const std::filesystem::path& path);

/// Tiles the grayscale image into non-overlapping patch x patch blocks
/// (remainder rows/columns dropped) and emits one row per block, intensities
/// scaled to [0, 1]; the per-seed FID estimator runs on these. Throws
/// TooFewSamples when fewer than 2 blocks fit.
EmbeddingMatrix patch_embeddings(const RasterImage& img, int patch = 16);

/// One row per image file in the directory (non-recursive, PNG/JPEG by
/// extension, sorted by filename): built-in downsampled-grayscale features
/// of dimension side * side.
EmbeddingMatrix directory_embeddings(const std::filesystem::path& dir, int side);

} // namespace curator

#endif // CURATOR_EMBEDDING_HPP
