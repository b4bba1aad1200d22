#ifndef CURATOR_DIVERSITY_HPP
#define CURATOR_DIVERSITY_HPP

#include "curator/image.hpp"

#include <cstddef>
#include <vector>

namespace curator {

/// Fixed-length real feature vector; collections require a uniform length.
struct FeatureVector {
    std::vector<double> values;
};

/// Symmetric pairwise distance table with zero diagonal.
struct DistanceMatrix {
    std::size_t n = 0;
    std::vector<double> entries; // row-major n x n

    DistanceMatrix() = default;
    explicit DistanceMatrix(std::size_t size)
        : n(size), entries(size * size, 0.0) {}

    double at(std::size_t i, std::size_t j) const { return entries[i * n + j]; }
    void set(std::size_t i, std::size_t j, double v) {
        entries[i * n + j] = v;
        entries[j * n + i] = v;
    }
};

/// Chosen indices plus their disparity-sum objective (sum of pairwise
/// distances over unordered pairs).
struct SubsetSelection {
    std::vector<std::size_t> indices;
    double objective = 0.0;
};

/// Downsampled-grayscale feature: convert to gray, bilinear-resize to
/// side x side, flatten row-major, scale to [0, 1].
FeatureVector image_feature(const RasterImage& img, int side);

/// Euclidean distances between all pairs. Throws DimensionMismatch on
/// nonuniform dimensions or fewer than 2 vectors.
DistanceMatrix pairwise_distances(const std::vector<FeatureVector>& features);

/// Sum of D[i][j] over unordered pairs {i, j} of the subset.
double disparity_sum(const std::vector<std::size_t>& subset, const DistanceMatrix& d);

/// Exhaustive maximizer of the disparity sum over all size-k subsets.
/// Guarded to n <= 20; ties break to the lexicographically smallest index
/// list. This is the reference mode.
SubsetSelection select_diverse_exact(const DistanceMatrix& d, std::size_t k);

/// Scalable mode: seed with the farthest pair (lexicographic ties), then
/// repeatedly add the index with maximal summed distance to the chosen set
/// (smallest index on ties). indices are in selection order.
SubsetSelection select_diverse_greedy(const DistanceMatrix& d, std::size_t k);

} // namespace curator

#endif // CURATOR_DIVERSITY_HPP
