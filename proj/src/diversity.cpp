#include "curator/diversity.hpp"

#include "curator/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace curator {

FeatureVector image_feature(const RasterImage& img, int side) {
    if (side < 1)
        throw std::invalid_argument("image_feature: side must be >= 1");
    const GrayPlane gray = to_gray(img);
    const GrayPlane small = resize_bilinear(gray, side, side);
    FeatureVector f;
    f.values.reserve(small.pixels.size());
    for (auto v : small.pixels)
        f.values.push_back(static_cast<double>(v) / 255.0);
    return f;
}

DistanceMatrix pairwise_distances(const std::vector<FeatureVector>& features) {
    if (features.size() < 2)
        throw DimensionMismatch("pairwise_distances: need at least 2 vectors");
    const std::size_t dim = features[0].values.size();
    for (const auto& f : features)
        if (f.values.size() != dim)
            throw DimensionMismatch("pairwise_distances: nonuniform feature dimensions");

    DistanceMatrix d(features.size());
    for (std::size_t i = 0; i < features.size(); ++i) {
        for (std::size_t j = i + 1; j < features.size(); ++j) {
            double sq = 0.0;
            for (std::size_t k = 0; k < dim; ++k) {
                const double diff = features[i].values[k] - features[j].values[k];
                sq += diff * diff;
            }
            d.set(i, j, std::sqrt(sq));
        }
    }
    return d;
}

double disparity_sum(const std::vector<std::size_t>& subset, const DistanceMatrix& d) {
    for (std::size_t i = 0; i < subset.size(); ++i) {
        if (subset[i] >= d.n)
            throw IndexOutOfRange("disparity_sum: index " + std::to_string(subset[i]) +
                                  " out of range");
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            if (subset[i] == subset[j])
                throw DuplicateIndex("disparity_sum: duplicate index " +
                                     std::to_string(subset[i]));
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < subset.size(); ++i)
        for (std::size_t j = i + 1; j < subset.size(); ++j)
            sum += d.at(subset[i], subset[j]);
    return sum;
}

SubsetSelection select_diverse_exact(const DistanceMatrix& d, std::size_t k) {
    if (d.n > 20)
        throw InstanceTooLarge("select_diverse_exact: n = " + std::to_string(d.n) +
                               " exceeds the exact-mode cap of 20");
    if (k < 1 || k > d.n)
        throw KTooLarge("select_diverse_exact: k must be in [1, n]");

    // Enumerate k-combinations in lexicographic order; strict improvement
    // keeps the first (lexicographically smallest) maximizer.
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});

    SubsetSelection best;
    best.indices = comb;
    best.objective = disparity_sum(comb, d);

    auto next_combination = [&]() {
        std::size_t i = k;
        while (i > 0) {
            --i;
            if (comb[i] != i + d.n - k) {
                ++comb[i];
                for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                return true;
            }
        }
        return false;
    };

    while (next_combination()) {
        const double obj = disparity_sum(comb, d);
        if (obj > best.objective) {
            best.objective = obj;
            best.indices = comb;
        }
    }
    return best;
}

SubsetSelection select_diverse_greedy(const DistanceMatrix& d, std::size_t k) {
    if (k < 1 || k > d.n)
        throw KTooLarge("select_diverse_greedy: k must be in [1, n]");

    SubsetSelection sel;
    if (k == 1) {
        sel.indices = {0}; // all singletons score 0; lexicographic tie-break
        return sel;
    }

    std::size_t best_i = 0, best_j = 1;
    double best_d = d.at(0, 1);
    for (std::size_t i = 0; i < d.n; ++i) {
        for (std::size_t j = i + 1; j < d.n; ++j) {
            if (d.at(i, j) > best_d) {
                best_d = d.at(i, j);
                best_i = i;
                best_j = j;
            }
        }
    }
    sel.indices = {best_i, best_j};

    std::vector<bool> chosen(d.n, false);
    chosen[best_i] = chosen[best_j] = true;
    std::vector<double> gain(d.n, 0.0); // summed distance to the chosen set
    for (std::size_t j = 0; j < d.n; ++j)
        gain[j] = d.at(best_i, j) + d.at(best_j, j);

    while (sel.indices.size() < k) {
        std::size_t best_idx = d.n;
        for (std::size_t j = 0; j < d.n; ++j) {
            if (chosen[j]) continue;
            if (best_idx == d.n || gain[j] > gain[best_idx]) best_idx = j;
        }
        chosen[best_idx] = true;
        sel.indices.push_back(best_idx);
        for (std::size_t j = 0; j < d.n; ++j) gain[j] += d.at(best_idx, j);
    }

    sel.objective = disparity_sum(sel.indices, d);
    return sel;
}

} // namespace curator
