#include "curator/diversity.hpp"
#include "curator/errors.hpp"
#include "curator/rng.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

using namespace curator;

namespace {

DistanceMatrix line_points(const std::vector<double>& positions) {
    DistanceMatrix d(positions.size());
    for (std::size_t i = 0; i < positions.size(); ++i)
        for (std::size_t j = i + 1; j < positions.size(); ++j)
            d.set(i, j, std::abs(positions[i] - positions[j]));
    return d;
}

// Brute-force oracle over all C(n, k) subsets, lexicographic tie-break.
SubsetSelection brute_force_best(const DistanceMatrix& d, std::size_t k) {
    std::vector<std::size_t> comb(k);
    std::iota(comb.begin(), comb.end(), std::size_t{0});
    SubsetSelection best{comb, disparity_sum(comb, d)};
    auto advance = [&]() {
        std::size_t i = k;
        while (i-- > 0) {
            if (comb[i] != i + d.n - k) {
                ++comb[i];
                for (std::size_t j = i + 1; j < k; ++j) comb[j] = comb[j - 1] + 1;
                return true;
            }
        }
        return false;
    };
    while (advance()) {
        const double obj = disparity_sum(comb, d);
        if (obj > best.objective) best = {comb, obj};
    }
    return best;
}

DistanceMatrix random_metric(Rng& rng, std::size_t n) {
    // random points in the plane keep the matrix metric and generic
    std::vector<std::pair<double, double>> pts;
    for (std::size_t i = 0; i < n; ++i)
        pts.emplace_back(rng.next_double() * 10, rng.next_double() * 10);
    DistanceMatrix d(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            d.set(i, j, std::hypot(pts[i].first - pts[j].first,
                                   pts[i].second - pts[j].second));
    return d;
}

} // namespace

TEST_CASE("image_feature: solid black and white, gradient oracle") {
    const auto black = image_feature(testutil::solid_rgb(6, 6, 0, 0, 0), 2);
    CHECK(black.values == std::vector<double>{0, 0, 0, 0});
    const auto white = image_feature(testutil::solid_rgb(6, 6, 255, 255, 255), 2);
    CHECK(white.values == std::vector<double>{1, 1, 1, 1});

    // horizontal gradient, side 8: compare against a direct resize of the plane
    RasterImage grad(64, 64, 3);
    for (int y = 0; y < 64; ++y)
        for (int x = 0; x < 64; ++x)
            for (int c = 0; c < 3; ++c)
                grad.set(x, y, c, static_cast<std::uint8_t>(x * 4));
    const auto f = image_feature(grad, 8);
    REQUIRE(f.values.size() == 64);
    const GrayPlane expected = resize_bilinear(to_gray(grad), 8, 8);
    for (int i = 0; i < 64; ++i)
        CHECK(std::abs(f.values[i] - expected.pixels[i] / 255.0) <= 1.0 / 255.0);
}

TEST_CASE("pairwise_distances: identical vectors, pythagoras, axioms") {
    const std::vector<FeatureVector> same = {{{1, 2}}, {{1, 2}}};
    const DistanceMatrix d0 = pairwise_distances(same);
    CHECK(d0.at(0, 1) == 0.0);
    CHECK(d0.at(0, 0) == 0.0);

    const std::vector<FeatureVector> pyth = {{{0, 0}}, {{3, 4}}};
    CHECK(pairwise_distances(pyth).at(0, 1) == doctest::Approx(5.0));

    Rng rng(79);
    std::vector<FeatureVector> fs;
    for (int i = 0; i < 6; ++i) {
        FeatureVector f;
        for (int j = 0; j < 4; ++j) f.values.push_back(rng.next_normal());
        fs.push_back(f);
    }
    const DistanceMatrix d = pairwise_distances(fs);
    for (std::size_t i = 0; i < d.n; ++i) {
        CHECK(d.at(i, i) == 0.0);
        for (std::size_t j = 0; j < d.n; ++j) {
            CHECK(d.at(i, j) == d.at(j, i));
            CHECK(d.at(i, j) >= 0.0);
        }
    }

    CHECK_THROWS_AS(pairwise_distances({{{1, 2}}, {{1, 2, 3}}}), DimensionMismatch);
    CHECK_THROWS_AS(pairwise_distances({{{1}}}), DimensionMismatch);
}

TEST_CASE("disparity_sum: singleton, pair, three points on a line") {
    const DistanceMatrix d = line_points({0, 1, 10});
    CHECK(disparity_sum({1}, d) == 0.0);
    CHECK(disparity_sum({0, 2}, d) == doctest::Approx(10.0));
    CHECK(disparity_sum({0, 1, 2}, d) == doctest::Approx(20.0)); // 1 + 10 + 9

    CHECK_THROWS_AS(disparity_sum({0, 7}, d), IndexOutOfRange);
    CHECK_THROWS_AS(disparity_sum({1, 1}, d), DuplicateIndex);
}

TEST_CASE("disparity_sum is monotone under superset") {
    Rng rng(83);
    const DistanceMatrix d = random_metric(rng, 9);
    std::vector<std::size_t> subset = {2, 5};
    double prev = disparity_sum(subset, d);
    for (std::size_t add : {0u, 7u, 3u, 8u}) {
        subset.push_back(add);
        const double next = disparity_sum(subset, d);
        CHECK(next >= prev);
        prev = next;
    }
}

TEST_CASE("select_diverse_exact: line fixtures and guards") {
    const DistanceMatrix d = line_points({0, 1, 10});
    const SubsetSelection s = select_diverse_exact(d, 2);
    CHECK(s.indices == std::vector<std::size_t>{0, 2});
    CHECK(s.objective == doctest::Approx(10.0));

    const SubsetSelection all = select_diverse_exact(d, 3);
    CHECK(all.indices == std::vector<std::size_t>{0, 1, 2});
    CHECK(all.objective == doctest::Approx(20.0));

    const SubsetSelection one = select_diverse_exact(d, 1);
    CHECK(one.indices == std::vector<std::size_t>{0});
    CHECK(one.objective == 0.0);

    CHECK_THROWS_AS(select_diverse_exact(d, 4), KTooLarge);
    CHECK_THROWS_AS(select_diverse_exact(d, 0), KTooLarge);
    CHECK_THROWS_AS(select_diverse_exact(DistanceMatrix(21), 2), InstanceTooLarge);
}

TEST_CASE("select_diverse_greedy: line fixtures") {
    const DistanceMatrix d = line_points({0, 1, 10});
    const SubsetSelection s = select_diverse_greedy(d, 2);
    std::vector<std::size_t> sorted = s.indices;
    std::sort(sorted.begin(), sorted.end());
    CHECK(sorted == std::vector<std::size_t>{0, 2});

    // {0, 5, 10}, k = 3: everything chosen, objective 5 + 10 + 5
    const DistanceMatrix d2 = line_points({0, 5, 10});
    const SubsetSelection s2 = select_diverse_greedy(d2, 3);
    CHECK(s2.indices.size() == 3);
    CHECK(s2.objective == doctest::Approx(20.0));
    CHECK(select_diverse_exact(d2, 3).objective == doctest::Approx(20.0));

    CHECK_THROWS_AS(select_diverse_greedy(d, 5), KTooLarge);
}

TEST_CASE("exact matches the brute-force oracle; greedy never beats it") {
    Rng rng(89);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + rng.next_below(9);  // 4..12
        const std::size_t k = 1 + rng.next_below(std::min<std::size_t>(5, n));
        const DistanceMatrix d = random_metric(rng, n);

        const SubsetSelection exact = select_diverse_exact(d, k);
        const SubsetSelection oracle = brute_force_best(d, k);
        CHECK(exact.objective == oracle.objective);
        CHECK(exact.indices == oracle.indices);

        const SubsetSelection greedy = select_diverse_greedy(d, k);
        CHECK(greedy.objective <= exact.objective + 1e-12);
        CHECK(greedy.indices.size() == k);
    }
}

TEST_CASE("selectors are permutation-equivariant in the objective") {
    Rng rng(97);
    const std::size_t n = 8, k = 3;
    const DistanceMatrix d = random_metric(rng, n);

    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    rng.shuffle(perm);

    DistanceMatrix pd(n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            pd.entries[perm[i] * n + perm[j]] = d.at(i, j);

    CHECK(select_diverse_exact(pd, k).objective ==
          doctest::Approx(select_diverse_exact(d, k).objective).epsilon(1e-12));
    CHECK(select_diverse_greedy(pd, k).objective ==
          doctest::Approx(select_diverse_greedy(d, k).objective).epsilon(1e-12));
}

TEST_CASE("greedy k = n returns every index") {
    Rng rng(101);
    const DistanceMatrix d = random_metric(rng, 7);
    const SubsetSelection s = select_diverse_greedy(d, 7);
    std::vector<std::size_t> sorted = s.indices;
    std::sort(sorted.begin(), sorted.end());
    std::vector<std::size_t> expected(7);
    std::iota(expected.begin(), expected.end(), std::size_t{0});
    CHECK(sorted == expected);
}
