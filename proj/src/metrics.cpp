#include "curator/metrics.hpp"

#include "curator/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>

namespace curator {

double bhattacharyya(const IntensityDistribution& p, const IntensityDistribution& q,
                     BcForm form) {
    double coeff = 0.0;
    if (form == BcForm::Standard) {
        for (int i = 0; i < 256; ++i) coeff += std::sqrt(p.probs[i] * q.probs[i]);
    } else {
        for (int i = 0; i < 256; ++i) coeff += p.probs[i] * q.probs[i];
    }
    coeff = std::clamp(coeff, kBhattacharyyaEpsilon, 1.0);
    return -std::log(coeff);
}

double content_distance(const RasterImage& original, const RasterImage& generated,
                        BcForm form) {
    const auto p = normalize_histogram(histogram(to_gray(original)));
    const auto q = normalize_histogram(histogram(to_gray(generated)));
    return bhattacharyya(p, q, form);
}

SpatialStats spatial_stats(const RegionOfInterest& roi, const GrayPlane& plane) {
    if (roi.mask.width != plane.width || roi.mask.height != plane.height)
        throw DimensionMismatch("spatial_stats: mask and plane dimensions differ");

    double sum_x = 0.0, sum_y = 0.0;
    std::size_t n = 0;
    for (int y = 0; y < roi.mask.height; ++y) {
        for (int x = 0; x < roi.mask.width; ++x) {
            if (!roi.mask.at(x, y)) continue;
            sum_x += x;
            sum_y += y;
            ++n;
        }
    }
    if (n == 0)
        throw EmptyRoi("spatial_stats: ROI mask has no foreground pixel");

    SpatialStats stats;
    stats.x_centroid = sum_x / static_cast<double>(n);
    stats.y_centroid = sum_y / static_cast<double>(n);
    stats.centroid_scalar = (stats.x_centroid + stats.y_centroid) / 2.0;

    // Population spread over every pixel of the bounding box.
    double sum = 0.0;
    std::size_t count = 0;
    for (int y = roi.y_min; y <= roi.y_max; ++y)
        for (int x = roi.x_min; x <= roi.x_max; ++x) {
            sum += plane.at(x, y);
            ++count;
        }
    const double mu = sum / static_cast<double>(count);
    double sq = 0.0;
    for (int y = roi.y_min; y <= roi.y_max; ++y)
        for (int x = roi.x_min; x <= roi.x_max; ++x) {
            const double diff = plane.at(x, y) - mu;
            sq += diff * diff;
        }
    stats.sigma = std::sqrt(sq / static_cast<double>(count));
    return stats;
}

double spatial_score(const SpatialStats& original, const SpatialStats& generated) {
    return std::abs(original.centroid_scalar - generated.centroid_scalar) +
           std::abs(original.sigma - generated.sigma);
}

std::vector<double> min_max_normalize(const std::vector<double>& scores) {
    if (scores.empty())
        throw NonFiniteInput("min_max_normalize: empty input");
    for (double s : scores)
        if (!std::isfinite(s))
            throw NonFiniteInput("min_max_normalize: non-finite score");

    const auto [lo_it, hi_it] = std::minmax_element(scores.begin(), scores.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<double> out(scores.size(), 0.0);
    if (hi > lo) {
        const double range = hi - lo;
        for (std::size_t i = 0; i < scores.size(); ++i)
            out[i] = (scores[i] - lo) / range;
    }
    return out;
}

Weights::Weights(double content_weight, double spatial_weight)
    : w1(content_weight), w2(spatial_weight) {
    if (!(w1 >= 0.0 && w1 <= 1.0) || !(w2 >= 0.0 && w2 <= 1.0))
        throw WeightOutOfRange("weights must satisfy 0 <= w <= 1");
}

double content_space_score(double c_norm, double s_norm, const Weights& w) {
    if (!(w.w1 >= 0.0 && w.w1 <= 1.0) || !(w.w2 >= 0.0 && w.w2 <= 1.0))
        throw WeightOutOfRange("weights must satisfy 0 <= w <= 1");
    return w.w1 * c_norm + w.w2 * s_norm;
}

namespace {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

Matrix cov_as_matrix(const GaussianStats& g) {
    const auto d = static_cast<Eigen::Index>(g.dim());
    Matrix m(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j)
            m(i, j) = g.cov[static_cast<std::size_t>(i) * g.dim() +
                            static_cast<std::size_t>(j)];
    return m;
}

// Symmetric PSD square root; eigenvalues below tolerance fail, negatives
// within tolerance clamp to zero.
Matrix psd_sqrt(const Matrix& m, const char* which) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(m);
    Vector evals = solver.eigenvalues();
    for (Eigen::Index i = 0; i < evals.size(); ++i) {
        if (evals(i) < -1e-6)
            throw NotPsd(std::string("frechet_distance: ") + which +
                         " covariance is not PSD (eigenvalue " +
                         std::to_string(evals(i)) + ")");
        evals(i) = std::sqrt(std::max(evals(i), 0.0));
    }
    return solver.eigenvectors() * evals.asDiagonal() *
           solver.eigenvectors().transpose();
}

} // namespace

GaussianStats gaussian_stats(const EmbeddingMatrix& embeddings) {
    const std::size_t n = embeddings.rows();
    const std::size_t d = embeddings.dim;
    if (n < 2)
        throw TooFewSamples("gaussian_stats: need at least 2 rows");

    GaussianStats g;
    g.mean.assign(d, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j) g.mean[j] += embeddings.row(i)[j];
    for (std::size_t j = 0; j < d; ++j) g.mean[j] /= static_cast<double>(n);

    Matrix centered(n, d);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < d; ++j)
            centered(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                embeddings.row(i)[j] - g.mean[j];

    Matrix cov = (centered.transpose() * centered) / static_cast<double>(n - 1);
    cov = ((cov + cov.transpose()) / 2.0).eval();

    g.cov.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            g.cov[i * d + j] = cov(static_cast<Eigen::Index>(i),
                                   static_cast<Eigen::Index>(j));
    return g;
}

FrechetReference::FrechetReference(const GaussianStats& a) : mean_(a.mean) {
    if (a.dim() == 0)
        throw DimensionMismatch("frechet_distance: empty statistics");
    const Matrix cov_a = cov_as_matrix(a);
    // V D V^T is symmetric only up to rounding; force exact symmetry so the
    // row-major storage reads back identically under any layout.
    const Matrix raw = psd_sqrt(cov_a, "first");
    const Matrix sqrt_a = ((raw + raw.transpose()) / 2.0).eval();
    cov_trace_ = cov_a.trace();
    const std::size_t d = a.dim();
    sqrt_cov_.assign(d * d, 0.0);
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = 0; j < d; ++j)
            sqrt_cov_[i * d + j] = sqrt_a(static_cast<Eigen::Index>(i),
                                          static_cast<Eigen::Index>(j));
}

double FrechetReference::distance_to(const GaussianStats& b) const {
    if (dim() != b.dim())
        throw DimensionMismatch("frechet_distance: dimension mismatch");
    const auto d = static_cast<Eigen::Index>(dim());

    Vector mean_diff(d);
    for (Eigen::Index i = 0; i < d; ++i)
        mean_diff(i) = mean_[static_cast<std::size_t>(i)] -
                       b.mean[static_cast<std::size_t>(i)];

    const Eigen::Map<const Matrix> sqrt_a(sqrt_cov_.data(), d, d); // symmetric
    const Matrix cov_b = cov_as_matrix(b);
    Matrix inner = sqrt_a * cov_b * sqrt_a;
    inner = ((inner + inner.transpose()) / 2.0).eval();

    Eigen::SelfAdjointEigenSolver<Matrix> inner_solver(inner,
                                                       Eigen::EigenvaluesOnly);
    double trace_sqrt = 0.0;
    for (Eigen::Index i = 0; i < d; ++i)
        trace_sqrt += std::sqrt(std::max(inner_solver.eigenvalues()(i), 0.0));

    const double fid = mean_diff.squaredNorm() + cov_trace_ + cov_b.trace() -
                       2.0 * trace_sqrt;
    return std::max(fid, 0.0);
}

double frechet_distance(const GaussianStats& a, const GaussianStats& b) {
    if (a.dim() != b.dim())
        throw DimensionMismatch("frechet_distance: dimension mismatch");

    // NotPsd check on the second argument mirrors the one inside psd_sqrt.
    const Matrix cov_b = cov_as_matrix(b);
    Eigen::SelfAdjointEigenSolver<Matrix> check_b(cov_b, Eigen::EigenvaluesOnly);
    if (check_b.eigenvalues().minCoeff() < -1e-6)
        throw NotPsd("frechet_distance: second covariance is not PSD (eigenvalue " +
                     std::to_string(check_b.eigenvalues().minCoeff()) + ")");

    return FrechetReference(a).distance_to(b);
}

double fid_between_sets(const EmbeddingMatrix& real_embeddings,
                        const EmbeddingMatrix& gen_embeddings,
                        FidDiagnostics* diag) {
    if (real_embeddings.dim != gen_embeddings.dim)
        throw DimensionMismatch("fid_between_sets: embedding dimensions differ");
    if (diag) {
        diag->rank_deficient_real = real_embeddings.rows() <= real_embeddings.dim;
        diag->rank_deficient_gen = gen_embeddings.rows() <= gen_embeddings.dim;
    }
    return frechet_distance(gaussian_stats(real_embeddings),
                            gaussian_stats(gen_embeddings));
}

} // namespace curator
