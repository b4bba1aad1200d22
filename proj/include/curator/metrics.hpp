#ifndef CURATOR_METRICS_HPP
#define CURATOR_METRICS_HPP

#include "curator/image.hpp"
#include "curator/segmentation.hpp"

#include <string>
#include <vector>

namespace curator {

/// Bhattacharyya form. Standard is -ln(sum sqrt(p_i q_i)), under which
/// identical distributions score 0. PrintedVariant is -ln(sum p_i q_i),
/// kept only for reproduction experiments; it does not score identity as 0.
enum class BcForm { Standard, PrintedVariant };

/// Coefficient floor; bounds the distance at -ln(1e-12) ~ 27.631 for
/// disjoint supports.
inline constexpr double kBhattacharyyaEpsilon = 1e-12;

/// Bhattacharyya distance between two intensity distributions; >= 0, finite.
double bhattacharyya(const IntensityDistribution& p, const IntensityDistribution& q,
                     BcForm form = BcForm::Standard);

/// Content branch: Bhattacharyya distance over the grayscale intensity
/// distributions of two images. Purely histogram-based, so it is invariant
/// under any spatial permutation of pixels; dimensions may differ.
double content_distance(const RasterImage& original, const RasterImage& generated,
                        BcForm form = BcForm::Standard);

/// Foreground centroid and bounding-box intensity spread of a segmented
/// region. centroid_scalar collapses the 2-D centroid to (x + y) / 2; sigma
/// is the population standard deviation over the ROI bounding-box pixels of
/// the segmentation channel.
struct SpatialStats {
    double x_centroid = 0.0;
    double y_centroid = 0.0;
    double centroid_scalar = 0.0;
    double sigma = 0.0;
};

SpatialStats spatial_stats(const RegionOfInterest& roi, const GrayPlane& plane);

/// Spatial score: |centroid_a - centroid_b| + |sigma_a - sigma_b|.
double spatial_score(const SpatialStats& original, const SpatialStats& generated);

/// (s - min) / (max - min); all zeros when max == min. Throws
/// NonFiniteInput for empty or non-finite input.
std::vector<double> min_max_normalize(const std::vector<double>& scores);

/// Branch weights, each in [0, 1] (no sum constraint).
struct Weights {
    double w1 = 0.0; // content branch
    double w2 = 1.0; // spatial branch

    Weights() = default;
    Weights(double content_weight, double spatial_weight);
};

/// Combined metric w1 * c_norm + w2 * s_norm over normalized branch scores.
double content_space_score(double c_norm, double s_norm, const Weights& w);

/// Rows of embedding vectors keyed by source filename.
struct EmbeddingMatrix {
    std::vector<std::string> ids;
    std::size_t dim = 0;
    std::vector<double> data; // row-major, ids.size() x dim

    std::size_t rows() const { return ids.size(); }
    const double* row(std::size_t i) const { return data.data() + i * dim; }
};

/// Gaussian fit of an embedding set: column means and unbiased covariance,
/// symmetrized as (A + A^T) / 2.
struct GaussianStats {
    std::vector<double> mean;
    std::vector<double> cov; // row-major d x d

    std::size_t dim() const { return mean.size(); }
};

GaussianStats gaussian_stats(const EmbeddingMatrix& embeddings);

/// Fréchet distance between Gaussian fits:
/// |mu_a - mu_b|^2 + Tr(cov_a + cov_b - 2 (cov_a cov_b)^{1/2}),
/// with the matrix square root taken through the symmetric eigensystem of
/// cov_a^{1/2} cov_b cov_a^{1/2} (eigenvalues clamped at 0). Throws
/// DimensionMismatch or NotPsd (eigenvalue below -1e-6).
double frechet_distance(const GaussianStats& a, const GaussianStats& b);

/// Repeated-evaluation form: precomputes the first argument's square root
/// once for scoring many candidates against one seed. distance_to expects a
/// numerically PSD b, which gaussian_stats guarantees by construction.
class FrechetReference {
public:
    explicit FrechetReference(const GaussianStats& a);

    double distance_to(const GaussianStats& b) const;
    std::size_t dim() const { return mean_.size(); }

private:
    std::vector<double> mean_;
    std::vector<double> sqrt_cov_; // row-major d x d
    double cov_trace_ = 0.0;
};

struct FidDiagnostics {
    bool rank_deficient_real = false; // n <= d for the real set
    bool rank_deficient_gen = false;
};

/// FID between two embedding sets. Each set needs >= 2 rows; n <= d is
/// flagged through `diag` when given.
double fid_between_sets(const EmbeddingMatrix& real_embeddings,
                        const EmbeddingMatrix& gen_embeddings,
                        FidDiagnostics* diag = nullptr);

} // namespace curator

#endif // CURATOR_METRICS_HPP
