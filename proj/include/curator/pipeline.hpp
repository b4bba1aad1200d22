#ifndef CURATOR_PIPELINE_HPP
#define CURATOR_PIPELINE_HPP

#include "curator/embedding.hpp"
#include "curator/image.hpp"
#include "curator/metrics.hpp"
#include "curator/segmentation.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace curator {

struct DatasetRecord {
    std::string image_id;
    std::filesystem::path path;
    std::string class_label;
};

/// Image inventory built from a metadata CSV plus an image directory.
/// Metadata rows whose image file is missing are excluded from records and
/// counts and listed in missing_ids.
struct DatasetIndex {
    std::vector<DatasetRecord> records;
    std::map<std::string, std::size_t> class_counts;
    std::vector<std::string> missing_ids;
};

/// Reads a metadata CSV with `image_id` and `dx` columns (extra columns
/// ignored) and resolves each row to <image_dir>/<image_id>.jpg or .png.
DatasetIndex ingest_dataset(const std::filesystem::path& image_dir,
                            const std::filesystem::path& metadata_csv);

/// Seeded per-class split: exactly per_class records of every class go to
/// the test side, the complement to train. Record order is preserved.
/// Throws ClassTooSmall when a class has fewer than per_class records.
std::pair<DatasetIndex, DatasetIndex> stratified_holdout(const DatasetIndex& index,
                                                         std::size_t per_class,
                                                         std::uint64_t rng_seed);

enum class SeedMode { DiverseExact, DiverseGreedy, Random };
enum class MetricMode { ContentSpace, FidBottom, FidTop, Random };
enum class NormalizationCohort { PerSeed, Global };

const char* to_string(SeedMode mode);
const char* to_string(MetricMode mode);
MetricMode metric_mode_from_string(const std::string& name);
SeedMode seed_mode_from_string(const std::string& name);

/// Resolved run configuration. `jobs` controls scoring parallelism only and
/// never changes any output, so it is excluded from the fingerprint.
struct PipelineConfig {
    std::size_t seed_count = 10;
    std::size_t per_seed_select = 10;
    Weights weights{0.0, 1.0}; // space-only default
    MetricMode metric_mode = MetricMode::ContentSpace;
    SeedMode seed_mode = SeedMode::DiverseGreedy;
    SegmentationConfig segmentation;
    NormalizationCohort cohort = NormalizationCohort::PerSeed;
    std::uint64_t rng_seed = 0;
    BcForm bc_form = BcForm::Standard;
    int feature_side = 32;
    int fid_patch = 16;
    bool compute_fid = true;
    int jobs = 1;
};

/// FNV-1a hash of the canonical config serialization, as 16 hex digits.
std::string config_fingerprint(const PipelineConfig& cfg);

/// Per-candidate scoring record. Skipped rows carry a reason and no scores;
/// scored rows carry raw branch values, cohort-normalized values, the
/// combined metric, and a 1-based rank unique within the seed cohort.
struct ScoreRow {
    std::string seed_id;
    std::string candidate_id;
    std::optional<double> c_raw;
    std::optional<double> s_raw;
    std::optional<double> c_norm;
    std::optional<double> s_norm;
    std::optional<double> combined;
    std::optional<double> fid;
    std::optional<std::size_t> rank;
    std::string skipped_reason;

    bool skipped() const { return !skipped_reason.empty(); }
};

struct Candidate {
    std::string id;
    RasterImage image;
};

/// Picks k seed image ids from one class of the training index. Diverse
/// modes run disparity-sum selection over built-in image features (or the
/// supplied embeddings); random mode uses the seeded generator.
std::vector<std::string> pick_seeds(const DatasetIndex& train,
                                    const std::string& class_label, std::size_t k,
                                    SeedMode mode, std::uint64_t rng_seed,
                                    int feature_side = 32,
                                    const EmbeddingMatrix* embeddings = nullptr);

/// Raw branch scores for one cohort: content distance, spatial score against
/// the seed's segmentation statistics, and the patch-embedding FID estimate.
/// Per-candidate failures become skipped_reason entries (when the spatial
/// branch carries weight) instead of aborting; a seed that fails to segment
/// throws SeedSegmentationFailed when w2 > 0.
std::vector<ScoreRow> score_candidates_raw(const std::string& seed_id,
                                           const RasterImage& seed,
                                           const std::vector<Candidate>& candidates,
                                           const PipelineConfig& cfg);

/// Cohort min-max normalization of the C and S columns, the weighted
/// combination, a final min-max of the combined column, and per-seed ranks
/// (ascending combined, ties by candidate_id).
void normalize_and_rank(std::vector<ScoreRow>& rows, const Weights& weights,
                        NormalizationCohort cohort);

/// score_candidates_raw + normalize_and_rank for a single cohort.
std::vector<ScoreRow> score_candidates(const std::string& seed_id,
                                       const RasterImage& seed,
                                       const std::vector<Candidate>& candidates,
                                       const PipelineConfig& cfg);

/// Deterministic record of which generated images augment the training set.
struct SelectionManifest {
    int schema_version = 1;
    std::string config_fingerprint;
    MetricMode metric_mode = MetricMode::ContentSpace;
    Weights weights{0.0, 1.0};
    std::string fid_estimator = "patch16";
    std::size_t total_selected = 0;
    // (seed_id, ordered selected candidate ids), sorted by seed_id
    std::vector<std::pair<std::string, std::vector<std::string>>> selections;
};

/// Per-seed selection of per_seed_select candidates. content-space and
/// fid-bottom take the lowest scores, fid-top the highest, random draws with
/// the seeded generator. Throws CohortTooSmall when a cohort has too few
/// eligible rows.
SelectionManifest select_candidates(const std::vector<ScoreRow>& rows,
                                    MetricMode mode, std::size_t per_seed_select,
                                    std::uint64_t rng_seed,
                                    const PipelineConfig& cfg);

/// Versioned JSON with stable key order; emit -> load round-trips exactly.
void emit_manifest(const SelectionManifest& manifest,
                   const std::filesystem::path& path);
SelectionManifest load_manifest(const std::filesystem::path& path);

/// Score table CSV:
/// seed_id,candidate_id,c_raw,s_raw,c_norm,s_norm,combined,fid,rank,skipped_reason
void write_score_csv(const std::vector<ScoreRow>& rows,
                     const std::filesystem::path& path);
std::vector<ScoreRow> read_score_csv(const std::filesystem::path& path);

/// Loads every PNG/JPEG in a directory (non-recursive, sorted by filename);
/// candidate ids are the file stems.
std::vector<Candidate> load_candidates_dir(const std::filesystem::path& dir);

} // namespace curator

#endif // CURATOR_PIPELINE_HPP
