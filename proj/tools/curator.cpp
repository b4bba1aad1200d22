// curator: command-line front end for the GAN-augmentation curation toolkit.
//
// Subcommands: stats, seeds, score, select, fid, segment. Machine-parsable
// results go to stdout, diagnostics (including the resolved config
// fingerprint) to stderr. Exit codes: 0 success, 2 input/parse error,
// 3 domain error, 4 internal invariant violation.

#include "curator/codec.hpp"
#include "curator/embedding.hpp"
#include "curator/errors.hpp"
#include "curator/metrics.hpp"
#include "curator/pipeline.hpp"
#include "curator/segmentation.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace curator;

struct Options {
    std::string metadata;
    std::string images;
    std::string class_label;
    std::string mode = "diverse-greedy";
    std::string metric_mode = "content-space";
    std::string embeddings;
    std::string seed_image;
    std::string candidates_dir;
    std::string seed_id;
    std::string scores;
    std::string out;
    std::string out_prefix;
    std::string image;
    std::string real_embeddings, gen_embeddings, real_dir, gen_dir;
    std::string channel = "G";
    std::string polarity = "dark";
    std::string bc_form = "standard";
    std::string cohort = "per-seed";
    double w1 = 0.0;
    double w2 = 1.0;
    double smooth_factor = 2.0;
    std::size_t k = 10;
    std::size_t holdout = 0;
    std::uint64_t rng_seed = 0;
    int side = 32;
    int fid_side = 16;
    int fid_patch = 16;
    int jobs = 1;
    int close_radius = 2;
    int erode_radius = 1;
    int mask_close_radius = 2;
    bool debug = false;
    bool no_fid = false;
};

Channel parse_channel(const std::string& name) {
    if (name == "R") return Channel::R;
    if (name == "G") return Channel::G;
    if (name == "B") return Channel::B;
    throw InputError("unknown channel: " + name + " (expected R, G, or B)");
}

Polarity parse_polarity(const std::string& name) {
    if (name == "dark") return Polarity::ForegroundDark;
    if (name == "bright") return Polarity::ForegroundBright;
    throw InputError("unknown polarity: " + name + " (expected dark or bright)");
}

PipelineConfig resolve_config(const Options& opt) {
    PipelineConfig cfg;
    cfg.per_seed_select = opt.k;
    cfg.seed_count = opt.k;
    cfg.weights = Weights(opt.w1, opt.w2);
    cfg.metric_mode = metric_mode_from_string(opt.metric_mode);
    cfg.seed_mode = seed_mode_from_string(opt.mode);
    cfg.segmentation.channel = parse_channel(opt.channel);
    cfg.segmentation.polarity = parse_polarity(opt.polarity);
    cfg.segmentation.denoise.close_se = StructuringElement::square(opt.close_radius);
    cfg.segmentation.denoise.erode_se = StructuringElement::square(opt.erode_radius);
    cfg.segmentation.denoise.smooth_factor = opt.smooth_factor;
    cfg.segmentation.mask_close_se = StructuringElement::square(opt.mask_close_radius);
    cfg.cohort = opt.cohort == "global" ? NormalizationCohort::Global
                                        : NormalizationCohort::PerSeed;
    cfg.rng_seed = opt.rng_seed;
    cfg.bc_form = opt.bc_form == "paper" ? BcForm::PrintedVariant : BcForm::Standard;
    cfg.feature_side = opt.side;
    cfg.fid_patch = opt.fid_patch;
    cfg.compute_fid = !opt.no_fid;
    cfg.jobs = opt.jobs;
    return cfg;
}

void print_fingerprint(const PipelineConfig& cfg) {
    std::cerr << "config-fingerprint: " << config_fingerprint(cfg) << "\n";
}

void report_missing(const DatasetIndex& index) {
    for (const auto& id : index.missing_ids)
        std::cerr << "warning: missing image file for " << id << "\n";
}

int cmd_stats(const Options& opt) {
    print_fingerprint(resolve_config(opt));
    const DatasetIndex index = ingest_dataset(opt.images, opt.metadata);
    report_missing(index);

    std::vector<std::pair<std::string, std::size_t>> counts(
        index.class_counts.begin(), index.class_counts.end());
    std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
        if (a.second != b.second) return a.second > b.second;
        return a.first < b.first;
    });
    for (const auto& [label, count] : counts)
        std::cout << label << "\t" << count << "\n";
    return 0;
}

int cmd_seeds(const Options& opt) {
    const PipelineConfig cfg = resolve_config(opt);
    print_fingerprint(cfg);
    DatasetIndex index = ingest_dataset(opt.images, opt.metadata);
    report_missing(index);
    if (opt.holdout > 0)
        index = stratified_holdout(index, opt.holdout, cfg.rng_seed).first;

    EmbeddingMatrix embeddings;
    const EmbeddingMatrix* emb_ptr = nullptr;
    if (!opt.embeddings.empty()) {
        embeddings = load_embeddings_csv(opt.embeddings);
        emb_ptr = &embeddings;
    }

    const auto ids = pick_seeds(index, opt.class_label, opt.k, cfg.seed_mode,
                                cfg.rng_seed, cfg.feature_side, emb_ptr);
    std::string lines;
    for (const auto& id : ids) lines += id + "\n";
    std::cout << lines;
    if (!opt.out.empty()) {
        std::ofstream out(opt.out, std::ios::binary);
        if (!out) throw IoError("cannot write seed list: " + opt.out);
        out << lines;
    }
    return 0;
}

int cmd_score(const Options& opt) {
    const PipelineConfig cfg = resolve_config(opt);
    print_fingerprint(cfg);

    const RasterImage seed = load_image(opt.seed_image);
    const std::string seed_id =
        opt.seed_id.empty() ? std::filesystem::path(opt.seed_image).stem().string()
                            : opt.seed_id;
    const auto candidates = load_candidates_dir(opt.candidates_dir);
    const auto rows = score_candidates(seed_id, seed, candidates, cfg);

    for (const auto& row : rows)
        if (row.skipped())
            std::cerr << "warning: skipped " << row.candidate_id << " ("
                      << row.skipped_reason << ")\n";

    write_score_csv(rows, opt.out.empty() ? "/dev/stdout" : opt.out);
    return 0;
}

int cmd_select(const Options& opt) {
    const PipelineConfig cfg = resolve_config(opt);
    print_fingerprint(cfg);
    const auto rows = read_score_csv(opt.scores);
    const SelectionManifest manifest =
        select_candidates(rows, cfg.metric_mode, opt.k, cfg.rng_seed, cfg);
    emit_manifest(manifest, opt.out);
    std::cerr << "selected " << manifest.total_selected << " candidates over "
              << manifest.selections.size() << " seeds\n";
    return 0;
}

int cmd_fid(const Options& opt) {
    const PipelineConfig cfg = resolve_config(opt);
    print_fingerprint(cfg);

    EmbeddingMatrix real_set, gen_set;
    if (!opt.real_embeddings.empty() && !opt.gen_embeddings.empty()) {
        real_set = load_embeddings_csv(opt.real_embeddings);
        gen_set = load_embeddings_csv(opt.gen_embeddings);
    } else if (!opt.real_dir.empty() && !opt.gen_dir.empty()) {
        real_set = directory_embeddings(opt.real_dir, opt.fid_side);
        gen_set = directory_embeddings(opt.gen_dir, opt.fid_side);
    } else {
        throw InputError(
            "fid needs --real-embeddings/--gen-embeddings or --real-dir/--gen-dir");
    }

    FidDiagnostics diag;
    const double fid = fid_between_sets(real_set, gen_set, &diag);
    if (diag.rank_deficient_real)
        std::cerr << "warning: real set has n <= d; covariance is rank deficient\n";
    if (diag.rank_deficient_gen)
        std::cerr << "warning: generated set has n <= d; covariance is rank deficient\n";
    std::printf("%.6f\n", fid);
    return 0;
}

int cmd_segment(const Options& opt) {
    const PipelineConfig cfg = resolve_config(opt);
    print_fingerprint(cfg);
    const RasterImage img = load_image(opt.image);
    const SegmentationProduct product = segment_lesion_detail(img, cfg.segmentation);
    write_segmentation_outputs(product, opt.out_prefix, opt.debug);
    const SpatialStats stats = spatial_stats(product.roi, product.channel);
    std::printf("%.6f %.6f %.6f %.6f\n", stats.x_centroid, stats.y_centroid,
                stats.centroid_scalar, stats.sigma);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"curation toolkit for GAN-based augmentation of long-tailed "
                 "image datasets"};
    app.require_subcommand(1);
    Options opt;

    auto add_seg_flags = [&](CLI::App* cmd) {
        cmd->add_option("--channel", opt.channel, "segmentation channel (R, G, B)")
            ->capture_default_str();
        cmd->add_option("--polarity", opt.polarity,
                        "foreground polarity (dark or bright)")
            ->capture_default_str();
        cmd->add_option("--close-radius", opt.close_radius,
                        "square SE radius for the denoise closing")
            ->capture_default_str();
        cmd->add_option("--erode-radius", opt.erode_radius,
                        "square SE radius for the denoise erosion")
            ->capture_default_str();
        cmd->add_option("--smooth-factor", opt.smooth_factor,
                        "bilinear down/up interpolation factor (1 = off)")
            ->capture_default_str();
        cmd->add_option("--mask-close-radius", opt.mask_close_radius,
                        "square SE radius for the final mask closing")
            ->capture_default_str();
    };

    CLI::App* stats = app.add_subcommand("stats", "per-class sample counts");
    stats->add_option("--metadata", opt.metadata, "metadata CSV (image_id,dx)")
        ->required();
    stats->add_option("--images", opt.images, "image directory")->required();

    CLI::App* seeds = app.add_subcommand("seeds", "pick seed images from a class");
    seeds->add_option("--metadata", opt.metadata, "metadata CSV")->required();
    seeds->add_option("--images", opt.images, "image directory")->required();
    seeds->add_option("--class", opt.class_label, "class label (dx value)")
        ->required();
    seeds->add_option("--k", opt.k, "number of seeds")->capture_default_str();
    seeds->add_option("--mode", opt.mode,
                      "diverse-exact, diverse-greedy, or random")
        ->capture_default_str();
    seeds->add_option("--embeddings", opt.embeddings,
                      "optional embeddings CSV replacing built-in features");
    seeds->add_option("--seed", opt.rng_seed, "RNG seed")->capture_default_str();
    seeds->add_option("--side", opt.side, "built-in feature resolution")
        ->capture_default_str();
    seeds->add_option("--holdout", opt.holdout,
                      "per-class holdout to exclude before picking (0 = none)")
        ->capture_default_str();
    seeds->add_option("--out", opt.out, "also write the ids to this file");

    CLI::App* score = app.add_subcommand("score", "score candidates against a seed");
    score->add_option("--seed-image", opt.seed_image, "seed image path")->required();
    score->add_option("--candidates-dir", opt.candidates_dir,
                      "directory of candidate images")
        ->required();
    score->add_option("--seed-id", opt.seed_id, "seed id (default: file stem)");
    score->add_option("--w1", opt.w1, "content branch weight")->capture_default_str();
    score->add_option("--w2", opt.w2, "spatial branch weight")->capture_default_str();
    score->add_option("--out", opt.out, "score CSV path (default: stdout)");
    score->add_option("--jobs", opt.jobs, "scoring worker threads")
        ->capture_default_str();
    score->add_option("--bc-form", opt.bc_form,
                      "Bhattacharyya form: standard or paper")
        ->capture_default_str();
    score->add_option("--cohort", opt.cohort,
                      "normalization cohort: per-seed or global")
        ->capture_default_str();
    score->add_option("--fid-patch", opt.fid_patch, "patch size of the FID estimator")
        ->capture_default_str();
    score->add_flag("--no-fid", opt.no_fid, "skip the per-candidate FID column");
    add_seg_flags(score);

    CLI::App* select = app.add_subcommand("select", "build a selection manifest");
    select->add_option("--scores", opt.scores, "score CSV from `score`")->required();
    select->add_option("--mode", opt.metric_mode,
                       "content-space, fid-bottom, fid-top, or random")
        ->capture_default_str();
    select->add_option("--k", opt.k, "selections per seed")->capture_default_str();
    select->add_option("--seed", opt.rng_seed, "RNG seed for random mode")
        ->capture_default_str();
    select->add_option("--w1", opt.w1, "content weight recorded in the manifest")
        ->capture_default_str();
    select->add_option("--w2", opt.w2, "spatial weight recorded in the manifest")
        ->capture_default_str();
    select->add_option("--out", opt.out, "manifest JSON path")->required();

    CLI::App* fid = app.add_subcommand("fid", "Frechet distance between two sets");
    fid->add_option("--real-embeddings", opt.real_embeddings, "real-set CSV");
    fid->add_option("--gen-embeddings", opt.gen_embeddings, "generated-set CSV");
    fid->add_option("--real-dir", opt.real_dir, "real image directory");
    fid->add_option("--gen-dir", opt.gen_dir, "generated image directory");
    fid->add_option("--side", opt.fid_side,
                    "built-in feature resolution for directory inputs")
        ->capture_default_str();

    CLI::App* segment = app.add_subcommand("segment", "segment one image");
    segment->add_option("--image", opt.image, "input image")->required();
    segment->add_option("--out-prefix", opt.out_prefix,
                        "output stem for <stem>.mask.png / <stem>.roi.png")
        ->required();
    segment->add_flag("--debug", opt.debug, "also write <stem>.denoised.png");
    add_seg_flags(segment);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (app.got_subcommand(stats)) return cmd_stats(opt);
        if (app.got_subcommand(seeds)) return cmd_seeds(opt);
        if (app.got_subcommand(score)) return cmd_score(opt);
        if (app.got_subcommand(select)) return cmd_select(opt);
        if (app.got_subcommand(fid)) return cmd_fid(opt);
        if (app.got_subcommand(segment)) return cmd_segment(opt);
    } catch (const InputError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const DomainError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "internal error: " << e.what() << "\n";
        return 4;
    }
    return 0;
}
