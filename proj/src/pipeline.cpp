#include "curator/pipeline.hpp"

#include "curator/codec.hpp"
#include "curator/diversity.hpp"
#include "curator/errors.hpp"
#include "curator/rng.hpp"
#include "csv.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <mutex>
#include <set>
#include <thread>

namespace curator {

namespace {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void parallel_for(std::size_t count, int jobs,
                  const std::function<void(std::size_t)>& fn) {
    if (jobs <= 1 || count <= 1) {
        for (std::size_t i = 0; i < count; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(jobs), count);
    std::vector<std::thread> workers;
    workers.reserve(n_threads);
    for (std::size_t t = 0; t < n_threads; ++t) {
        workers.emplace_back([&] {
            for (;;) {
                const std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                    return;
                }
            }
        });
    }
    for (auto& w : workers) w.join();
    if (error) std::rethrow_exception(error);
}

std::string se_to_string(const StructuringElement& se) {
    return std::string(se.shape == StructuringElement::Shape::Square ? "square"
                                                                     : "disk") +
           ":" + std::to_string(se.radius);
}

const char* channel_name(Channel c) {
    switch (c) {
        case Channel::R: return "R";
        case Channel::G: return "G";
        default: return "B";
    }
}

} // namespace

const char* to_string(SeedMode mode) {
    switch (mode) {
        case SeedMode::DiverseExact: return "diverse-exact";
        case SeedMode::DiverseGreedy: return "diverse-greedy";
        default: return "random";
    }
}

const char* to_string(MetricMode mode) {
    switch (mode) {
        case MetricMode::ContentSpace: return "content-space";
        case MetricMode::FidBottom: return "fid-bottom";
        case MetricMode::FidTop: return "fid-top";
        default: return "random";
    }
}

MetricMode metric_mode_from_string(const std::string& name) {
    if (name == "content-space") return MetricMode::ContentSpace;
    if (name == "fid-bottom") return MetricMode::FidBottom;
    if (name == "fid-top") return MetricMode::FidTop;
    if (name == "random") return MetricMode::Random;
    throw InputError("unknown metric mode: " + name);
}

SeedMode seed_mode_from_string(const std::string& name) {
    if (name == "diverse-exact") return SeedMode::DiverseExact;
    if (name == "diverse-greedy") return SeedMode::DiverseGreedy;
    if (name == "random") return SeedMode::Random;
    throw InputError("unknown seed mode: " + name);
}

std::string config_fingerprint(const PipelineConfig& cfg) {
    // jobs is deliberately absent: parallelism never changes outputs.
    std::string canon;
    canon += "seed_count=" + std::to_string(cfg.seed_count);
    canon += ";per_seed_select=" + std::to_string(cfg.per_seed_select);
    canon += ";w1=" + fmt_double(cfg.weights.w1);
    canon += ";w2=" + fmt_double(cfg.weights.w2);
    canon += ";metric_mode=" + std::string(to_string(cfg.metric_mode));
    canon += ";seed_mode=" + std::string(to_string(cfg.seed_mode));
    canon += ";channel=" + std::string(channel_name(cfg.segmentation.channel));
    canon += ";polarity=";
    canon += cfg.segmentation.polarity == Polarity::ForegroundDark ? "dark" : "bright";
    canon += ";close_se=" + se_to_string(cfg.segmentation.denoise.close_se);
    canon += ";erode_se=" + se_to_string(cfg.segmentation.denoise.erode_se);
    canon += ";smooth=" + fmt_double(cfg.segmentation.denoise.smooth_factor);
    canon += ";mask_close_se=" + se_to_string(cfg.segmentation.mask_close_se);
    canon += ";cohort=";
    canon += cfg.cohort == NormalizationCohort::PerSeed ? "per-seed" : "global";
    canon += ";rng_seed=" + std::to_string(cfg.rng_seed);
    canon += ";bc_form=";
    canon += cfg.bc_form == BcForm::Standard ? "standard" : "paper";
    canon += ";feature_side=" + std::to_string(cfg.feature_side);
    canon += ";fid_patch=" + std::to_string(cfg.fid_patch);
    canon += ";compute_fid=" + std::to_string(cfg.compute_fid ? 1 : 0);

    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(fnv1a64(canon)));
    return buf;
}

DatasetIndex ingest_dataset(const std::filesystem::path& image_dir,
                            const std::filesystem::path& metadata_csv) {
    std::ifstream in(metadata_csv);
    if (!in) throw IoError("cannot open metadata CSV: " + metadata_csv.string());

    std::string line;
    if (!std::getline(in, line))
        throw NoRecords("metadata CSV is empty: " + metadata_csv.string());
    const auto header = detail::split_csv_line(line);
    std::size_t id_col = header.size(), dx_col = header.size();
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "image_id") id_col = i;
        if (header[i] == "dx") dx_col = i;
    }
    if (id_col == header.size() || dx_col == header.size())
        throw CsvParseError("metadata CSV needs `image_id` and `dx` columns: " +
                            metadata_csv.string());

    DatasetIndex index;
    std::set<std::string> seen_ids;
    std::size_t line_no = 1;
    bool any_row = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        any_row = true;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() <= std::max(id_col, dx_col))
            throw CsvParseError("metadata CSV line " + std::to_string(line_no) +
                                ": too few fields");
        const std::string& id = fields[id_col];
        const std::string& dx = fields[dx_col];
        if (id.empty() || dx.empty())
            throw CsvParseError("metadata CSV line " + std::to_string(line_no) +
                                ": empty image_id or dx");
        if (!seen_ids.insert(id).second)
            throw CsvParseError("metadata CSV: duplicate image_id " + id);

        std::filesystem::path path = image_dir / (id + ".jpg");
        if (!std::filesystem::exists(path)) {
            path = image_dir / (id + ".png");
            if (!std::filesystem::exists(path)) {
                index.missing_ids.push_back(id);
                continue;
            }
        }
        index.records.push_back({id, path, dx});
        ++index.class_counts[dx];
    }
    if (!any_row)
        throw NoRecords("metadata CSV has no data rows: " + metadata_csv.string());
    if (index.records.empty())
        throw NoRecords("metadata CSV matched no existing image files: " +
                        metadata_csv.string());
    return index;
}

std::pair<DatasetIndex, DatasetIndex> stratified_holdout(const DatasetIndex& index,
                                                         std::size_t per_class,
                                                         std::uint64_t rng_seed) {
    std::map<std::string, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < index.records.size(); ++i)
        by_class[index.records[i].class_label].push_back(i);

    for (const auto& [label, members] : by_class)
        if (members.size() < per_class)
            throw ClassTooSmall("class " + label + " has " +
                                std::to_string(members.size()) +
                                " samples, need " + std::to_string(per_class));

    std::vector<std::uint8_t> in_test(index.records.size(), 0);
    for (const auto& [label, members] : by_class) {
        Rng rng(rng_seed ^ fnv1a64("holdout:" + label));
        for (std::size_t pick : rng.sample_indices(members.size(), per_class))
            in_test[members[pick]] = 1;
    }

    DatasetIndex train, test;
    for (std::size_t i = 0; i < index.records.size(); ++i) {
        DatasetIndex& side = in_test[i] ? test : train;
        side.records.push_back(index.records[i]);
        ++side.class_counts[index.records[i].class_label];
    }
    return {train, test};
}

std::vector<std::string> pick_seeds(const DatasetIndex& train,
                                    const std::string& class_label, std::size_t k,
                                    SeedMode mode, std::uint64_t rng_seed,
                                    int feature_side,
                                    const EmbeddingMatrix* embeddings) {
    std::vector<const DatasetRecord*> members;
    for (const auto& rec : train.records)
        if (rec.class_label == class_label) members.push_back(&rec);
    if (members.size() < k || k == 0)
        throw ClassTooSmall("class " + class_label + " has " +
                            std::to_string(members.size()) + " samples, need " +
                            std::to_string(k));

    std::vector<std::string> ids;
    if (mode == SeedMode::Random) {
        Rng rng(rng_seed ^ fnv1a64("seeds:" + class_label));
        for (std::size_t pick : rng.sample_indices(members.size(), k))
            ids.push_back(members[pick]->image_id);
        return ids;
    }

    if (members.size() == 1) return {members[0]->image_id}; // k == 1 forced

    std::vector<FeatureVector> features;
    features.reserve(members.size());
    if (embeddings) {
        std::map<std::string, std::size_t> by_stem;
        for (std::size_t i = 0; i < embeddings->rows(); ++i) {
            by_stem[embeddings->ids[i]] = i;
            by_stem[std::filesystem::path(embeddings->ids[i]).stem().string()] = i;
        }
        for (const auto* rec : members) {
            auto it = by_stem.find(rec->image_id);
            if (it == by_stem.end())
                throw InputError("no embedding row for image_id " + rec->image_id);
            FeatureVector f;
            f.values.assign(embeddings->row(it->second),
                            embeddings->row(it->second) + embeddings->dim);
            features.push_back(std::move(f));
        }
    } else {
        for (const auto* rec : members)
            features.push_back(image_feature(load_image(rec->path), feature_side));
    }

    const DistanceMatrix d = pairwise_distances(features);
    const SubsetSelection sel = mode == SeedMode::DiverseExact
                                    ? select_diverse_exact(d, k)
                                    : select_diverse_greedy(d, k);
    for (std::size_t idx : sel.indices) ids.push_back(members[idx]->image_id);
    return ids;
}

std::vector<ScoreRow> score_candidates_raw(const std::string& seed_id,
                                           const RasterImage& seed,
                                           const std::vector<Candidate>& candidates,
                                           const PipelineConfig& cfg) {
    if (candidates.empty())
        throw NoRecords("score_candidates: candidate set is empty");

    const bool spatial_required = cfg.weights.w2 > 0.0;

    std::optional<SpatialStats> seed_stats;
    try {
        const auto product = segment_lesion_detail(seed, cfg.segmentation);
        seed_stats = spatial_stats(product.roi, product.channel);
    } catch (const DomainError& e) {
        if (spatial_required)
            throw SeedSegmentationFailed("seed " + seed_id +
                                         " failed segmentation: " + e.what());
    }

    const IntensityDistribution seed_dist =
        normalize_histogram(histogram(to_gray(seed)));

    std::optional<FrechetReference> seed_frechet;
    if (cfg.compute_fid) {
        try {
            seed_frechet = FrechetReference(
                gaussian_stats(patch_embeddings(seed, cfg.fid_patch)));
        } catch (const DomainError&) {
            // seed too small to tile: fid column stays absent
        }
    }

    std::vector<ScoreRow> rows(candidates.size());
    parallel_for(candidates.size(), cfg.jobs, [&](std::size_t i) {
        ScoreRow row;
        row.seed_id = seed_id;
        row.candidate_id = candidates[i].id;
        const RasterImage& img = candidates[i].image;

        // Spatial branch first: its failures decide whether the row skips.
        std::optional<double> s;
        if (seed_stats) {
            if (img.width != seed.width || img.height != seed.height) {
                if (spatial_required) {
                    row.skipped_reason = "dimension-mismatch";
                    rows[i] = std::move(row);
                    return;
                }
            } else {
                try {
                    const auto product = segment_lesion_detail(img, cfg.segmentation);
                    s = spatial_score(*seed_stats,
                                      spatial_stats(product.roi, product.channel));
                } catch (const DomainError&) {
                    if (spatial_required) {
                        row.skipped_reason = "segmentation-failed";
                        rows[i] = std::move(row);
                        return;
                    }
                }
            }
        }
        row.s_raw = s;
        row.c_raw =
            bhattacharyya(seed_dist, normalize_histogram(histogram(to_gray(img))),
                          cfg.bc_form);
        if (seed_frechet) {
            try {
                row.fid = seed_frechet->distance_to(
                    gaussian_stats(patch_embeddings(img, cfg.fid_patch)));
            } catch (const DomainError&) {
            }
        }
        rows[i] = std::move(row);
    });
    return rows;
}

void normalize_and_rank(std::vector<ScoreRow>& rows, const Weights& weights,
                        NormalizationCohort cohort) {
    std::map<std::string, std::vector<std::size_t>> groups;
    if (cohort == NormalizationCohort::Global) {
        auto& all = groups[""];
        for (std::size_t i = 0; i < rows.size(); ++i) all.push_back(i);
    } else {
        for (std::size_t i = 0; i < rows.size(); ++i)
            groups[rows[i].seed_id].push_back(i);
    }

    auto normalize_column = [&](const std::vector<std::size_t>& group,
                                std::optional<double> ScoreRow::*raw,
                                std::optional<double> ScoreRow::*norm) {
        std::vector<std::size_t> present;
        std::vector<double> values;
        for (std::size_t i : group) {
            if (rows[i].skipped() || !(rows[i].*raw)) continue;
            present.push_back(i);
            values.push_back(*(rows[i].*raw));
        }
        if (values.empty()) return;
        const auto normalized = min_max_normalize(values);
        for (std::size_t j = 0; j < present.size(); ++j)
            rows[present[j]].*norm = normalized[j];
    };

    for (const auto& [key, group] : groups) {
        normalize_column(group, &ScoreRow::c_raw, &ScoreRow::c_norm);
        normalize_column(group, &ScoreRow::s_raw, &ScoreRow::s_norm);

        // Weighted combination, then the final min-max of the combined column.
        std::vector<std::size_t> present;
        std::vector<double> combined_pre;
        for (std::size_t i : group) {
            if (rows[i].skipped() || !rows[i].c_norm) continue;
            const double c = *rows[i].c_norm;
            const double s_term = rows[i].s_norm ? weights.w2 * *rows[i].s_norm : 0.0;
            present.push_back(i);
            combined_pre.push_back(weights.w1 * c + s_term);
        }
        if (present.empty()) continue;
        const auto finalized = min_max_normalize(combined_pre);
        for (std::size_t j = 0; j < present.size(); ++j)
            rows[present[j]].combined = finalized[j];
    }

    // Ranks are always per seed cohort, ascending combined, ties by id.
    std::map<std::string, std::vector<std::size_t>> cohorts;
    for (std::size_t i = 0; i < rows.size(); ++i)
        if (!rows[i].skipped() && rows[i].combined)
            cohorts[rows[i].seed_id].push_back(i);
    for (auto& [seed, members] : cohorts) {
        std::stable_sort(members.begin(), members.end(),
                         [&](std::size_t a, std::size_t b) {
                             if (*rows[a].combined != *rows[b].combined)
                                 return *rows[a].combined < *rows[b].combined;
                             return rows[a].candidate_id < rows[b].candidate_id;
                         });
        for (std::size_t r = 0; r < members.size(); ++r)
            rows[members[r]].rank = r + 1;
    }
}

std::vector<ScoreRow> score_candidates(const std::string& seed_id,
                                       const RasterImage& seed,
                                       const std::vector<Candidate>& candidates,
                                       const PipelineConfig& cfg) {
    auto rows = score_candidates_raw(seed_id, seed, candidates, cfg);
    normalize_and_rank(rows, cfg.weights, cfg.cohort);
    return rows;
}

SelectionManifest select_candidates(const std::vector<ScoreRow>& rows,
                                    MetricMode mode, std::size_t per_seed_select,
                                    std::uint64_t rng_seed,
                                    const PipelineConfig& cfg) {
    std::map<std::string, std::vector<const ScoreRow*>> cohorts;
    for (const auto& row : rows) cohorts[row.seed_id].push_back(&row);

    SelectionManifest manifest;
    manifest.config_fingerprint = config_fingerprint(cfg);
    manifest.metric_mode = mode;
    manifest.weights = cfg.weights;

    for (const auto& [seed_id, cohort] : cohorts) {
        std::vector<const ScoreRow*> eligible;
        for (const ScoreRow* row : cohort) {
            if (row->skipped()) continue;
            if (mode == MetricMode::ContentSpace && !row->combined) continue;
            if ((mode == MetricMode::FidBottom || mode == MetricMode::FidTop) &&
                !row->fid)
                continue;
            eligible.push_back(row);
        }
        if (eligible.size() < per_seed_select)
            throw CohortTooSmall("cohort " + seed_id + " has " +
                                 std::to_string(eligible.size()) +
                                 " eligible rows, need " +
                                 std::to_string(per_seed_select));

        std::stable_sort(eligible.begin(), eligible.end(),
                         [](const ScoreRow* a, const ScoreRow* b) {
                             return a->candidate_id < b->candidate_id;
                         });

        std::vector<std::string> chosen;
        if (mode == MetricMode::Random) {
            Rng rng(rng_seed ^ fnv1a64("select:" + seed_id));
            for (std::size_t pick :
                 rng.sample_indices(eligible.size(), per_seed_select))
                chosen.push_back(eligible[pick]->candidate_id);
        } else {
            auto key = [&](const ScoreRow* row) {
                return mode == MetricMode::ContentSpace ? *row->combined : *row->fid;
            };
            std::stable_sort(eligible.begin(), eligible.end(),
                             [&](const ScoreRow* a, const ScoreRow* b) {
                                 const double ka = key(a), kb = key(b);
                                 if (ka != kb)
                                     return mode == MetricMode::FidTop ? ka > kb
                                                                       : ka < kb;
                                 return a->candidate_id < b->candidate_id;
                             });
            for (std::size_t i = 0; i < per_seed_select; ++i)
                chosen.push_back(eligible[i]->candidate_id);
        }
        manifest.total_selected += chosen.size();
        manifest.selections.emplace_back(seed_id, std::move(chosen));
    }
    return manifest;
}

void emit_manifest(const SelectionManifest& manifest,
                   const std::filesystem::path& path) {
    nlohmann::ordered_json j;
    j["schema_version"] = manifest.schema_version;
    j["config_fingerprint"] = manifest.config_fingerprint;
    j["metric_mode"] = to_string(manifest.metric_mode);
    j["weights"] = {{"w1", manifest.weights.w1}, {"w2", manifest.weights.w2}};
    j["fid_estimator"] = manifest.fid_estimator;
    j["total_selected"] = manifest.total_selected;
    auto& selections = j["selections"] = nlohmann::ordered_json::array();
    for (const auto& [seed_id, candidates] : manifest.selections) {
        nlohmann::ordered_json entry;
        entry["seed_id"] = seed_id;
        entry["candidates"] = candidates;
        selections.push_back(std::move(entry));
    }

    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write manifest: " + path.string());
    out << j.dump(2) << "\n";
}

SelectionManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open manifest: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("manifest parse failed: " + std::string(e.what()));
    }

    SelectionManifest manifest;
    try {
        const int version = j.at("schema_version").get<int>();
        if (version != manifest.schema_version)
            throw SchemaVersionMismatch("manifest schema_version " +
                                        std::to_string(version) + ", expected " +
                                        std::to_string(manifest.schema_version));
        manifest.config_fingerprint = j.at("config_fingerprint").get<std::string>();
        manifest.metric_mode =
            metric_mode_from_string(j.at("metric_mode").get<std::string>());
        manifest.weights = Weights(j.at("weights").at("w1").get<double>(),
                                   j.at("weights").at("w2").get<double>());
        manifest.fid_estimator = j.at("fid_estimator").get<std::string>();
        manifest.total_selected = j.at("total_selected").get<std::size_t>();
        for (const auto& entry : j.at("selections")) {
            manifest.selections.emplace_back(
                entry.at("seed_id").get<std::string>(),
                entry.at("candidates").get<std::vector<std::string>>());
        }
    } catch (const nlohmann::json::exception& e) {
        throw InputError("manifest fields invalid: " + std::string(e.what()));
    }
    return manifest;
}

void write_score_csv(const std::vector<ScoreRow>& rows,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write score CSV: " + path.string());
    out << "seed_id,candidate_id,c_raw,s_raw,c_norm,s_norm,combined,fid,rank,"
           "skipped_reason\n";
    auto opt = [](const std::optional<double>& v) {
        return v ? fmt_double(*v) : std::string();
    };
    for (const auto& row : rows) {
        out << row.seed_id << ',' << row.candidate_id << ',' << opt(row.c_raw) << ','
            << opt(row.s_raw) << ',' << opt(row.c_norm) << ',' << opt(row.s_norm)
            << ',' << opt(row.combined) << ',' << opt(row.fid) << ','
            << (row.rank ? std::to_string(*row.rank) : std::string()) << ','
            << row.skipped_reason << "\n";
    }
}

std::vector<ScoreRow> read_score_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open score CSV: " + path.string());
    std::string line;
    if (!std::getline(in, line))
        throw NoRecords("score CSV is empty: " + path.string());
    static const char* kHeader =
        "seed_id,candidate_id,c_raw,s_raw,c_norm,s_norm,combined,fid,rank,"
        "skipped_reason";
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kHeader)
        throw CsvParseError("score CSV has unexpected header: " + path.string());

    auto parse_opt = [](const std::string& field,
                        std::size_t line_no) -> std::optional<double> {
        if (field.empty()) return std::nullopt;
        char* end = nullptr;
        const double v = std::strtod(field.c_str(), &end);
        if (end == field.c_str() || *end != '\0')
            throw CsvParseError("score CSV line " + std::to_string(line_no) +
                                ": bad number `" + field + "`");
        return v;
    };

    std::vector<ScoreRow> rows;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != 10)
            throw CsvParseError("score CSV line " + std::to_string(line_no) +
                                ": expected 10 fields, got " +
                                std::to_string(fields.size()));
        ScoreRow row;
        row.seed_id = fields[0];
        row.candidate_id = fields[1];
        row.c_raw = parse_opt(fields[2], line_no);
        row.s_raw = parse_opt(fields[3], line_no);
        row.c_norm = parse_opt(fields[4], line_no);
        row.s_norm = parse_opt(fields[5], line_no);
        row.combined = parse_opt(fields[6], line_no);
        row.fid = parse_opt(fields[7], line_no);
        if (!fields[8].empty())
            row.rank = static_cast<std::size_t>(std::strtoull(fields[8].c_str(),
                                                              nullptr, 10));
        row.skipped_reason = fields[9];
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw NoRecords("score CSV has no rows: " + path.string());
    return rows;
}

std::vector<Candidate> load_candidates_dir(const std::filesystem::path& dir) {
    if (!std::filesystem::is_directory(dir))
        throw IoError("not a directory: " + dir.string());
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (!entry.is_regular_file()) continue;
        auto ext = entry.path().extension().string();
        std::transform(ext.begin(), ext.end(), ext.begin(),
                       [](unsigned char c) { return std::tolower(c); });
        if (ext == ".png" || ext == ".jpg" || ext == ".jpeg")
            files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    if (files.empty())
        throw NoRecords("no PNG/JPEG candidates in: " + dir.string());

    std::vector<Candidate> out;
    out.reserve(files.size());
    for (const auto& file : files)
        out.push_back({file.stem().string(), load_image(file)});
    return out;
}

} // namespace curator
