#include "curator/embedding.hpp"

#include "curator/codec.hpp"
#include "curator/diversity.hpp"
#include "curator/errors.hpp"
#include "csv.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>

namespace curator {

EmbeddingMatrix load_embeddings_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open embeddings CSV: " + path.string());

    std::string line;
    if (!std::getline(in, line))
        throw NoRecords("embeddings CSV is empty: " + path.string());
    const auto header = detail::split_csv_line(line);
    if (header.empty() || header[0] != "filename")
        throw CsvParseError("embeddings CSV must start with a `filename` column: " +
                            path.string());
    const std::size_t dim = header.size() - 1;
    if (dim == 0)
        throw CsvParseError("embeddings CSV has no value columns: " + path.string());

    EmbeddingMatrix m;
    m.dim = dim;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != dim + 1)
            throw CsvParseError("embeddings CSV line " + std::to_string(line_no) +
                                ": expected " + std::to_string(dim + 1) +
                                " fields, got " + std::to_string(fields.size()));
        m.ids.push_back(fields[0]);
        for (std::size_t j = 1; j < fields.size(); ++j) {
            char* end = nullptr;
            const double v = std::strtod(fields[j].c_str(), &end);
            if (end == fields[j].c_str() || *end != '\0')
                throw CsvParseError("embeddings CSV line " + std::to_string(line_no) +
                                    ": bad number `" + fields[j] + "`");
            m.data.push_back(v);
        }
    }
    if (m.ids.empty())
        throw NoRecords("embeddings CSV has no data rows: " + path.string());
    return m;
}

void save_embeddings_csv(const EmbeddingMatrix& m, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write embeddings CSV: " + path.string());
    out << "filename";
    for (std::size_t j = 1; j <= m.dim; ++j) out << ",v" << j;
    out << "\n";
    char buf[40];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        out << m.ids[i];
        for (std::size_t j = 0; j < m.dim; ++j) {
            std::snprintf(buf, sizeof(buf), "%.17g", m.row(i)[j]);
            out << ',' << buf;
        }
        out << "\n";
    }
}

EmbeddingMatrix patch_embeddings(const RasterImage& img, int patch) {
    if (patch < 1)
        throw std::invalid_argument("patch_embeddings: patch must be >= 1");
    const GrayPlane gray = to_gray(img);
    const int nx = gray.width / patch;
    const int ny = gray.height / patch;
    if (nx * ny < 2)
        throw TooFewSamples("patch_embeddings: image too small for " +
                            std::to_string(patch) + "x" + std::to_string(patch) +
                            " patches");

    EmbeddingMatrix m;
    m.dim = static_cast<std::size_t>(patch) * static_cast<std::size_t>(patch);
    m.data.reserve(static_cast<std::size_t>(nx) * ny * m.dim);
    for (int by = 0; by < ny; ++by) {
        for (int bx = 0; bx < nx; ++bx) {
            m.ids.push_back("patch_" + std::to_string(bx) + "_" + std::to_string(by));
            for (int y = 0; y < patch; ++y)
                for (int x = 0; x < patch; ++x)
                    m.data.push_back(
                        gray.at(bx * patch + x, by * patch + y) / 255.0);
        }
    }
    return m;
}

EmbeddingMatrix directory_embeddings(const std::filesystem::path& dir, int side) {
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
        throw NoRecords("no PNG/JPEG files in directory: " + dir.string());

    EmbeddingMatrix m;
    m.dim = static_cast<std::size_t>(side) * static_cast<std::size_t>(side);
    for (const auto& file : files) {
        const FeatureVector f = image_feature(load_image(file), side);
        m.ids.push_back(file.filename().string());
        m.data.insert(m.data.end(), f.values.begin(), f.values.end());
    }
    return m;
}

} // namespace curator
