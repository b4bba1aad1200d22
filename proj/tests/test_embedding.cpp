#include "curator/codec.hpp"
#include "curator/embedding.hpp"
#include "curator/errors.hpp"

#include "testutil.hpp"

#include <doctest.h>

#include <fstream>

using namespace curator;

TEST_CASE("embeddings CSV round trip") {
    testutil::TempDir tmp("emb");
    EmbeddingMatrix m;
    m.dim = 3;
    m.ids = {"a.png", "b.png"};
    m.data = {0.25, -1.5, 3.0, 1e-9, 42.0, 0.3333333333333333};

    const auto path = tmp.path() / "emb.csv";
    save_embeddings_csv(m, path);
    const EmbeddingMatrix back = load_embeddings_csv(path);
    CHECK(back.ids == m.ids);
    CHECK(back.dim == 3);
    REQUIRE(back.data.size() == m.data.size());
    for (std::size_t i = 0; i < m.data.size(); ++i)
        CHECK(back.data[i] == m.data[i]); // %.17g round-trips doubles exactly
}

TEST_CASE("embeddings CSV parse errors") {
    testutil::TempDir tmp("emb");
    const auto path = tmp.path() / "bad.csv";

    std::ofstream(path) << "";
    CHECK_THROWS_AS(load_embeddings_csv(path), NoRecords);

    std::ofstream(path) << "wrong,v1\nx,1\n";
    CHECK_THROWS_AS(load_embeddings_csv(path), CsvParseError);

    std::ofstream(path) << "filename,v1,v2\nx,1\n";
    CHECK_THROWS_AS(load_embeddings_csv(path), CsvParseError);

    std::ofstream(path) << "filename,v1\nx,notanumber\n";
    CHECK_THROWS_AS(load_embeddings_csv(path), CsvParseError);

    std::ofstream(path) << "filename,v1\n";
    CHECK_THROWS_AS(load_embeddings_csv(path), NoRecords);

    CHECK_THROWS_AS(load_embeddings_csv(tmp.path() / "missing.csv"), IoError);
}

TEST_CASE("patch_embeddings tiles the image") {
    const RasterImage img = testutil::lesion_image(64, 48, 32, 24, 10);
    const EmbeddingMatrix m = patch_embeddings(img, 16);
    CHECK(m.rows() == 4 * 3);
    CHECK(m.dim == 256);
    for (double v : m.data) {
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
    }

    // remainder columns are dropped
    const RasterImage odd = testutil::lesion_image(70, 40, 35, 20, 9);
    CHECK(patch_embeddings(odd, 16).rows() == 4 * 2);

    CHECK_THROWS_AS(patch_embeddings(testutil::solid_rgb(16, 16, 1, 2, 3), 16),
                    TooFewSamples);
}

TEST_CASE("directory_embeddings reads sorted image files") {
    testutil::TempDir tmp("emb");
    save_png(testutil::solid_rgb(8, 8, 10, 10, 10), tmp.path() / "b.png");
    save_png(testutil::solid_rgb(8, 8, 200, 200, 200), tmp.path() / "a.png");
    std::ofstream(tmp.path() / "notes.txt") << "ignored";

    const EmbeddingMatrix m = directory_embeddings(tmp.path(), 4);
    REQUIRE(m.rows() == 2);
    CHECK(m.ids[0] == "a.png");
    CHECK(m.ids[1] == "b.png");
    CHECK(m.dim == 16);
    CHECK(m.row(0)[0] == doctest::Approx(200.0 / 255.0));
    CHECK(m.row(1)[0] == doctest::Approx(10.0 / 255.0));

    CHECK_THROWS_AS(directory_embeddings(tmp.path() / "nodir", 4), IoError);
}
