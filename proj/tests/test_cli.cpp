// Integration tests for the curator binary: exit codes, output shape, and
// byte-level determinism. The binary path comes from CURATOR_CLI_PATH.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "curator/codec.hpp"
#include "curator/pipeline.hpp"

#include "testutil.hpp"

#include <cstdlib>
#include <fstream>
#include <sstream>

#include <sys/wait.h>

namespace {

struct RunResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

RunResult run_cli(const std::string& args, const std::filesystem::path& scratch) {
    const auto out_path = scratch / "stdout.txt";
    const auto err_path = scratch / "stderr.txt";
    const std::string cmd = std::string(CURATOR_CLI_PATH) + " " + args + " > " +
                            out_path.string() + " 2> " + err_path.string();
    const int status = std::system(cmd.c_str());
    RunResult result;
    result.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    result.out = slurp(out_path);
    result.err = slurp(err_path);
    return result;
}

// One shared fixture tree: a small two-class dataset plus candidate frames.
struct CliFixture {
    testutil::TempDir tmp{"cli"};
    std::filesystem::path images;
    std::filesystem::path cands;
    std::filesystem::path metadata;

    CliFixture() {
        images = tmp.path() / "images";
        cands = tmp.path() / "cands";
        std::filesystem::create_directories(images);
        std::filesystem::create_directories(cands);

        std::ofstream meta(metadata = tmp.path() / "meta.csv");
        meta << "lesion_id,image_id,dx\n";
        for (int i = 0; i < 6; ++i) {
            const std::string id = "df" + std::to_string(i);
            curator::save_png(
                testutil::lesion_image(64, 64, 20.0 + 4 * i, 30, 8.0 + i),
                images / (id + ".png"));
            meta << "x," << id << ",df\n";
        }
        for (int i = 0; i < 4; ++i) {
            const std::string id = "nv" + std::to_string(i);
            curator::save_png(testutil::lesion_image(64, 64, 32, 32, 12),
                              images / (id + ".png"));
            meta << "x," << id << ",nv\n";
        }

        curator::Rng rng(5);
        for (int i = 0; i < 12; ++i) {
            char name[24];
            std::snprintf(name, sizeof(name), "gen%02d.png", i);
            curator::RasterImage img = testutil::lesion_image(
                64, 64, 30 + rng.next_double() * 4, 30 + rng.next_double() * 4, 10);
            testutil::add_noise(img, rng, 1.5);
            curator::save_png(img, cands / name);
        }
    }
};

} // namespace

TEST_CASE("cli: help and unknown flags") {
    testutil::TempDir tmp("clirun");
    CHECK(run_cli("--help", tmp.path()).exit_code == 0);
    CHECK(run_cli("stats --help", tmp.path()).exit_code == 0);
    CHECK(run_cli("stats --no-such-flag", tmp.path()).exit_code == 2);
    CHECK(run_cli("nosuchcommand", tmp.path()).exit_code == 2);
}

TEST_CASE("cli: stats prints descending class counts and the fingerprint") {
    CliFixture fx;
    const auto result = run_cli("stats --metadata " + fx.metadata.string() +
                                    " --images " + fx.images.string(),
                                fx.tmp.path());
    CHECK(result.exit_code == 0);
    CHECK(result.out == "df\t6\nnv\t4\n");
    CHECK(result.err.find("config-fingerprint: ") != std::string::npos);
}

TEST_CASE("cli: stats exit 2 on CSV problems") {
    CliFixture fx;
    const auto empty_csv = fx.tmp.path() / "empty.csv";
    std::ofstream(empty_csv) << "";
    CHECK(run_cli("stats --metadata " + empty_csv.string() + " --images " +
                      fx.images.string(),
                  fx.tmp.path())
              .exit_code == 2);
    CHECK(run_cli("stats --metadata " + (fx.tmp.path() / "nope.csv").string() +
                      " --images " + fx.images.string(),
                  fx.tmp.path())
              .exit_code == 2);
}

TEST_CASE("cli: seeds is deterministic and honors --out") {
    CliFixture fx;
    const std::string args = "seeds --metadata " + fx.metadata.string() +
                             " --images " + fx.images.string() +
                             " --class df --k 3 --mode diverse-exact --seed 0" +
                             " --out " + (fx.tmp.path() / "seeds.txt").string();
    const auto first = run_cli(args, fx.tmp.path());
    const auto second = run_cli(args, fx.tmp.path());
    CHECK(first.exit_code == 0);
    CHECK(first.out == second.out);
    CHECK(slurp(fx.tmp.path() / "seeds.txt") == first.out);

    std::size_t lines = 0;
    for (char c : first.out)
        if (c == '\n') ++lines;
    CHECK(lines == 3);

    CHECK(run_cli("seeds --metadata " + fx.metadata.string() + " --images " +
                      fx.images.string() + " --class df --k 99",
                  fx.tmp.path())
              .exit_code == 3); // ClassTooSmall is a domain error
}

TEST_CASE("cli: score + select round trip, byte-identical across --jobs") {
    CliFixture fx;
    const std::string base = "score --seed-image " +
                             (fx.images / "df0.png").string() +
                             " --candidates-dir " + fx.cands.string() +
                             " --w1 0 --w2 1 --fid-patch 16";
    const auto j1 =
        run_cli(base + " --jobs 1 --out " + (fx.tmp.path() / "s1.csv").string(),
                fx.tmp.path());
    const auto j8 =
        run_cli(base + " --jobs 8 --out " + (fx.tmp.path() / "s8.csv").string(),
                fx.tmp.path());
    CHECK(j1.exit_code == 0);
    CHECK(j8.exit_code == 0);
    const std::string csv1 = slurp(fx.tmp.path() / "s1.csv");
    CHECK(csv1 == slurp(fx.tmp.path() / "s8.csv"));
    CHECK(!csv1.empty());

    const auto sel = run_cli("select --scores " + (fx.tmp.path() / "s1.csv").string() +
                                 " --mode content-space --k 5 --out " +
                                 (fx.tmp.path() / "m.json").string(),
                             fx.tmp.path());
    CHECK(sel.exit_code == 0);
    const auto manifest = curator::load_manifest(fx.tmp.path() / "m.json");
    CHECK(manifest.total_selected == 5);

    // identical invocation rewrites identical bytes
    run_cli("select --scores " + (fx.tmp.path() / "s1.csv").string() +
                " --mode content-space --k 5 --out " +
                (fx.tmp.path() / "m2.json").string(),
            fx.tmp.path());
    CHECK(slurp(fx.tmp.path() / "m.json") == slurp(fx.tmp.path() / "m2.json"));
}

TEST_CASE("cli: score exits 3 when the seed cannot segment and w2 > 0") {
    CliFixture fx;
    const auto flat = fx.tmp.path() / "flat.png";
    curator::save_png(testutil::solid_rgb(64, 64, 120, 120, 120), flat);
    const auto result = run_cli("score --seed-image " + flat.string() +
                                    " --candidates-dir " + fx.cands.string() +
                                    " --w1 0 --w2 1",
                                fx.tmp.path());
    CHECK(result.exit_code == 3);

    // content-only weights proceed
    const auto ok = run_cli("score --seed-image " + flat.string() +
                                " --candidates-dir " + fx.cands.string() +
                                " --w1 1 --w2 0 --out " +
                                (fx.tmp.path() / "flat.csv").string(),
                            fx.tmp.path());
    CHECK(ok.exit_code == 0);
}

TEST_CASE("cli: fid prints a 6-decimal scalar") {
    CliFixture fx;
    const auto result = run_cli("fid --real-dir " + fx.images.string() +
                                    " --gen-dir " + fx.cands.string() + " --side 4",
                                fx.tmp.path());
    CHECK(result.exit_code == 0);
    double value = -1;
    CHECK(std::sscanf(result.out.c_str(), "%lf", &value) == 1);
    CHECK(value >= 0.0);
    CHECK(result.out.find('.') != std::string::npos);

    // same set against itself is zero
    const auto self = run_cli("fid --real-dir " + fx.images.string() +
                                  " --gen-dir " + fx.images.string() + " --side 4",
                              fx.tmp.path());
    CHECK(self.out.substr(0, 8) == "0.000000");
}

TEST_CASE("cli: segment writes outputs and a stats line") {
    CliFixture fx;
    const auto prefix = fx.tmp.path() / "seg";
    const auto result = run_cli("segment --image " + (fx.images / "df1.png").string() +
                                    " --out-prefix " + prefix.string() + " --debug",
                                fx.tmp.path());
    CHECK(result.exit_code == 0);
    double cx, cy, scalar, sigma;
    REQUIRE(std::sscanf(result.out.c_str(), "%lf %lf %lf %lf", &cx, &cy, &scalar,
                        &sigma) == 4);
    CHECK(cx == doctest::Approx(24.0).epsilon(0.05)); // disk planted at (24, 30)
    CHECK(cy == doctest::Approx(30.0).epsilon(0.05));
    CHECK(scalar == doctest::Approx((cx + cy) / 2).epsilon(1e-9));
    CHECK(std::filesystem::exists(prefix.string() + ".mask.png"));
    CHECK(std::filesystem::exists(prefix.string() + ".roi.png"));
    CHECK(std::filesystem::exists(prefix.string() + ".denoised.png"));

    const auto missing = run_cli("segment --image /nope.png --out-prefix x",
                                 fx.tmp.path());
    CHECK(missing.exit_code == 2);
}
