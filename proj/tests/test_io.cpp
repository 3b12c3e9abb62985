#include <catch2/catch_amalgamated.hpp>

#include <complex>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "hankeldoa/array_model.hpp"
#include "hankeldoa/errors.hpp"
#include "hankeldoa/io.hpp"
#include "hankeldoa/leverage.hpp"
#include "support/oracles.hpp"

using namespace hankeldoa;
namespace fs = std::filesystem;
using Catch::Approx;

namespace {

fs::path test_dir() {
    const fs::path dir = fs::temp_directory_path() / "hankeldoa_io_tests";
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_CASE("doubles survive the text round-trip bit for bit", "[io]") {
    for (double x : {0.1, 1.0 / 3.0, -0.0, 1e300, 123456789.123456789, -2.5e-12}) {
        const std::string s = detail::format_double(x);
        const double back = detail::parse_double(s, "test");
        REQUIRE(back == x);
    }
    REQUIRE_THROWS_AS(detail::parse_double("12x", "test"), IoError);
    REQUIRE_THROWS_AS(detail::parse_double("", "test"), IoError);
    REQUIRE_THROWS_AS(detail::parse_long("3.5", "test"), IoError);
}

TEST_CASE("scenes round-trip through JSON", "[io]") {
    SourceScene scene;
    scene.wavelength_ratio = 0.4;
    scene.sources.push_back({-0.31, {1.5, -0.25}});
    scene.sources.push_back({0.1, {0.1, 2.75}});
    const fs::path path = test_dir() / "scene.json";
    write_scene(path, scene);

    const SourceScene back = read_scene(path);
    REQUIRE(back.wavelength_ratio == scene.wavelength_ratio);
    REQUIRE(back.sources.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(back.sources[i].tau == scene.sources[i].tau);
        REQUIRE(back.sources[i].amplitude == scene.sources[i].amplitude);
    }
}

TEST_CASE("scene JSON defaults and failure modes", "[io]") {
    const fs::path path = test_dir() / "scene_minimal.json";
    detail::write_text_file(path,
                            "{\"sources\": [{\"tau\": 0.2, \"amp_re\": 1, \"amp_im\": 0}]}\n");
    const SourceScene scene = read_scene(path);
    REQUIRE(scene.wavelength_ratio == 0.5);

    const fs::path bad = test_dir() / "scene_bad.json";
    detail::write_text_file(bad, "{\"sources\": [{\"tau\": 0.2}]}\n");
    REQUIRE_THROWS_AS(read_scene(bad), IoError);

    detail::write_text_file(bad, "not json at all\n");
    REQUIRE_THROWS_AS(read_scene(bad), IoError);

    detail::write_text_file(bad, "{\"wavelength_ratio\": 0.5}\n");
    REQUIRE_THROWS_AS(read_scene(bad), IoError);

    REQUIRE_THROWS_AS(read_scene(test_dir() / "does_not_exist.json"), IoError);

    // Structurally fine but semantically invalid: duplicate taus.
    detail::write_text_file(bad,
                            "{\"sources\": [{\"tau\": 0.2, \"amp_re\": 1, \"amp_im\": 0},"
                            " {\"tau\": 0.2, \"amp_re\": 2, \"amp_im\": 0}]}\n");
    REQUIRE_THROWS_AS(read_scene(bad), ValidationError);
}

TEST_CASE("full snapshots round-trip", "[io]") {
    const SourceScene scene = testsupport::random_scene(2, 0.05, 3);
    const Snapshot snap = synthesize_snapshot(scene, 9);
    const fs::path path = test_dir() / "snapshot_full.csv";
    write_snapshot(path, snap);

    const Snapshot back = read_snapshot(path);
    REQUIRE(back.n == 9);
    REQUIRE_FALSE(back.mask.has_value());
    for (int k = 0; k < 9; ++k) {
        REQUIRE(back.values(k).real() == snap.values(k).real());
        REQUIRE(back.values(k).imag() == snap.values(k).imag());
    }
}

TEST_CASE("masked snapshots keep their mask and zeros", "[io]") {
    const SourceScene scene = testsupport::random_scene(2, 0.05, 4);
    const Snapshot snap =
        project(synthesize_snapshot(scene, 12), uniform_random_mask(12, 5, 9));
    const fs::path path = test_dir() / "snapshot_masked.csv";
    write_snapshot(path, snap);

    const Snapshot back = read_snapshot(path);
    REQUIRE(back.n == 12);
    REQUIRE(back.mask.has_value());
    REQUIRE(back.mask->omega == snap.mask->omega);
    for (int k = 1; k <= 12; ++k) {
        if (back.mask->contains(k)) {
            REQUIRE(back.values(k - 1) == snap.values(k - 1));
        } else {
            REQUIRE(back.values(k - 1) == std::complex<double>(0.0, 0.0));
        }
    }
}

TEST_CASE("snapshot files are byte-stable across rewrites", "[io]") {
    const SourceScene scene = testsupport::random_scene(3, 0.04, 5);
    const Snapshot snap =
        project(synthesize_snapshot(scene, 15), uniform_random_mask(15, 7, 1));
    const fs::path a = test_dir() / "snapshot_a.csv";
    const fs::path b = test_dir() / "snapshot_b.csv";
    write_snapshot(a, snap);
    write_snapshot(b, snap);
    REQUIRE(detail::read_text_file(a) == detail::read_text_file(b));
}

TEST_CASE("snapshot length falls back to the largest index", "[io]") {
    const fs::path path = test_dir() / "snapshot_legacy.csv";
    detail::write_text_file(path, "index,re,im\n1,1,0\n3,2,0.5\n");
    const Snapshot snap = read_snapshot(path);
    REQUIRE(snap.n == 3);
    REQUIRE(snap.mask.has_value());
    REQUIRE(snap.mask->omega == std::vector<int>{1, 3});
    REQUIRE(snap.values(1) == std::complex<double>(0.0, 0.0));
    REQUIRE(snap.values(2) == std::complex<double>(2.0, 0.5));
}

TEST_CASE("malformed snapshots are rejected", "[io]") {
    const fs::path path = test_dir() / "snapshot_bad.csv";
    detail::write_text_file(path, "wrong,header\n1,2,3\n");
    REQUIRE_THROWS_AS(read_snapshot(path), IoError);

    detail::write_text_file(path, "index,re,im\n1,2\n");
    REQUIRE_THROWS_AS(read_snapshot(path), IoError);

    detail::write_text_file(path, "index,re,im\n1,two,3\n");
    REQUIRE_THROWS_AS(read_snapshot(path), IoError);

    detail::write_text_file(path, "index,re,im\n");
    REQUIRE_THROWS_AS(read_snapshot(path), IoError);

    detail::write_text_file(path, "# n=3\nindex,re,im\n7,1,0\n");
    REQUIRE_THROWS_AS(read_snapshot(path), IoError);

    REQUIRE_THROWS_AS(read_snapshot(test_dir() / "missing.csv"), IoError);
}

TEST_CASE("scores files carry one row per element", "[io]") {
    LeverageScores scores;
    scores.n = 3;
    scores.rank_used = 1;
    scores.mu = Eigen::VectorXd(3);
    scores.mu << 0.5, 1.25, 0.75;
    const fs::path path = test_dir() / "scores.csv";
    write_scores(path, scores);
    REQUIRE(detail::read_text_file(path) == "index,mu\n1,0.5\n2,1.25\n3,0.75\n");
}

TEST_CASE("plans round-trip with mode and forced flags", "[io]") {
    Snapshot snap;
    snap.n = 9;
    snap.values = Eigen::VectorXcd::Ones(9);
    const LeverageScores scores = leverage_scores(snap, HankelShape::square(9));
    const SamplingPlan plan = select_elements(scores, 5, SelectionMode::top_m);

    const fs::path path = test_dir() / "plan.csv";
    write_plan(path, plan);
    const PlanFile back = read_plan(path);
    REQUIRE(back.mode == "leverage-top-m");
    REQUIRE(back.mask.n == 9);
    REQUIRE(back.mask.omega == plan.mask.omega);
    REQUIRE(back.forced == plan.forced);
}

TEST_CASE("plan files reject a bad header", "[io]") {
    const fs::path path = test_dir() / "plan_bad.csv";
    detail::write_text_file(path, "index,chosen\n1,1\n");
    REQUIRE_THROWS_AS(read_plan(path), IoError);
}

TEST_CASE("estimates round-trip bit for bit", "[io]") {
    DoaEstimate est;
    est.sources.push_back({-0.3123456789012345, {1.0 / 3.0, -2e-15}, false});
    est.sources.push_back({0.1, {0.1, 0.2}, false});
    const fs::path path = test_dir() / "estimates.csv";
    write_estimates(path, est);

    const DoaEstimate back = read_estimates(path);
    REQUIRE(back.sources.size() == 2);
    for (std::size_t i = 0; i < 2; ++i) {
        REQUIRE(back.sources[i].tau_hat == est.sources[i].tau_hat);
        REQUIRE(back.sources[i].amplitude_hat == est.sources[i].amplitude_hat);
    }

    detail::write_text_file(path, "tau,amp\n0.1,1\n");
    REQUIRE_THROWS_AS(read_estimates(path), IoError);
}

TEST_CASE("detection reports serialize to JSON", "[io]") {
    DetectionReport report;
    report.matches.push_back({0, 1, 0.001});
    report.missed = {2};
    report.false_positives = {0};
    report.all_detected = false;

    const fs::path path = test_dir() / "report.json";
    write_report(path, report);
    const nlohmann::json j = nlohmann::json::parse(detail::read_text_file(path));
    REQUIRE(j["all_detected"] == false);
    REQUIRE(j["matches"].size() == 1);
    REQUIRE(j["matches"][0]["true_index"] == 0);
    REQUIRE(j["matches"][0]["estimate_index"] == 1);
    REQUIRE(j["matches"][0]["sin_error"] == Approx(0.001));
    REQUIRE(j["missed"] == nlohmann::json::array({2}));
    REQUIRE(j["false_positives"] == nlohmann::json::array({0}));
}
