#include <cstdio>
#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "oracles.hpp"
#include "ringloc/map_store.hpp"
#include "ringloc/synthetic.hpp"

using namespace ringloc;
namespace fs = std::filesystem;

namespace {

PipelineConfig tiny_config() {
    PipelineConfig cfg;
    cfg.grid.side_cells = 32;
    cfg.grid.cell_size_m = 1.0;
    cfg.grid.z_min_m = 0.3;
    cfg.grid.z_max_m = 8.0;
    cfg.grid.n_z_channels = 4;
    cfg.bank_seed = 3;
    return cfg;
}

std::vector<std::pair<PointCloud, Pose2>> line_observations(const std::vector<double>& xs) {
    const PointCloud world = generate_world(77, 60.0, 20);
    std::vector<std::pair<PointCloud, Pose2>> obs;
    for (double x : xs) {
        const Pose2 pose(0.0, x, 0.0);
        obs.emplace_back(render_scan(world, pose, 18.0, 0.0, 0.0, 5), pose);
    }
    return obs;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("config fingerprint separates configs") {
    const PipelineConfig a = tiny_config();
    PipelineConfig b = a;
    CHECK(a.fingerprint() == b.fingerprint());
    b.grid.cell_size_m = 0.875;
    CHECK(a.fingerprint() != b.fingerprint());
    PipelineConfig c = a;
    c.bank_seed = 4;
    CHECK(a.fingerprint() != c.fingerprint());
}

TEST_CASE("make_keyframe normalizes both representations") {
    const PipelineConfig cfg = tiny_config();
    const FilterBank bank = FilterBank::seeded(cfg.grid.n_z_channels, cfg.bank_seed);
    const auto obs = line_observations({0.0});
    const Keyframe kf = make_keyframe(0, obs[0].second, obs[0].first, cfg, bank);

    double sn = 0.0, nn = 0.0;
    for (float v : kf.spectrum.data) sn += static_cast<double>(v) * v;
    for (float v : kf.neural.data) nn += static_cast<double>(v) * v;
    CHECK(std::sqrt(sn) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(std::sqrt(nn) == doctest::Approx(1.0).epsilon(1e-5));
    CHECK(kf.spectrum.n_theta == cfg.theta_bins());
    CHECK(kf.spectrum.n_omega == cfg.omega_bins());
}

TEST_CASE("build_map greedy sampling") {
    SUBCASE("line poses at 0, 10, 25, 46 m with interval 20 keep {0, 2, 3}") {
        const auto obs = line_observations({0.0, 10.0, 25.0, 46.0});
        const KeyframeDatabase db = build_map(obs, 20.0, tiny_config());
        REQUIRE(db.size() == 3);
        CHECK(db.keyframes[0].id == 0);
        CHECK(db.keyframes[1].id == 2);
        CHECK(db.keyframes[2].id == 3);
    }

    SUBCASE("tiny interval keeps everything") {
        const auto obs = line_observations({0.0, 1.0, 2.0, 3.0});
        CHECK(build_map(obs, 0.001, tiny_config()).size() == 4);
    }

    SUBCASE("random trajectory matches the greedy-scan oracle") {
        Rng rng(61);
        std::vector<double> xs;
        std::vector<std::pair<double, double>> xy;
        double x = 0.0;
        for (int i = 0; i < 20; ++i) {
            xs.push_back(x);
            xy.emplace_back(x, 0.0);
            x += rng.uniform(0.0, 15.0);
        }
        const auto obs = line_observations(xs);
        const KeyframeDatabase db = build_map(obs, 12.0, tiny_config());
        const std::vector<std::size_t> want = oracles::greedy_scan(xy, 12.0);
        REQUIRE(db.size() == want.size());
        for (std::size_t k = 0; k < want.size(); ++k)
            CHECK(db.keyframes[k].id == static_cast<int>(want[k]));
        // consecutive kept keyframes are at least interval apart
        for (std::size_t k = 1; k < db.size(); ++k) {
            const auto& a = db.keyframes[k - 1].pose;
            const auto& b = db.keyframes[k].pose;
            CHECK(std::hypot(a.x - b.x, a.y - b.y) >= 12.0);
        }
    }

    SUBCASE("empty observations are rejected") {
        CHECK_THROWS_AS((void)build_map({}, 10.0, tiny_config()), std::invalid_argument);
    }
}

TEST_CASE("map persistence") {
    const fs::path dir = fs::temp_directory_path() / "ringloc_map_io";
    fs::create_directories(dir);
    const auto obs = line_observations({0.0, 15.0, 30.0, 45.0, 60.0});
    const KeyframeDatabase db = build_map(obs, 10.0, tiny_config());
    const std::string path = (dir / "map.bin").string();
    save_map(db, path);

    SUBCASE("round-trip is bit-exact") {
        const KeyframeDatabase back = load_map(path);
        CHECK(back.fingerprint == db.fingerprint);
        REQUIRE(back.size() == db.size());
        for (std::size_t k = 0; k < db.size(); ++k) {
            CHECK(back.keyframes[k].id == db.keyframes[k].id);
            CHECK(back.keyframes[k].pose.theta == db.keyframes[k].pose.theta);
            CHECK(back.keyframes[k].pose.x == db.keyframes[k].pose.x);
            CHECK(back.keyframes[k].bev.data == db.keyframes[k].bev.data);
            CHECK(back.keyframes[k].spectrum.data == db.keyframes[k].spectrum.data);
            CHECK(back.keyframes[k].neural.data == db.keyframes[k].neural.data);
        }
    }

    SUBCASE("resaving a loaded map reproduces identical bytes") {
        const std::string path2 = (dir / "map2.bin").string();
        save_map(load_map(path), path2);
        CHECK(slurp(path) == slurp(path2));
    }

    SUBCASE("wrong magic is a format error") {
        std::string bytes = slurp(path);
        bytes[0] = 'X';
        const std::string bad = (dir / "bad_magic.bin").string();
        std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS((void)load_map(bad), MapFormatError);
    }

    SUBCASE("unsupported version is a version error") {
        std::string bytes = slurp(path);
        bytes[8] = 9;  // version field follows the 8-byte magic
        const std::string bad = (dir / "bad_version.bin").string();
        std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS((void)load_map(bad), MapVersionError);
    }

    SUBCASE("corrupted config breaks the fingerprint") {
        std::string bytes = slurp(path);
        bytes[20] ^= 0x01;  // inside the stored config block
        const std::string bad = (dir / "bad_config.bin").string();
        std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size());
        CHECK_THROWS_AS((void)load_map(bad), MapFingerprintError);
    }

    SUBCASE("truncation mid-keyframe is a truncation error") {
        const std::string bytes = slurp(path);
        const std::string bad = (dir / "truncated.bin").string();
        std::ofstream(bad, std::ios::binary).write(bytes.data(), bytes.size() * 2 / 3);
        CHECK_THROWS_AS((void)load_map(bad), MapTruncatedError);
    }
}

TEST_CASE("build_map output is independent of the thread count") {
    const fs::path dir = fs::temp_directory_path() / "ringloc_map_threads";
    fs::create_directories(dir);
    const auto obs = line_observations({0.0, 12.0, 24.0, 36.0, 48.0, 60.0});
    const std::string p1 = (dir / "t1.bin").string();
    const std::string p4 = (dir / "t4.bin").string();
    save_map(build_map(obs, 10.0, tiny_config(), 1), p1);
    save_map(build_map(obs, 10.0, tiny_config(), 4), p4);
    CHECK(slurp(p1) == slurp(p4));
}

TEST_CASE("nearest_keyframe") {
    const auto obs = line_observations({0.0, 10.0, 20.0});
    const KeyframeDatabase db = build_map(obs, 5.0, tiny_config());

    SUBCASE("exact pose match") {
        const auto [id, d] = nearest_keyframe(db, Pose2(0.0, 10.0, 0.0));
        CHECK(id == 1);
        CHECK(d == doctest::Approx(0.0));
    }

    SUBCASE("equidistant queries break ties to the smaller id") {
        const auto [id, d] = nearest_keyframe(db, Pose2(0.0, 15.0, 0.0));
        CHECK(id == 1);
        CHECK(d == doctest::Approx(5.0));
    }

    SUBCASE("random queries match a linear scan") {
        Rng rng(62);
        for (int trial = 0; trial < 20; ++trial) {
            const Pose2 q(0.0, rng.uniform(-5.0, 25.0), rng.uniform(-5.0, 5.0));
            int want = -1;
            double want_d = 1e300;
            for (const Keyframe& kf : db.keyframes) {
                const double d = std::hypot(q.x - kf.pose.x, q.y - kf.pose.y);
                if (d < want_d) {
                    want_d = d;
                    want = kf.id;
                }
            }
            const auto [id, d] = nearest_keyframe(db, q);
            CHECK(id == want);
            CHECK(d == doctest::Approx(want_d));
        }
    }
}

TEST_CASE("poses file round-trip") {
    const fs::path dir = fs::temp_directory_path() / "ringloc_poses";
    fs::create_directories(dir);
    const std::string path = (dir / "poses.txt").string();

    std::vector<std::pair<int, Pose2>> poses;
    Rng rng(63);
    for (int i = 0; i < 10; ++i)
        poses.emplace_back(i * 3, Pose2(rng.uniform(0.0, kTwoPi), rng.uniform(-100.0, 100.0),
                                        rng.uniform(-100.0, 100.0)));
    save_poses(poses, path);
    const auto back = load_poses(path);
    REQUIRE(back.size() == poses.size());
    for (std::size_t i = 0; i < poses.size(); ++i) {
        CHECK(back[i].first == poses[i].first);
        CHECK(back[i].second.theta == doctest::Approx(poses[i].second.theta).epsilon(1e-15));
        CHECK(back[i].second.x == doctest::Approx(poses[i].second.x).epsilon(1e-15));
    }

    // comments and blank lines are ignored
    std::ofstream out(path, std::ios::app);
    out << "# trailing comment\n\n";
    out.close();
    CHECK(load_poses(path).size() == poses.size());
}
