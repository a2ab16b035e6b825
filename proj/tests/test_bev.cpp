#include <cstdio>
#include <filesystem>

#include "doctest.h"
#include "oracles.hpp"
#include "ringloc/bev.hpp"

using namespace ringloc;

TEST_CASE("remove_ground") {
    SUBCASE("threshold is strict") {
        PointCloud cloud;
        cloud.points.push_back({0.f, 0.f, -0.1f});
        cloud.points.push_back({0.f, 0.f, 1.0f});
        const PointCloud out = remove_ground(cloud, 0.0);
        REQUIRE(out.size() == 1);
        CHECK(out.points[0].z == doctest::Approx(1.0));
    }

    SUBCASE("empty input") { CHECK(remove_ground(PointCloud{}, 0.0).empty()); }

    SUBCASE("median-z threshold keeps about half") {
        Rng rng(21);
        PointCloud cloud;
        std::vector<float> zs;
        for (int i = 0; i < 1000; ++i) {
            const float z = static_cast<float>(rng.uniform(0.0, 10.0));
            cloud.points.push_back({0.f, 0.f, z});
            zs.push_back(z);
        }
        std::sort(zs.begin(), zs.end());
        const double median = zs[500];
        const PointCloud out = remove_ground(cloud, median);
        // direct filter oracle
        std::size_t want = 0;
        for (const Point3& p : cloud.points)
            if (p.z > median) ++want;
        CHECK(out.size() == want);
        CHECK(std::llabs(static_cast<long long>(out.size()) - 500) <= 25);
    }
}

TEST_CASE("voxelize_to_bev") {
    GridSpec spec = oracles::small_spec(16);
    spec.z_min_m = 0.0;
    spec.z_max_m = 4.0;
    spec.n_z_channels = 4;

    SUBCASE("single point at origin occupies exactly one cell") {
        PointCloud cloud;
        cloud.points.push_back({0.f, 0.f, 2.0f});
        const BevGrid grid = voxelize_to_bev(cloud, spec);
        double sum = 0.0;
        for (float v : grid.data) sum += v;
        CHECK(sum == doctest::Approx(1.0));
        CHECK(grid.at(8, 8, 2) == doctest::Approx(1.0));
    }

    SUBCASE("empty cloud gives a zero grid") {
        const BevGrid grid = voxelize_to_bev(PointCloud{}, spec);
        CHECK(grid.total_mass() == doctest::Approx(0.0));
    }

    SUBCASE("matches the per-point binning oracle bit-for-bit") {
        Rng rng(22);
        PointCloud cloud;
        for (int i = 0; i < 500; ++i)
            cloud.points.push_back({static_cast<float>(rng.uniform(-10.0, 10.0)),
                                    static_cast<float>(rng.uniform(-10.0, 10.0)),
                                    static_cast<float>(rng.uniform(-1.0, 5.0))});
        const BevGrid grid = voxelize_to_bev(cloud, spec);

        BevGrid want(spec, spec.n_z_channels);
        const double slab = (spec.z_max_m - spec.z_min_m) / spec.n_z_channels;
        for (const Point3& p : cloud.points) {
            const int i = static_cast<int>(std::floor(p.x / spec.cell_size_m)) + spec.side_cells / 2;
            const int j = static_cast<int>(std::floor(p.y / spec.cell_size_m)) + spec.side_cells / 2;
            if (i < 0 || i >= spec.side_cells || j < 0 || j >= spec.side_cells) continue;
            if (p.z < spec.z_min_m || p.z >= spec.z_max_m) continue;
            const int k = static_cast<int>((p.z - spec.z_min_m) / slab);
            want.at(i, j, std::min(k, spec.n_z_channels - 1)) = 1.f;
        }
        CHECK(grid.data == want.data);
    }

    SUBCASE("occupancy is idempotent under cloud duplication") {
        Rng rng(23);
        PointCloud cloud;
        for (int i = 0; i < 200; ++i)
            cloud.points.push_back({static_cast<float>(rng.uniform(-7.0, 7.0)),
                                    static_cast<float>(rng.uniform(-7.0, 7.0)),
                                    static_cast<float>(rng.uniform(0.0, 4.0))});
        PointCloud doubled = cloud;
        doubled.points.insert(doubled.points.end(), cloud.points.begin(), cloud.points.end());
        CHECK(voxelize_to_bev(cloud, spec).data == voxelize_to_bev(doubled, spec).data);
    }
}

TEST_CASE("rotate_grid") {
    SUBCASE("angle zero is the identity") {
        Rng rng(24);
        const BevGrid grid = oracles::random_interior_grid(rng, 32, 8);
        const BevGrid out = rotate_grid(grid, 0.0);
        for (std::size_t i = 0; i < grid.data.size(); ++i)
            CHECK(std::fabs(out.data[i] - grid.data[i]) < 1e-6);
    }

    SUBCASE("quarter turn moves an off-center cell to its rotated position") {
        BevGrid grid(oracles::small_spec(32), 1);
        grid.at(21, 16) = 1.f;  // (5, 0) cells from center
        const BevGrid out = rotate_grid(grid, kTwoPi / 4.0);
        // rotation by +90 deg maps cell offset (5, 0) to (0, 5)
        double sum = 0.0, mass_at_target = 0.0;
        for (int i = 0; i < 32; ++i)
            for (int j = 0; j < 32; ++j) sum += out.at(i, j);
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) mass_at_target += out.at(16 + a, 21 + b);
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
        CHECK(mass_at_target == doctest::Approx(1.0).epsilon(1e-6));
    }

    SUBCASE("rotate then unrotate is near-identity on the interior") {
        Rng rng(25);
        for (int trial = 0; trial < 5; ++trial) {
            const BevGrid grid = oracles::random_interior_grid(rng, 32, 8);
            const double alpha = rng.uniform(0.0, kTwoPi);
            const BevGrid back = rotate_grid(rotate_grid(grid, alpha), -alpha);
            // two bilinear resamplings; interior error stays well below the mass scale
            for (int i = 2; i < 30; ++i)
                for (int j = 2; j < 30; ++j)
                    CHECK(std::fabs(back.at(i, j) - grid.at(i, j)) < 0.1);
        }
    }
}

TEST_CASE("translate_grid") {
    Rng rng(26);
    const BevGrid grid = oracles::random_interior_grid(rng, 32, 8);

    SUBCASE("zero shift is the identity") {
        CHECK(translate_grid(grid, 0, 0).data == grid.data);
    }

    SUBCASE("unit shift moves a one-hot grid by one row") {
        BevGrid hot(oracles::small_spec(8), 1);
        hot.at(3, 4) = 1.f;
        const BevGrid out = translate_grid(hot, 1, 0);
        CHECK(out.at(4, 4) == doctest::Approx(1.0));
        double sum = 0.0;
        for (float v : out.data) sum += v;
        CHECK(sum == doctest::Approx(1.0));
    }

    SUBCASE("shift and unshift is exact on interior support") {
        const BevGrid back = translate_grid(translate_grid(grid, 5, -3), -5, 3);
        CHECK(back.data == grid.data);
    }

    SUBCASE("shifts of at least the grid side are rejected") {
        CHECK_THROWS_AS((void)translate_grid(grid, 32, 0), std::invalid_argument);
        CHECK_THROWS_AS((void)translate_grid(grid, 0, -32), std::invalid_argument);
    }
}

TEST_CASE("cloud file round-trips") {
    namespace fs = std::filesystem;
    const fs::path dir = fs::temp_directory_path() / "ringloc_bev_io";
    fs::create_directories(dir);

    Rng rng(27);
    PointCloud cloud;
    for (int i = 0; i < 100; ++i)
        cloud.points.push_back({static_cast<float>(rng.uniform(-30.0, 30.0)),
                                static_cast<float>(rng.uniform(-30.0, 30.0)),
                                static_cast<float>(rng.uniform(0.0, 8.0))});

    SUBCASE("binary format is bit-exact") {
        const std::string path = (dir / "cloud.bin").string();
        save_cloud(cloud, path);
        const PointCloud back = load_cloud(path);
        REQUIRE(back.size() == cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i) {
            CHECK(back.points[i].x == cloud.points[i].x);
            CHECK(back.points[i].y == cloud.points[i].y);
            CHECK(back.points[i].z == cloud.points[i].z);
        }
    }

    SUBCASE("ascii format round-trips within print precision") {
        const std::string path = (dir / "cloud.xyz").string();
        save_cloud(cloud, path);
        const PointCloud back = load_cloud(path);
        REQUIRE(back.size() == cloud.size());
        for (std::size_t i = 0; i < cloud.size(); ++i)
            CHECK(std::fabs(back.points[i].x - cloud.points[i].x) < 1e-4);
    }
}
