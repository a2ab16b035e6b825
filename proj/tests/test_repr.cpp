#include "doctest.h"
#include "oracles.hpp"
#include "ringloc/repr.hpp"

using namespace ringloc;

TEST_CASE("radon_transform") {
    SUBCASE("zero grid gives a zero sinogram") {
        const BevGrid grid(oracles::small_spec(32), 1);
        const Sinogram sino = radon_transform(grid);
        for (float v : sino.data) CHECK(v == 0.f);
    }

    SUBCASE("center impulse concentrates every row at tau = 0") {
        BevGrid grid(oracles::small_spec(32), 1);
        grid.at(16, 16) = 1.f;
        const Sinogram sino = radon_transform(grid);
        for (int t = 0; t < sino.n_theta; ++t) {
            int argmax = 0;
            for (int tau = 1; tau < sino.n_tau; ++tau)
                if (sino.at(t, tau) > sino.at(t, argmax)) argmax = tau;
            CHECK(std::abs(argmax - 16) <= 1);
        }
    }

    SUBCASE("off-center impulse traces tau(theta) = r cos(theta)") {
        const int n = 64, r = 12;
        BevGrid grid(oracles::small_spec(n), 1);
        grid.at(n / 2 + r, n / 2) = 1.f;
        const Sinogram sino = radon_transform(grid);
        for (int t = 0; t < sino.n_theta; ++t) {
            int argmax = 0;
            for (int tau = 1; tau < sino.n_tau; ++tau)
                if (sino.at(t, tau) > sino.at(t, argmax)) argmax = tau;
            const double want = n / 2.0 + r * std::cos(kTwoPi * t / sino.n_theta);
            // bilinear spreading can nudge the argmax by one extra bin
            CHECK(std::fabs(argmax + 0.5 - want) <= 1.5);
        }
    }

    SUBCASE("sinogram scales with cell size") {
        Rng rng(31);
        BevGrid grid = oracles::random_interior_grid(rng, 32, 8);
        const Sinogram unit = radon_transform(grid);
        grid.spec.cell_size_m = 2.0;
        const Sinogram doubled = radon_transform(grid);
        for (std::size_t i = 0; i < unit.data.size(); ++i)
            CHECK(doubled.data[i] == doctest::Approx(2.f * unit.data[i]).epsilon(1e-5));
    }
}

TEST_CASE("polar_transform") {
    SUBCASE("zero grid gives a zero polar grid") {
        const PolarGrid polar = polar_transform(BevGrid(oracles::small_spec(32), 1));
        for (float v : polar.data) CHECK(v == 0.f);
    }

    SUBCASE("center impulse lives in the smallest radii only") {
        BevGrid grid(oracles::small_spec(32), 1);
        grid.at(16, 16) = 1.f;
        const PolarGrid polar = polar_transform(grid);
        for (int t = 0; t < polar.n_theta; ++t)
            for (int kr = 2; kr < polar.n_r; ++kr) CHECK(polar.at(t, kr) == 0.f);
    }

    SUBCASE("bin-aligned rotation is a circular row shift") {
        Rng rng(32);
        const int n = 64;
        const BevGrid grid = oracles::random_interior_grid(rng, n, 16);
        const int m = 7;
        const PolarGrid base = polar_transform(grid);
        const PolarGrid rot = polar_transform(rotate_grid(grid, kTwoPi * m / n));
        for (int t = 0; t < n; ++t)
            for (int kr = 0; kr < base.n_r; ++kr)
                CHECK(std::fabs(rot.at(t, kr) - base.at(((t - m) % n + n) % n, kr)) < 0.08);
    }
}

TEST_CASE("aggregate_channels") {
    SUBCASE("uniform weights and identity kernel on equal channels reproduce one channel") {
        Rng rng(33);
        Sinogram sino(8, 16, 3);
        for (int t = 0; t < 8; ++t)
            for (int tau = 0; tau < 16; ++tau) {
                const float v = static_cast<float>(rng.uniform());
                for (int c = 0; c < 3; ++c) sino.at(t, tau, c) = v;
            }
        const Sinogram out = aggregate_channels(sino, FilterBank::identity(3));
        for (int t = 0; t < 8; ++t)
            for (int tau = 0; tau < 16; ++tau)
                CHECK(out.at(t, tau) == doctest::Approx(sino.at(t, tau, 0)).epsilon(1e-6));
    }

    SUBCASE("one-hot weights select a channel") {
        Rng rng(34);
        Sinogram sino(8, 16, 3);
        for (float& v : sino.data) v = static_cast<float>(rng.uniform());
        FilterBank bank = FilterBank::identity(3);
        bank.weights = {0.f, 1.f, 0.f};
        const Sinogram out = aggregate_channels(sino, bank);
        for (int t = 0; t < 8; ++t)
            for (int tau = 0; tau < 16; ++tau)
                CHECK(out.at(t, tau) == doctest::Approx(sino.at(t, tau, 1)).epsilon(1e-6));
    }

    SUBCASE("circular theta shift commutes with aggregation") {
        Rng rng(35);
        Sinogram sino(16, 12, 2);
        for (float& v : sino.data) v = static_cast<float>(rng.uniform());
        const FilterBank bank = FilterBank::seeded(2, 99);
        const int shift = 5;

        Sinogram shifted(16, 12, 2);
        for (int t = 0; t < 16; ++t)
            for (int tau = 0; tau < 12; ++tau)
                for (int c = 0; c < 2; ++c)
                    shifted.at((t + shift) % 16, tau, c) = sino.at(t, tau, c);

        const Sinogram a = aggregate_channels(shifted, bank);
        const Sinogram b = aggregate_channels(sino, bank);
        for (int t = 0; t < 16; ++t)
            for (int tau = 0; tau < 12; ++tau)
                CHECK(std::fabs(a.at((t + shift) % 16, tau) - b.at(t, tau)) < 1e-6);
    }

    SUBCASE("channel mismatch is rejected") {
        const Sinogram sino(8, 16, 3);
        CHECK_THROWS_AS((void)aggregate_channels(sino, FilterBank::identity(2)),
                        std::invalid_argument);
    }
}

TEST_CASE("magnitude_spectrum") {
    SUBCASE("zero sinogram gives a zero spectrum") {
        const Spectrum spec = magnitude_spectrum(Sinogram(8, 32, 1));
        for (float v : spec.data) CHECK(v == 0.f);
    }

    SUBCASE("pure cosine row lights exactly one bin") {
        const int n_tau = 32, k = 3;
        Sinogram sino(2, n_tau, 1);
        for (int tau = 0; tau < n_tau; ++tau)
            sino.at(0, tau) = static_cast<float>(std::cos(kTwoPi * k * tau / n_tau));
        const Spectrum spec = magnitude_spectrum(sino, 8);
        for (int w = 0; w < spec.n_omega; ++w) {
            // DC is dropped, so frequency k sits at bin k - 1
            if (w == k - 1)
                CHECK(spec.at(0, w) == doctest::Approx(n_tau / 2.0).epsilon(1e-6));
            else
                CHECK(std::fabs(spec.at(0, w)) < 1e-5);
        }
    }

    SUBCASE("integer tau shift leaves magnitudes unchanged") {
        Rng rng(36);
        Sinogram sino(4, 32, 1);
        for (int t = 0; t < 4; ++t)
            for (int tau = 8; tau < 24; ++tau) sino.at(t, tau) = static_cast<float>(rng.uniform());
        Sinogram moved(4, 32, 1);
        for (int t = 0; t < 4; ++t)
            for (int tau = 0; tau < 32; ++tau) moved.at(t, (tau + 5) % 32) = sino.at(t, tau);
        const Spectrum a = magnitude_spectrum(sino);
        const Spectrum b = magnitude_spectrum(moved);
        double scale = 0.0;
        for (float v : a.data) scale = std::max(scale, static_cast<double>(v));
        for (std::size_t i = 0; i < a.data.size(); ++i)
            CHECK(std::fabs(a.data[i] - b.data[i]) / scale < 1e-6);
    }

    SUBCASE("default keeps the lowest quarter of the bins") {
        const Spectrum spec = magnitude_spectrum(Sinogram(8, 32, 1));
        CHECK(spec.n_omega == 8);
    }
}

TEST_CASE("neural_bev") {
    SUBCASE("zero grid gives zero output") {
        const BevGrid out = neural_bev(BevGrid(oracles::small_spec(16), 1),
                                       FilterBank::seeded(1, 7));
        for (float v : out.data) CHECK(v == 0.f);
    }

    SUBCASE("identity kernel with one-hot weights selects a channel") {
        Rng rng(37);
        GridSpec spec = oracles::small_spec(16);
        BevGrid grid(spec, 3);
        for (float& v : grid.data) v = static_cast<float>(rng.uniform());
        FilterBank bank = FilterBank::identity(3);
        bank.weights = {0.f, 0.f, 1.f};
        const BevGrid out = neural_bev(grid, bank);
        for (int i = 0; i < 16; ++i)
            for (int j = 0; j < 16; ++j)
                CHECK(out.at(i, j) == doctest::Approx(grid.at(i, j, 2)).epsilon(1e-6));
    }

    SUBCASE("integer translation commutes on interior support (Lemma 1)") {
        Rng rng(38);
        const BevGrid grid = oracles::random_interior_grid(rng, 32, 8);
        const FilterBank bank = FilterBank::seeded(1, 55);
        const BevGrid a = neural_bev(translate_grid(grid, 4, -3), bank);
        const BevGrid b = translate_grid(neural_bev(grid, bank), 4, -3);
        for (std::size_t i = 0; i < a.data.size(); ++i)
            CHECK(std::fabs(a.data[i] - b.data[i]) < 1e-9);
    }
}

TEST_CASE("filter banks") {
    SUBCASE("seed zero is the identity bank") {
        const FilterBank bank = FilterBank::seeded(4, 0);
        CHECK(bank.kernel1d == std::vector<float>{1.f});
        CHECK(bank.kernel2d == std::vector<float>{1.f});
        for (float w : bank.weights) CHECK(w == doctest::Approx(0.25));
    }

    SUBCASE("seeded banks are deterministic and normalized") {
        const FilterBank a = FilterBank::seeded(3, 42);
        const FilterBank b = FilterBank::seeded(3, 42);
        CHECK(a.weights == b.weights);
        CHECK(a.kernel1d == b.kernel1d);
        CHECK(a.kernel2d == b.kernel2d);
        double sum = 0.0;
        for (float w : a.weights) sum += w;
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("l2_normalize") {
    Rng rng(39);
    Spectrum spec(8, 4);
    for (float& v : spec.data) v = static_cast<float>(rng.uniform());
    l2_normalize(spec);
    double norm = 0.0;
    for (float v : spec.data) norm += static_cast<double>(v) * v;
    CHECK(std::sqrt(norm) == doctest::Approx(1.0).epsilon(1e-6));

    Spectrum zero(8, 4);
    l2_normalize(zero);  // must not divide by zero
    for (float v : zero.data) CHECK(v == 0.f);
}
