#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "fixsim/axon_map.hpp"
#include "fixsim/errors.hpp"
#include "fixsim/rng.hpp"
#include "test_util.hpp"

using namespace fixsim;

namespace {

// Disc-centered angle of a vertex, in degrees.
double disc_angle_deg(const TrajectoryParams& p, float x_um, float y_um) {
    const double dx = x_um / p.um_per_deg - p.optic_disc_deg.x_deg;
    const double dy = y_um / p.um_per_deg - p.optic_disc_deg.y_deg;
    return std::atan2(dy, dx) * 180.0 / std::numbers::pi;
}

double disc_radius_deg(const TrajectoryParams& p, float x_um, float y_um) {
    const double dx = x_um / p.um_per_deg - p.optic_disc_deg.x_deg;
    const double dy = y_um / p.um_per_deg - p.optic_disc_deg.y_deg;
    return std::hypot(dx, dy);
}

TrajectoryParams random_params(SplitMix64& rng) {
    TrajectoryParams p;
    p.n_bundles = 4 + static_cast<uint32_t>(rng.next_below(47));
    p.r0_deg = rng.next_range(1.0, 5.0);
    p.r_max_deg = rng.next_range(10.0, 30.0);
    p.dr_deg = rng.next_range(0.1, 1.0);
    p.tau_deg = rng.next_range(30.0, 90.0);
    return p;
}

}  // namespace

TEST_SUITE("axon-map") {

TEST_CASE("seed angle is exact at the start radius") {
    // With 6 bundles, bundle 4 seeds at phi0 = -180 + 4.5 * 60 = 90 deg.
    TrajectoryParams p;
    p.n_bundles = 6;
    p.r0_deg = 2.0;
    p.r_max_deg = 45.0;
    p.dr_deg = 0.25;
    p.tau_deg = 45.0;
    const auto bundles = build_bundles(p);
    REQUIRE(bundles.size() == 6);
    // Vertices are stored as f32; ~5e-5 deg of angle quantization remains.
    CHECK(disc_angle_deg(p, bundles[4].x_um[0], bundles[4].y_um[0]) ==
          doctest::Approx(90.0).epsilon(1e-5));
    CHECK(disc_radius_deg(p, bundles[4].x_um[0], bundles[4].y_um[0]) ==
          doctest::Approx(p.r0_deg).epsilon(1e-5));
}

TEST_CASE("angle relaxes exponentially toward the raphe") {
    // phi0 = 90, tau = 45: at r - r0 = 45 the angle is 180 - 90 e^{-1}.
    TrajectoryParams p;
    p.n_bundles = 6;
    p.r0_deg = 2.0;
    p.r_max_deg = 50.0;
    p.dr_deg = 0.25;
    p.tau_deg = 45.0;
    const auto bundles = build_bundles(p);
    const int k = static_cast<int>(45.0 / p.dr_deg);  // 180 steps past r0
    REQUIRE(static_cast<size_t>(k) < bundles[4].size());
    const double expected = 180.0 - 90.0 * std::exp(-1.0);
    CHECK(disc_angle_deg(p, bundles[4].x_um[k], bundles[4].y_um[k]) ==
          doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("raphe separation and angle monotonicity hold for every bundle") {
    TrajectoryParams p;  // defaults: 500 bundles
    const auto bundles = build_bundles(p);
    REQUIRE(bundles.size() == p.n_bundles);
    for (uint32_t b = 0; b < p.n_bundles; ++b) {
        const double phi0 = -180.0 + (b + 0.5) * 360.0 / p.n_bundles;
        for (size_t v = 0; v < bundles[b].size(); ++v) {
            const double phi = disc_angle_deg(p, bundles[b].x_um[v], bundles[b].y_um[v]);
            CHECK((phi0 > 0.0) == (phi > 0.0));
            CHECK(std::abs(phi) >= std::abs(phi0) - 1e-3);
            CHECK(std::abs(phi) < 180.0);
        }
    }
}

TEST_CASE("arc length is strictly increasing with bounded steps") {
    SplitMix64 rng(2301);
    for (int trial = 0; trial < 10; ++trial) {
        const TrajectoryParams p = random_params(rng);
        const auto bundles = build_bundles(p);
        const double step_cap = 2.0 * p.dr_deg * 280.0 * 1.01;
        for (const AxonBundle& b : bundles) {
            REQUIRE(b.size() >= 2);
            CHECK(b.arc_um[0] == 0.0f);
            for (size_t v = 1; v < b.size(); ++v) {
                const double step = b.arc_um[v] - b.arc_um[v - 1];
                CHECK(step > 0.0);
                CHECK(step <= step_cap);
            }
        }
    }
}

TEST_CASE("parameter validation") {
    TrajectoryParams p;
    p.n_bundles = 3;
    CHECK_THROWS_AS(build_bundles(p), std::invalid_argument);
    p = TrajectoryParams{};
    p.r0_deg = 5.0;
    p.r_max_deg = 4.0;
    CHECK_THROWS_AS(build_bundles(p), std::invalid_argument);
    p = TrajectoryParams{};
    p.dr_deg = 1.5;
    CHECK_THROWS_AS(build_bundles(p), std::invalid_argument);
    p = TrajectoryParams{};
    p.tau_deg = 0.0;
    CHECK_THROWS_AS(build_bundles(p), std::invalid_argument);
}

TEST_CASE("assign_soma picks the exact vertex and breaks ties low") {
    // Hand-built bundles; bundle 3 vertex 7 at (1000, 1000).
    std::vector<AxonBundle> bundles(5);
    for (uint32_t b = 0; b < 5; ++b) {
        for (int v = 0; v < 10; ++v) {
            bundles[b].x_um.push_back(static_cast<float>(100 * v));
            bundles[b].y_um.push_back(static_cast<float>(500 * b + 37));
            bundles[b].arc_um.push_back(static_cast<float>(100 * v));
        }
    }
    bundles[3].x_um[7] = 1000.0f;
    bundles[3].y_um[7] = 1000.0f;
    CHECK(assign_soma({1000.0, 1000.0}, bundles) == SomaRef{3, 7});

    // Equidistant pair: bundle 1 vertex 5 at (0, 37+500), bundle 4 vertex 2
    // at (2, y) -> craft exact symmetric distances instead.
    std::vector<AxonBundle> tie(5);
    for (uint32_t b = 0; b < 5; ++b) {
        tie[b].x_um.assign(6, 1e6f);
        tie[b].y_um.assign(6, 1e6f);
        tie[b].arc_um = {0, 1, 2, 3, 4, 5};
    }
    tie[1].x_um[5] = 0.0f;
    tie[1].y_um[5] = 0.0f;
    tie[4].x_um[2] = 2.0f;
    tie[4].y_um[2] = 0.0f;
    CHECK(assign_soma({1.0, 0.0}, tie) == SomaRef{1, 5});

    CHECK_THROWS_AS(assign_soma({0.0, 0.0}, {}), std::invalid_argument);
}

TEST_CASE("hashed nearest-vertex equals the exhaustive scan on random points") {
    SplitMix64 rng(777);
    TrajectoryParams p = random_params(rng);
    const auto bundles = build_bundles(p);
    const VertexHash hash(bundles, std::max(140.0, p.dr_deg * p.um_per_deg));
    for (int i = 0; i < 200; ++i) {
        const RetinalPoint q{rng.next_range(-9000.0, 9000.0), rng.next_range(-9000.0, 9000.0)};
        CHECK(hash.nearest(q) == assign_soma(q, bundles));
    }
}

TEST_CASE("1x1 map reduces to a single soma assignment") {
    TrajectoryParams p;
    p.n_bundles = 16;
    p.r_max_deg = 20.0;
    p.dr_deg = 0.5;
    const RenderWindow w{-400.0, 400.0, -400.0, 400.0};
    const AxonMap map = build_axon_map(w, 1, 1, p);
    REQUIRE(map.soma_of_pixel.size() == 1);
    CHECK(map.soma_of_pixel[0] == assign_soma({0.0, 0.0}, map.bundles));
}

TEST_CASE("map construction is deterministic") {
    TrajectoryParams p;
    p.n_bundles = 32;
    p.r_max_deg = 20.0;
    p.dr_deg = 0.5;
    const RenderWindow w{-2000.0, 2000.0, -1500.0, 2500.0};
    const AxonMap a = build_axon_map(w, 16, 16, p);
    const AxonMap b = build_axon_map(w, 16, 16, p);
    CHECK(axon_maps_equal(a, b));
}

TEST_CASE("accelerated assignment equals exhaustive on random maps") {
    SplitMix64 rng(4242);
    for (int trial = 0; trial < 25; ++trial) {
        TrajectoryParams p = random_params(rng);
        const double cx = rng.next_range(-3000.0, 3000.0);
        const double cy = rng.next_range(-3000.0, 3000.0);
        const double half = rng.next_range(500.0, 4000.0);
        const RenderWindow w{cx - half, cx + half, cy - half, cy + half};
        const int rows = 1 + static_cast<int>(rng.next_below(32));
        const int cols = 1 + static_cast<int>(rng.next_below(32));
        const AxonMap map = build_axon_map(w, rows, cols, p);
        for (int r = 0; r < rows; ++r) {
            for (int c = 0; c < cols; ++c) {
                const RetinalPoint q = pixel_center(w, rows, cols, r, c);
                CHECK(map.soma_of_pixel[static_cast<size_t>(r) * cols + c] ==
                      assign_soma(q, map.bundles));
            }
        }
    }
}

TEST_CASE("cache round-trips exactly") {
    testutil::TempDir tmp("axmp");
    TrajectoryParams p;
    p.n_bundles = 24;
    p.r_max_deg = 15.0;
    p.dr_deg = 0.5;
    const RenderWindow w{-1000.0, 1000.0, -1000.0, 1000.0};
    const AxonMap map = build_axon_map(w, 8, 12, p);
    const std::string path = tmp.file("map.axmp");
    save_axon_map(map, path);
    const AxonMap loaded = load_axon_map(path);
    CHECK(axon_maps_equal(map, loaded));
    // Checked load with matching expectations also passes.
    CHECK(axon_maps_equal(map, load_axon_map_checked(path, p, w, 8, 12)));
}

TEST_CASE("cache loader rejects damage with distinct errors") {
    testutil::TempDir tmp("axmp_err");
    TrajectoryParams p;
    p.n_bundles = 8;
    p.r_max_deg = 12.0;
    p.dr_deg = 0.5;
    const RenderWindow w{-800.0, 800.0, -800.0, 800.0};
    const AxonMap map = build_axon_map(w, 4, 4, p);
    const std::string path = tmp.file("map.axmp");
    save_axon_map(map, path);

    auto read_all = [&]() {
        std::ifstream in(path, std::ios::binary);
        return std::vector<char>((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
    };
    auto write_all = [&](const std::string& to, const std::vector<char>& bytes) {
        std::ofstream out(to, std::ios::binary);
        out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    };
    const std::vector<char> good = read_all();

    SUBCASE("wrong magic") {
        std::vector<char> bad = good;
        bad[0] = 'Z';
        write_all(tmp.file("bad_magic.axmp"), bad);
        CHECK_THROWS_AS(load_axon_map(tmp.file("bad_magic.axmp")), BadMagicError);
    }
    SUBCASE("unsupported version") {
        std::vector<char> bad = good;
        bad[4] = 99;
        write_all(tmp.file("bad_version.axmp"), bad);
        CHECK_THROWS_AS(load_axon_map(tmp.file("bad_version.axmp")), BadVersionError);
    }
    SUBCASE("truncation at many points") {
        for (size_t cut : {5ul, 15ul, 60ul, 70ul, good.size() / 2, good.size() - 3}) {
            std::vector<char> bad(good.begin(), good.begin() + static_cast<long>(cut));
            write_all(tmp.file("trunc.axmp"), bad);
            CHECK_THROWS_AS(load_axon_map(tmp.file("trunc.axmp")), CorruptFileError);
        }
    }
    SUBCASE("tampered header hash") {
        std::vector<char> bad = good;
        bad[8] ^= 0x5A;
        write_all(tmp.file("bad_hash.axmp"), bad);
        CHECK_THROWS_AS(load_axon_map(tmp.file("bad_hash.axmp")), CorruptFileError);
    }
    SUBCASE("stale cache for different params") {
        TrajectoryParams other = p;
        other.tau_deg = 60.0;
        CHECK_THROWS_AS(load_axon_map_checked(path, other, w, 4, 4), StaleCacheError);
        // Same params but different dims is stale too.
        CHECK_THROWS_AS(load_axon_map_checked(path, p, w, 8, 8), StaleCacheError);
    }
}

}  // TEST_SUITE
