#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "fixsim/encoding.hpp"
#include "fixsim/rng.hpp"
#include "golden_config.hpp"

using namespace fixsim;
using namespace fixsim::testutil;

TEST_SUITE("encoding") {

TEST_CASE("encoders") {
    Image patch = Image::zeros(14, 14);
    SplitMix64 rng(41);
    for (float& v : patch.px) {
        v = static_cast<float>(rng.next_double());
    }

    SUBCASE("identity is bit-exact") {
        const Image out = apply_encoder(patch, {EncoderSpec::Kind::identity, 2.0, 1.0});
        CHECK(out.px == patch.px);
    }
    SUBCASE("gamma(1, 1) degenerates to the identity") {
        const Image out = apply_encoder(patch, {EncoderSpec::Kind::gamma, 1.0, 1.0});
        for (size_t i = 0; i < patch.size(); ++i) {
            CHECK(out.px[i] == doctest::Approx(patch.px[i]).epsilon(1e-7));
        }
    }
    SUBCASE("gamma(0.5) maps 0.25 to 0.5") {
        Image quarter = Image::zeros(1, 1);
        quarter.px[0] = 0.25f;
        const Image out = apply_encoder(quarter, {EncoderSpec::Kind::gamma, 0.5, 1.0});
        CHECK(out.px[0] == doctest::Approx(0.5).epsilon(1e-9));
    }
    SUBCASE("gain output clamps to [0, 1]") {
        Image bright = Image::zeros(1, 2);
        bright.px = {0.9f, 0.1f};
        const Image out = apply_encoder(bright, {EncoderSpec::Kind::gamma, 1.0, 5.0});
        CHECK(out.px[0] == 1.0f);
        CHECK(out.px[1] == 0.5f);
    }
    SUBCASE("invalid parameters are rejected") {
        CHECK_THROWS_AS(apply_encoder(patch, {EncoderSpec::Kind::gamma, 0.0, 1.0}),
                        std::invalid_argument);
        CHECK_THROWS_AS(apply_encoder(patch, {EncoderSpec::Kind::gamma, 2.0, -1.0}),
                        std::invalid_argument);
    }
}

TEST_CASE("bilinear resize") {
    SUBCASE("preserves constants") {
        Image flat = Image::zeros(224, 224);
        std::fill(flat.px.begin(), flat.px.end(), 0.37f);
        const Image out = resize_bilinear(flat, 14, 14);
        REQUIRE(out.rows == 14);
        for (float v : out.px) {
            CHECK(v == doctest::Approx(0.37f).epsilon(1e-7));
        }
    }
    SUBCASE("pixel-center convention, 224 to 14") {
        // Output (0, 0) samples input (7.5, 7.5): the mean of the 2x2 block
        // at rows/cols 7..8.
        Image img = Image::zeros(224, 224);
        img.at(7, 7) = 0.4f;
        img.at(7, 8) = 0.8f;
        img.at(8, 7) = 0.2f;
        img.at(8, 8) = 0.6f;
        const Image out = resize_bilinear(img, 14, 14);
        CHECK(out.at(0, 0) == doctest::Approx(0.5).epsilon(1e-7));
    }
    SUBCASE("2x2 to 1x1 averages all four") {
        Image img = Image::zeros(2, 2);
        img.px = {0.0f, 1.0f, 0.5f, 0.5f};
        const Image out = resize_bilinear(img, 1, 1);
        CHECK(out.px[0] == doctest::Approx(0.5).epsilon(1e-7));
    }
}

TEST_CASE("box downscale is the exact block mean") {
    Image img = Image::zeros(4, 4);
    for (int i = 0; i < 16; ++i) {
        img.px[i] = static_cast<float>(i);
    }
    const Image out = downscale_box(img, 2, 2);
    CHECK(out.at(0, 0) == doctest::Approx((0 + 1 + 4 + 5) / 4.0));
    CHECK(out.at(0, 1) == doctest::Approx((2 + 3 + 6 + 7) / 4.0));
    CHECK(out.at(1, 0) == doctest::Approx((8 + 9 + 12 + 13) / 4.0));
    CHECK(out.at(1, 1) == doctest::Approx((10 + 11 + 14 + 15) / 4.0));
    CHECK_THROWS_AS(downscale_box(img, 3, 2), std::invalid_argument);
}

TEST_CASE("fixation pipeline basics") {
    const PatchGrid patch_grid = make_patch_grid(224, 14);
    const ElectrodeGrid grid = golden_grid();
    const AxonMap map = golden_map(kPresetA);

    SUBCASE("all-black image gives a black canvas and tie-break fixations") {
        const Image black = Image::zeros(224, 224);
        const SaliencyMap sal = proxy_saliency(black, patch_grid);
        const auto result = run_fixation_pipeline(black, sal, 0.10, {}, patch_grid, grid, map,
                                                  kPresetA);
        CHECK(result.canvas.raw_max == 0.0);
        CHECK(std::all_of(result.canvas.intensities.begin(), result.canvas.intensities.end(),
                          [](double v) { return v == 0.0; }));
        REQUIRE(result.fixations.selected.size() == 25);
        for (int i = 0; i < 25; ++i) {
            CHECK(result.fixations.selected[i] == i);
        }
    }
    SUBCASE("ratio 0.10 touches exactly the 25 selected footprints") {
        const Image img = golden_fixation_image();
        const SaliencyMap sal = proxy_saliency(img, patch_grid);
        const auto result =
            run_fixation_pipeline(img, sal, 0.10, {}, patch_grid, grid, map, kPresetA);
        CHECK(result.fixations.selected.size() == 25);
        std::vector<bool> selected(256, false);
        for (int idx : result.fixations.selected) {
            selected[idx] = true;
        }
        for (int idx = 0; idx < 256; ++idx) {
            if (selected[idx]) continue;
            const int pr = (idx / 16) * 14, pc = (idx % 16) * 14;
            for (int r = 0; r < 14; ++r) {
                for (int c = 0; c < 14; ++c) {
                    CHECK(result.canvas.intensities[static_cast<size_t>(pr + r) * 224 + pc + c] ==
                          0.0);
                }
            }
        }
    }
}

TEST_CASE("identity encoder at ratio 1 loses nothing before the percept") {
    const PatchGrid patch_grid = make_patch_grid(224, 14);
    const ElectrodeGrid grid = golden_grid();
    const Image img = golden_fixation_image();
    const SaliencyMap sal = proxy_saliency(img, patch_grid);
    const FixationSet all = select_fixations(sal, 1.0, patch_grid);
    CHECK(all.selected.size() == 256);
    for (int idx : all.selected) {
        const Image patch = extract_patch(img, idx, patch_grid);
        const Image encoded = apply_encoder(patch, {});
        const Stimulus stim = stimulus_from_image(encoded, grid);
        for (size_t i = 0; i < stim.amplitudes.size(); ++i) {
            CHECK(stim.amplitudes[i] == static_cast<double>(patch.px[i]));
        }
    }
}

TEST_CASE("downsampling pipeline basics") {
    const ElectrodeGrid grid = golden_grid();
    const AxonMap map = golden_map(kPresetB);

    SUBCASE("zero image gives a black percept") {
        const Image black = Image::zeros(224, 224);
        const PerceptFrame frame = run_downsampling_pipeline(black, {}, grid, map, kPresetB);
        CHECK(frame.raw_max == 0.0);
    }
    SUBCASE("constant image stimulates every electrode equally") {
        Image flat = Image::zeros(224, 224);
        std::fill(flat.px.begin(), flat.px.end(), 0.42f);
        const Image small = resize_bilinear(flat, 14, 14);
        const Stimulus stim = stimulus_from_image(apply_encoder(small, {}), grid);
        for (double a : stim.amplitudes) {
            CHECK(a == doctest::Approx(0.42).epsilon(1e-6));
        }
        const PerceptFrame via_pipeline = run_downsampling_pipeline(flat, {}, grid, map, kPresetB);
        const PerceptFrame direct = compute_percept_axon(stim, grid, map, kPresetB);
        CHECK(via_pipeline.intensities == direct.intensities);
    }
}

TEST_CASE("engine pipeline matches the reference pipeline (golden oracle)") {
    const PatchGrid patch_grid = make_patch_grid(224, 14);
    const ElectrodeGrid grid = golden_grid();

    SUBCASE("fixation canvas under parameter set A") {
        const AxonMap map = golden_map(kPresetA);
        const Image img = golden_fixation_image();
        const SaliencyMap sal = proxy_saliency(img, patch_grid);
        PipelineOptions ref_opts;
        ref_opts.use_reference_engine = true;
        const auto engine = run_fixation_pipeline(img, sal, 0.10, {}, patch_grid, grid, map,
                                                  kPresetA, golden_opts());
        const auto reference =
            run_fixation_pipeline(img, sal, 0.10, {}, patch_grid, grid, map, kPresetA, ref_opts);
        const Tensor a = normalized_tensor(engine.canvas);
        const Tensor b = normalized_tensor(reference.canvas);
        REQUIRE(a.data.size() == b.data.size());
        for (size_t i = 0; i < a.data.size(); ++i) {
            CHECK(std::abs(a.data[i] - b.data[i]) <= 1e-6);
        }
    }
    SUBCASE("downsampling percept under parameter set B") {
        const AxonMap map = golden_map(kPresetB);
        const Image img = golden_downsampling_image();
        PipelineOptions ref_opts;
        ref_opts.use_reference_engine = true;
        const PerceptFrame engine =
            run_downsampling_pipeline(img, {}, grid, map, kPresetB, golden_opts());
        const PerceptFrame reference =
            run_downsampling_pipeline(img, {}, grid, map, kPresetB, ref_opts);
        const Tensor a = normalized_tensor(engine);
        const Tensor b = normalized_tensor(reference);
        for (size_t i = 0; i < a.data.size(); ++i) {
            CHECK(std::abs(a.data[i] - b.data[i]) <= 1e-6);
        }
    }
}

TEST_CASE("pipelines reproduce the stored golden rasters") {
    const PatchGrid patch_grid = make_patch_grid(224, 14);
    const ElectrodeGrid grid = golden_grid();

    SUBCASE("fixation golden, parameter set A") {
        const Tensor golden = load_tensor(std::string(FIXSIM_TEST_DATA_DIR) +
                                          "/golden_fixation_a.atnf");
        const AxonMap map = golden_map(kPresetA);
        const Image img = golden_fixation_image();
        const SaliencyMap sal = proxy_saliency(img, patch_grid);
        const auto result = run_fixation_pipeline(img, sal, 0.10, {}, patch_grid, grid, map,
                                                  kPresetA, golden_opts());
        const Tensor canvas = normalized_tensor(result.canvas);
        REQUIRE(golden.dims == canvas.dims);
        for (size_t i = 0; i < canvas.data.size(); ++i) {
            CHECK(std::abs(canvas.data[i] - golden.data[i]) <= 1e-6);
        }
    }
    SUBCASE("downsampling golden, parameter set B") {
        const Tensor golden = load_tensor(std::string(FIXSIM_TEST_DATA_DIR) +
                                          "/golden_downsampling_b.atnf");
        const AxonMap map = golden_map(kPresetB);
        const Image img = golden_downsampling_image();
        const PerceptFrame frame =
            run_downsampling_pipeline(img, {}, grid, map, kPresetB, golden_opts());
        const Tensor raster = normalized_tensor(frame);
        REQUIRE(golden.dims == raster.dims);
        for (size_t i = 0; i < raster.data.size(); ++i) {
            CHECK(std::abs(raster.data[i] - golden.data[i]) <= 1e-6);
        }
    }
}

TEST_CASE("dimension contracts are enforced") {
    const PatchGrid patch_grid = make_patch_grid(224, 14);
    const ElectrodeGrid wrong_grid = build_grid(7, 7, 400.0, {0.0, 0.0});
    const AxonMap map = golden_map(kPresetA);
    const Image img = Image::zeros(224, 224);
    const SaliencyMap sal(256, 0.0);
    CHECK_THROWS_AS(
        run_fixation_pipeline(img, sal, 0.10, {}, patch_grid, wrong_grid, map, kPresetA),
        std::invalid_argument);
}

}  // TEST_SUITE
