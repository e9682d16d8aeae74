#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "oracles.hpp"
#include "spectral/pipeline.hpp"

using namespace spectral;

TEST_SUITE("serialize") {
    TEST_CASE("histogram csv") {
        const IntensityHistogram h = histogram(GrayImage16(3, 1, std::vector<std::uint16_t>{0, 2, 2}));
        CHECK(histogram_csv(h) == "intensity,count\n0,1\n1,0\n2,2\n");
        CHECK(histogram_csv(IntensityHistogram{}) == "intensity,count\n");
    }

    TEST_CASE("metrics csv and json") {
        const MetricsReport m{0.5, 1.0 / 3.0, {2, 2, 2, 3}};
        CHECK(metrics_csv(m).rfind("dsc,ji,tp,fp,fn,tn\n0.5,", 0) == 0);
        const Json j = to_json(m);
        CHECK(j.at("tp") == 2);
        CHECK(j.at("dsc") == 0.5);
    }

    TEST_CASE("downsampling keeps the threshold bin on its own") {
        oracle::Gen gen(10);
        for (int t = 0; t < 30; ++t) {
            std::vector<std::uint64_t> c(kHistogramBins, 0);
            const std::size_t top = gen.size(1, 20000);
            for (std::size_t i = 0; i <= top; ++i) c[i] = static_cast<std::uint64_t>(gen.integer(0, 50));
            c[top] = 1;
            const IntensityHistogram h(std::move(c));
            const auto thr = static_cast<std::uint16_t>(gen.size(0, top));
            const Json d = downsample_histogram(h, thr);
            const auto& lo = d.at("bucket_lo");
            const auto& hi = d.at("bucket_hi");
            const auto& mx = d.at("max_count");
            REQUIRE(lo.size() <= 2048);
            REQUIRE(lo.size() == mx.size());
            CHECK(lo.front() == 0);
            CHECK(hi.back() == top);
            bool found = false;
            for (std::size_t i = 0; i < lo.size(); ++i) {
                if (i > 0) REQUIRE(lo[i].get<std::size_t>() == hi[i - 1].get<std::size_t>() + 1);
                std::uint64_t m = 0;
                for (std::size_t v = lo[i]; v <= hi[i].get<std::size_t>(); ++v) m = std::max(m, h[v]);
                REQUIRE(mx[i] == m);
                if (lo[i] == thr && hi[i] == thr) found = true;
            }
            CHECK(found);
        }
    }

    TEST_CASE("preprocess params reject unknown keys and bad types") {
        CHECK_THROWS_AS(preprocess_params_from_json(Json{{"sigma", 1}}), InvalidInput);
        CHECK_THROWS_AS(preprocess_params_from_json(Json{{"iterations", 2.5}}), InvalidInput);
        CHECK_THROWS_AS(preprocess_params_from_json(Json{{"se_shape", "hexagon"}}), InvalidInput);
        const PreprocessParams p = preprocess_params_from_json(Json{{"iterations", 3}, {"gain_sigma", 20.0}});
        CHECK(p.iterations == 3);
        CHECK(p.bias.gain_sigma == 20.0);
    }

    TEST_CASE("phantom spec round trip") {
        const PhantomSpec s = fixtures::lesion_spec(5);
        const PhantomSpec back = phantom_spec_from_json(to_json(s));
        CHECK(to_json(back) == to_json(s));
        CHECK(generate(back).image == generate(s).image);
        Json noseed = to_json(s);
        noseed.erase("seed");
        CHECK_THROWS_WITH_AS(phantom_spec_from_json(noseed), doctest::Contains("seed"), InvalidInput);
        Json extra = to_json(s);
        extra["colour"] = 1;
        CHECK_THROWS_AS(phantom_spec_from_json(extra), InvalidInput);
    }

    TEST_CASE("phantom set on disk") {
        oracle::TempDir dir("set");
        const PhantomSpec s = fixtures::tissue_spec(1);
        const Phantom p = generate(s);
        write_phantom_set(p, s, dir.path);
        CHECK(read_image(dir.path / "image.pgm", ImageFormat::Pgm16) == p.image);
        CHECK(read_mask(dir.path / "dark_class.pgm", ImageFormat::Pgm16) == p.dark_class);
        const Json m = read_json_file(dir.path / "manifest.json");
        CHECK(m.at("spec").at("seed") == 1);
        CHECK(m.at("counts").at("dark_class") == count_set(p.dark_class));
    }
}

TEST_SUITE("pipeline") {
    TEST_CASE("params document round trip") {
        RunConfig c;
        c.mode = Mode::Lesion;
        c.min_area = 33;
        c.smooth_window = 3;
        c.preprocess.iterations = 7;
        const Json j = params_to_json(c, 448);
        CHECK(j.at("schema") == "spectral.params/1");
        const RunConfig back = params_from_json(j);
        CHECK(params_to_json(back, 448) == j);
        CHECK(back.preprocess.bias.gain_sigma == 56.0);

        RunConfig t;
        t.bounds = LoftBounds{310, 790};
        CHECK(params_from_json(params_to_json(t, 100)).bounds == LoftBounds{310, 790});
        CHECK_THROWS_AS(params_from_json(Json{{"schema", "other/2"}}), InvalidInput);
        CHECK_THROWS_AS(params_from_json(Json{{"mode", "bone"}}), InvalidInput);
        CHECK_THROWS_AS(params_from_json(Json{{"smooth_window", 4}}), InvalidInput);
    }

    TEST_CASE("overrides") {
        RunConfig c = apply_overrides(RunConfig{}, Json{{"lo", 320}, {"iterations", 4}});
        CHECK(c.bounds == LoftBounds{320, 800});
        CHECK(c.preprocess.iterations == 4);
        RunConfig lesion;
        lesion.mode = Mode::Lesion;
        CHECK_THROWS_AS(apply_overrides(lesion, Json{{"lo", 320}}), InvalidInput);
        CHECK_THROWS_AS(apply_overrides(RunConfig{}, Json{{"lambda", 0.5}}), InvalidInput);
        CHECK_THROWS_AS(apply_overrides(RunConfig{}, Json{{"bogus", 1}}), InvalidInput);
        CHECK_THROWS_AS(apply_overrides(RunConfig{}, Json::array()), InvalidInput);
    }

    TEST_CASE("run is deterministic and the pre-done path composes") {
        const Phantom ph = generate(fixtures::tissue_spec(21));
        const RunResult a = run_segmentation(ph.image, RunConfig{});
        const RunResult b = run_segmentation(ph.image, RunConfig{});
        CHECK(a.mask == b.mask);
        CHECK(a.threshold.threshold == b.threshold.threshold);

        RunConfig pre;
        pre.pre_done = true;
        const RunResult c = run_segmentation(a.preprocessed, pre);
        CHECK(c.threshold.threshold == a.threshold.threshold);
        CHECK(c.mask == a.mask);
    }
}
