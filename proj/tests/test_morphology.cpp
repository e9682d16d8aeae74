#include <doctest.h>

#include "oracles.hpp"
#include "spectral/morphology.hpp"

using namespace spectral;

namespace {

constexpr SeShape kShapes[] = {SeShape::Disk, SeShape::Square, SeShape::Cross};

bool subset(const BinaryMask& a, const BinaryMask& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] && !b[i]) return false;
    }
    return true;
}

}  // namespace

TEST_SUITE("morphology") {
    TEST_CASE("binarize is inclusive") {
        const GrayImage16 g(3, 1, std::vector<std::uint16_t>{5, 10, 15});
        CHECK(binarize(g, 10).vector() == std::vector<std::uint8_t>{0, 1, 1});
        CHECK(count_set(binarize(g, 0)) == 3);
        const GrayImage16 top(3, 1, std::vector<std::uint16_t>{65535, 3, 65535});
        CHECK(binarize(top, 65535).vector() == std::vector<std::uint8_t>{1, 0, 1});
    }

    TEST_CASE("structuring element validation and footprints") {
        CHECK_THROWS_AS(StructuringElement(SeShape::Disk, 0), InvalidInput);
        CHECK(StructuringElement(SeShape::Cross, 1).offsets().size() == 5);
        CHECK(StructuringElement(SeShape::Square, 1).offsets().size() == 9);
        CHECK(StructuringElement(SeShape::Disk, 3).offsets().size() == 29);
        CHECK(parse_se_shape("cross") == SeShape::Cross);
        CHECK_THROWS_AS(parse_se_shape("star"), InvalidInput);
    }

    TEST_CASE("worked examples") {
        const StructuringElement cross(SeShape::Cross, 1);
        BinaryMask dot(7, 7);
        dot(3, 3) = 1;
        CHECK(count_set(erode(dot, cross)) == 0);
        const BinaryMask plus = dilate(dot, cross);
        CHECK(count_set(plus) == 5);
        CHECK(plus(3, 2) == 1);
        CHECK(plus(2, 3) == 1);
        CHECK(plus(2, 2) == 0);

        const BinaryMask full(10, 10, 1);
        const BinaryMask e = erode(full, cross);
        CHECK(e == oracle::erode(full, SeShape::Cross, 1));
        CHECK(count_set(e) == 64);
        CHECK(e(0, 5) == 0);
        CHECK(e(1, 1) == 1);

        const BinaryMask empty(6, 5);
        for (SeShape s : kShapes) {
            CHECK(count_set(erode(empty, {s, 2})) == 0);
            CHECK(count_set(dilate(empty, {s, 2})) == 0);
        }
    }

    TEST_CASE("erode, dilate and open match the brute-force footprint") {
        oracle::Gen gen(2024);
        for (int t = 0; t < 300; ++t) {
            const BinaryMask m = gen.mask();
            const SeShape shape = kShapes[t % 3];
            const int r = gen.integer(1, 4);
            const StructuringElement se(shape, r);
            REQUIRE(erode(m, se) == oracle::erode(m, shape, r));
            REQUIRE(dilate(m, se) == oracle::dilate(m, shape, r));
            REQUIRE(open(m, se) == oracle::opening(m, shape, r));
        }
    }

    TEST_CASE("erosion is the dual of dilation with the outside set") {
        // Out-of-image pixels are 0 for both operators, so the complement of
        // the complement is padded with 1s before dilating.
        oracle::Gen gen(77);
        for (int t = 0; t < 200; ++t) {
            const BinaryMask m = gen.mask();
            const SeShape shape = kShapes[t % 3];
            const int r = gen.integer(1, 3);
            const std::size_t p = static_cast<std::size_t>(r);
            BinaryMask padded(m.width() + 2 * p, m.height() + 2 * p, 1);
            for (std::size_t y = 0; y < m.height(); ++y) {
                for (std::size_t x = 0; x < m.width(); ++x) padded(x + p, y + p) = m(x, y) ? 0 : 1;
            }
            const BinaryMask d = dilate(padded, {shape, r});
            const BinaryMask e = erode(m, {shape, r});
            for (std::size_t y = 0; y < m.height(); ++y) {
                for (std::size_t x = 0; x < m.width(); ++x) REQUIRE(e(x, y) == (d(x + p, y + p) ? 0 : 1));
            }
        }
    }

    TEST_CASE("opening is anti-extensive and idempotent, closing extensive") {
        oracle::Gen gen(3);
        for (int t = 0; t < 200; ++t) {
            const BinaryMask m = gen.mask();
            const StructuringElement se(kShapes[t % 3], gen.integer(1, 3));
            const BinaryMask o = open(m, se);
            CHECK(subset(o, m));
            CHECK(open(o, se) == o);
            CHECK(subset(dilate(erode(m, se), se), m));
        }
    }

    TEST_CASE("M is contained in erode(dilate(M)) away from the border") {
        oracle::Gen gen(4);
        for (int t = 0; t < 200; ++t) {
            const int r = gen.integer(1, 2);
            const std::size_t pad = 2 * static_cast<std::size_t>(r);
            const BinaryMask core = gen.mask(10);
            BinaryMask m(core.width() + 2 * pad, core.height() + 2 * pad);
            for (std::size_t y = 0; y < core.height(); ++y) {
                for (std::size_t x = 0; x < core.width(); ++x) m(x + pad, y + pad) = core(x, y);
            }
            const StructuringElement se(kShapes[t % 3], r);
            CHECK(subset(m, erode(dilate(m, se), se)));
        }
    }
}
