#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "spectral/image_io.hpp"

using namespace spectral;

namespace {

std::vector<std::uint8_t> pgm_bytes(const std::string& header, std::initializer_list<int> payload) {
    std::vector<std::uint8_t> b(header.begin(), header.end());
    for (int v : payload) b.push_back(static_cast<std::uint8_t>(v));
    return b;
}

}  // namespace

TEST_SUITE("image") {
    TEST_CASE("raster validates its shape and payload") {
        CHECK_THROWS_AS(GrayImage16(0, 3), InvalidInput);
        CHECK_THROWS_AS(GrayImage16(2, 2, std::vector<std::uint16_t>(3)), InvalidInput);
        CHECK_THROWS_WITH_AS(GrayImage16(1u << 15, 1u << 15), doctest::Contains("overflow"), InvalidInput);
        CHECK_THROWS_AS(FloatImage(1, 1, std::vector<double>{NAN}), InvalidInput);
        const GrayImage16 g(3, 2, std::vector<std::uint16_t>{1, 2, 3, 4, 5, 6});
        CHECK(g(2, 1) == 6);
        CHECK(g(0, 1) == 4);
    }

    TEST_CASE("stats of the worked example") {
        const GrayImage16 g(2, 2, std::vector<std::uint16_t>{100, 200, 300, 400});
        const ImageStats s = image_stats(g);
        CHECK(s.mean == doctest::Approx(250.0));
        CHECK(s.std == doctest::Approx(std::sqrt((150.0 * 150 + 50 * 50 + 50 * 50 + 150 * 150) / 4)));
        CHECK(s.std == doctest::Approx(111.803).epsilon(1e-5));
        CHECK(s.min == 100);
        CHECK(s.max == 400);
    }

    TEST_CASE("stats of constant and single-pixel images") {
        const ImageStats c = image_stats(GrayImage16(5, 4, 7));
        CHECK(c.mean == 7.0);
        CHECK(c.std == 0.0);
        const ImageStats one = image_stats(GrayImage16(1, 1, 4242));
        CHECK(one.mean == 4242.0);
        CHECK(one.std == 0.0);
        CHECK(one.min == 4242);
        CHECK(one.max == 4242);
    }

    TEST_CASE("stats properties on random images") {
        oracle::Gen gen(11);
        for (int t = 0; t < 200; ++t) {
            const GrayImage16 g = gen.gray(gen.size(1, 12), gen.size(1, 12), 0, 60000);
            const ImageStats s = image_stats(g);
            CHECK(s.mean >= s.min);
            CHECK(s.mean <= s.max);
            CHECK((s.std == 0.0) == (s.min == s.max));

            const int c = gen.integer(0, 5535);
            GrayImage16 shifted = g;
            for (std::size_t i = 0; i < shifted.size(); ++i) shifted[i] = static_cast<std::uint16_t>(shifted[i] + c);
            const ImageStats t2 = image_stats(shifted);
            CHECK(t2.mean == doctest::Approx(s.mean + c).epsilon(1e-12));
            CHECK(t2.std == doctest::Approx(s.std).epsilon(1e-9));
        }
    }

    TEST_CASE("decode the 2x2 PGM example") {
        const auto bytes = pgm_bytes("P5\n2 2\n65535\n", {0, 100, 0, 200, 1, 44, 1, 144});
        const GrayImage16 g = decode_image(bytes, ImageFormat::Pgm16);
        CHECK(g.width() == 2);
        CHECK(g.vector() == std::vector<std::uint16_t>{100, 200, 300, 400});
    }

    TEST_CASE("PGM header comments and maxval below 65535") {
        const auto bytes = pgm_bytes("P5 # c\n2 # w\n1\n# m\n1000\n", {0, 1, 3, 232});
        const GrayImage16 g = decode_image(bytes, ImageFormat::Pgm16);
        CHECK(g.vector() == std::vector<std::uint16_t>{1, 1000});
        CHECK_THROWS_AS(decode_image(pgm_bytes("P5\n1 1\n1000\n", {3, 233}), ImageFormat::Pgm16), InvalidInput);
    }

    TEST_CASE("PGM rejects 8-bit, truncated and malformed data") {
        CHECK_THROWS_WITH_AS(decode_image(pgm_bytes("P5\n1 1\n255\n", {4}), ImageFormat::Pgm16),
                             doctest::Contains("unsupported bit depth"), InvalidInput);
        CHECK_THROWS_WITH_AS(decode_image(pgm_bytes("P5\n2 2\n65535\n", {0, 1, 0}), ImageFormat::Pgm16),
                             doctest::Contains("truncated"), InvalidInput);
        CHECK_THROWS_AS(decode_image(pgm_bytes("P2\n1 1\n65535\n", {0, 1}), ImageFormat::Pgm16), InvalidInput);
        CHECK_THROWS_AS(decode_image(pgm_bytes("P5\n0 1\n65535\n", {}), ImageFormat::Pgm16), InvalidInput);
        CHECK_THROWS_WITH_AS(decode_image(pgm_bytes("P5\n100000 100000\n65535\n", {0, 1}), ImageFormat::Pgm16),
                             doctest::Contains("overflow"), InvalidInput);
    }

    TEST_CASE("PNG rejects 8-bit files") {
        // 1x1 8-bit greyscale PNG holding the value 4
        const std::vector<std::uint8_t> png8 = {
            0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48, 0x44, 0x52,
            0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x00, 0x00, 0x00, 0x00, 0x3a, 0x7e, 0x9b,
            0x55, 0x00, 0x00, 0x00, 0x0a, 0x49, 0x44, 0x41, 0x54, 0x78, 0x9c, 0x63, 0x60, 0x01, 0x00, 0x00,
            0x06, 0x00, 0x05, 0x83, 0x97, 0x1b, 0x11, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae,
            0x42, 0x60, 0x82};
        CHECK(detect_format(png8) == ImageFormat::Png16);
        CHECK_THROWS_WITH_AS(decode_image(png8, ImageFormat::Png16), doctest::Contains("unsupported bit depth"),
                             InvalidInput);
        CHECK_THROWS_AS(decode_image(std::vector<std::uint8_t>(png8.begin(), png8.begin() + 20), ImageFormat::Png16),
                        InvalidInput);
    }

    TEST_CASE("round trip is the identity for both formats") {
        oracle::Gen gen(5);
        oracle::TempDir dir("io");
        for (int t = 0; t < 40; ++t) {
            const GrayImage16 g = gen.gray(gen.size(1, 20), gen.size(1, 20));
            for (ImageFormat f : {ImageFormat::Pgm16, ImageFormat::Png16}) {
                CHECK(decode_image(encode_image(g, f), f) == g);
                const auto path = dir.path / (f == ImageFormat::Pgm16 ? "a.pgm" : "a.png");
                write_image(g, path, f);
                CHECK(read_image(path, f) == g);
            }
        }
    }

    TEST_CASE("masks are written as 0/65535") {
        const BinaryMask m(2, 2, std::vector<std::uint8_t>{1, 0, 0, 1});
        oracle::TempDir dir("mask");
        write_image(m, dir.path / "m.pgm", ImageFormat::Pgm16);
        CHECK(read_image(dir.path / "m.pgm", ImageFormat::Pgm16).vector() ==
              std::vector<std::uint16_t>{65535, 0, 0, 65535});
        CHECK(read_mask(dir.path / "m.pgm", ImageFormat::Pgm16) == m);
    }

    TEST_CASE("I/O errors") {
        CHECK_THROWS_AS(write_image(GrayImage16(1, 1), "", ImageFormat::Pgm16), IoError);
        CHECK_THROWS_AS(read_image("/nonexistent/x.pgm", ImageFormat::Pgm16), IoError);
        CHECK(format_from_path("a/b.PNG") == ImageFormat::Png16);
        CHECK(format_from_path("a/b.pgm") == ImageFormat::Pgm16);
        CHECK_FALSE(format_from_path("a/b.tif").has_value());
        CHECK_THROWS_AS(parse_format("tiff"), InvalidInput);
    }

    TEST_CASE("conversions") {
        const FloatImage f(3, 1, std::vector<double>{-4.0, 2.5, 70000.0});
        CHECK(to_gray16(f).vector() == std::vector<std::uint16_t>{0, 3, 65535});
        const BinaryMask m(3, 1, std::vector<std::uint8_t>{1, 0, 1});
        CHECK(count_set(m) == 2);
        CHECK(complement(m).vector() == std::vector<std::uint8_t>{0, 1, 0});
        const GrayImage16 g(3, 1, std::vector<std::uint16_t>{5, 6, 7});
        CHECK(apply_mask(g, m).vector() == std::vector<std::uint16_t>{5, 0, 7});
    }
}
