#include "spectral/image.hpp"

#include <algorithm>

namespace spectral {

ImageStats image_stats(const GrayImage16& image) {
    const auto px = image.samples();
    ImageStats s;
    s.min = *std::min_element(px.begin(), px.end());
    s.max = *std::max_element(px.begin(), px.end());

    // Integer sum is exact for any image under kMaxPixels.
    std::uint64_t sum = 0;
    for (auto v : px) sum += v;
    const double n = static_cast<double>(px.size());
    s.mean = static_cast<double>(sum) / n;

    double ss = 0.0;
    for (auto v : px) {
        const double d = static_cast<double>(v) - s.mean;
        ss += d * d;
    }
    s.std = s.min == s.max ? 0.0 : std::sqrt(ss / n);
    return s;
}

FloatImage to_float(const GrayImage16& image) {
    std::vector<double> v(image.samples().begin(), image.samples().end());
    return FloatImage(image.width(), image.height(), std::move(v));
}

GrayImage16 to_gray16(const FloatImage& image) {
    std::vector<std::uint16_t> out(image.size());
    std::ranges::transform(image.samples(), out.begin(), [](double v) {
        return static_cast<std::uint16_t>(std::clamp(std::round(v), 0.0, 65535.0));
    });
    return GrayImage16(image.width(), image.height(), std::move(out));
}

GrayImage16 apply_mask(const GrayImage16& image, const BinaryMask& mask) {
    if (!image.same_shape(mask)) throw InvalidInput("mask shape differs from image");
    GrayImage16 out = image;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (!mask[i]) out[i] = 0;
    }
    return out;
}

std::size_t count_set(const BinaryMask& mask) {
    return static_cast<std::size_t>(std::ranges::count_if(mask.samples(), [](auto b) { return b != 0; }));
}

BinaryMask complement(const BinaryMask& mask) {
    BinaryMask out(mask.width(), mask.height());
    for (std::size_t i = 0; i < mask.size(); ++i) out[i] = mask[i] ? 0 : 1;
    return out;
}

}  // namespace spectral
