#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "spectral/error.hpp"

namespace spectral {

/// Upper bound on width*height accepted anywhere in the library.
inline constexpr std::size_t kMaxPixels = std::size_t{1} << 28;

/// Row-major 2-D raster. Dimensions are fixed at construction and the
/// sample vector always holds exactly width*height entries.
template <typename T>
class Raster {
public:
    using value_type = T;

    Raster() = default;

    Raster(std::size_t width, std::size_t height, T fill = T{})
        : width_(width), height_(height) {
        check_dims(width, height);
        data_.assign(width * height, fill);
    }

    Raster(std::size_t width, std::size_t height, std::vector<T> data)
        : width_(width), height_(height), data_(std::move(data)) {
        check_dims(width, height);
        if (data_.size() != width * height) {
            throw InvalidInput("raster payload has " + std::to_string(data_.size()) +
                               " samples, expected " + std::to_string(width * height));
        }
        if constexpr (std::is_floating_point_v<T>) {
            for (T v : data_) {
                if (!std::isfinite(v)) throw InvalidInput("non-finite sample in float raster");
            }
        }
    }

    [[nodiscard]] std::size_t width() const noexcept { return width_; }
    [[nodiscard]] std::size_t height() const noexcept { return height_; }
    [[nodiscard]] std::size_t size() const noexcept { return data_.size(); }
    [[nodiscard]] bool empty() const noexcept { return data_.empty(); }

    [[nodiscard]] const T& operator()(std::size_t x, std::size_t y) const noexcept {
        return data_[y * width_ + x];
    }
    [[nodiscard]] T& operator()(std::size_t x, std::size_t y) noexcept {
        return data_[y * width_ + x];
    }
    [[nodiscard]] const T& operator[](std::size_t i) const noexcept { return data_[i]; }
    [[nodiscard]] T& operator[](std::size_t i) noexcept { return data_[i]; }

    [[nodiscard]] std::span<const T> samples() const noexcept { return data_; }
    [[nodiscard]] std::span<T> samples() noexcept { return data_; }
    [[nodiscard]] const std::vector<T>& vector() const noexcept { return data_; }

    [[nodiscard]] bool same_shape(const auto& other) const noexcept {
        return width_ == other.width() && height_ == other.height();
    }

    friend bool operator==(const Raster&, const Raster&) = default;

private:
    static void check_dims(std::size_t w, std::size_t h) {
        if (w == 0 || h == 0) throw InvalidInput("image dimensions must be positive");
        if (w > kMaxPixels || h > kMaxPixels || w * h > kMaxPixels) {
            throw InvalidInput("image dimensions overflow (" + std::to_string(w) + "x" +
                               std::to_string(h) + ")");
        }
    }

    std::size_t width_ = 0;
    std::size_t height_ = 0;
    std::vector<T> data_;
};

/// 16-bit greyscale intensities.
using GrayImage16 = Raster<std::uint16_t>;
/// Real-valued working image used by diffusion and bias correction.
using FloatImage = Raster<double>;
/// One byte per pixel, 0 or 1.
using BinaryMask = Raster<std::uint8_t>;

struct ImageStats {
    double mean = 0.0;
    double std = 0.0;  ///< population standard deviation (divides by N)
    std::uint16_t min = 0;
    std::uint16_t max = 0;
};

/// Mean, population standard deviation and range over every pixel.
ImageStats image_stats(const GrayImage16& image);

FloatImage to_float(const GrayImage16& image);

/// Rounds to nearest and clamps into [0, 65535].
GrayImage16 to_gray16(const FloatImage& image);

/// Pixels outside the mask are set to zero.
GrayImage16 apply_mask(const GrayImage16& image, const BinaryMask& mask);

std::size_t count_set(const BinaryMask& mask);
BinaryMask complement(const BinaryMask& mask);

}  // namespace spectral
