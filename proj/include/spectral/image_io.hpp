#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "spectral/image.hpp"

namespace spectral {

enum class ImageFormat { Pgm16, Png16 };

/// Parses "pgm16"/"pgm" or "png16"/"png".
ImageFormat parse_format(std::string_view name);
std::string_view format_name(ImageFormat format);

/// Guesses the format from a file extension (.pgm / .png).
std::optional<ImageFormat> format_from_path(const std::filesystem::path& path);

/// Sniffs the magic bytes ("P5" or the PNG signature).
std::optional<ImageFormat> detect_format(std::span<const std::uint8_t> bytes);

/// PGM: binary P5 with 256 <= maxval <= 65535, big-endian two-byte samples.
/// PNG: 16-bit greyscale, no alpha. 8-bit data of either kind is rejected.
GrayImage16 decode_image(std::span<const std::uint8_t> bytes, ImageFormat format);
std::vector<std::uint8_t> encode_image(const GrayImage16& image, ImageFormat format);

GrayImage16 read_image(const std::filesystem::path& path, ImageFormat format);
void write_image(const GrayImage16& image, const std::filesystem::path& path, ImageFormat format);

/// Masks are stored as 0 / 65535 intensities.
void write_image(const BinaryMask& mask, const std::filesystem::path& path, ImageFormat format);
GrayImage16 mask_to_gray(const BinaryMask& mask);
/// Any non-zero pixel becomes a set bit.
BinaryMask gray_to_mask(const GrayImage16& image);
BinaryMask read_mask(const std::filesystem::path& path, ImageFormat format);

std::vector<std::uint8_t> read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace spectral
