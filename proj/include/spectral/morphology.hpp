#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "spectral/image.hpp"

namespace spectral {

enum class SeShape { Disk, Square, Cross };

SeShape parse_se_shape(std::string_view name);
std::string_view se_shape_name(SeShape shape);

/// Symmetric footprint centred on the origin.
///   disk:   dx^2 + dy^2 <= r^2
///   square: max(|dx|, |dy|) <= r
///   cross:  dx == 0 or dy == 0, with max(|dx|, |dy|) <= r
struct StructuringElement {
    SeShape shape = SeShape::Disk;
    int radius = 3;

    StructuringElement() = default;
    StructuringElement(SeShape s, int r);

    struct Offset {
        int dx;
        int dy;
    };
    [[nodiscard]] std::vector<Offset> offsets() const;
};

/// Set iff pixel >= threshold.
BinaryMask binarize(const GrayImage16& image, std::uint16_t threshold);

/// Out-of-image footprint positions count as unset, so erosion clears a
/// band of width `radius` along the image border.
BinaryMask erode(const BinaryMask& mask, const StructuringElement& se);
BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se);

/// dilate(erode(mask)).
BinaryMask open(const BinaryMask& mask, const StructuringElement& se);

}  // namespace spectral
