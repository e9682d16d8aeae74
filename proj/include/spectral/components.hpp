#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "spectral/image.hpp"

namespace spectral {

struct BoundingBox {
    std::size_t x0 = 0;
    std::size_t y0 = 0;
    std::size_t x1 = 0;  ///< inclusive
    std::size_t y1 = 0;  ///< inclusive

    friend bool operator==(const BoundingBox&, const BoundingBox&) = default;
};

struct Component {
    int label = 0;
    std::size_t pixel_count = 0;
    BoundingBox bbox;
    double centroid_x = 0.0;
    double centroid_y = 0.0;
};

using LabelImage = Raster<std::int32_t>;

struct Labeling {
    LabelImage labels;  ///< 0 = background, otherwise Component::label
    std::vector<Component> components;
};

/// 4-connected labelling. Labels are assigned 1..n in raster order of each
/// component's first pixel.
Labeling label_components(const BinaryMask& mask);

}  // namespace spectral
