#include "spectral/morphology.hpp"

#include <algorithm>
#include <string>

namespace spectral {

SeShape parse_se_shape(std::string_view name) {
    if (name == "disk") return SeShape::Disk;
    if (name == "square") return SeShape::Square;
    if (name == "cross") return SeShape::Cross;
    throw InvalidInput("unknown structuring element shape '" + std::string(name) + "'");
}

std::string_view se_shape_name(SeShape shape) {
    switch (shape) {
        case SeShape::Disk: return "disk";
        case SeShape::Square: return "square";
        case SeShape::Cross: return "cross";
    }
    return "disk";
}

StructuringElement::StructuringElement(SeShape s, int r) : shape(s), radius(r) {
    if (r < 1) throw InvalidInput("structuring element radius must be >= 1");
}

std::vector<StructuringElement::Offset> StructuringElement::offsets() const {
    std::vector<Offset> out;
    for (int dy = -radius; dy <= radius; ++dy) {
        for (int dx = -radius; dx <= radius; ++dx) {
            bool in = false;
            switch (shape) {
                case SeShape::Disk: in = dx * dx + dy * dy <= radius * radius; break;
                case SeShape::Square: in = true; break;
                case SeShape::Cross: in = dx == 0 || dy == 0; break;
            }
            if (in) out.push_back({dx, dy});
        }
    }
    return out;
}

BinaryMask binarize(const GrayImage16& image, std::uint16_t threshold) {
    BinaryMask out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) out[i] = image[i] >= threshold ? 1 : 0;
    return out;
}

namespace {

// The footprint is decomposed into horizontal runs so each output pixel
// costs one probe per footprint row into a prefix-sum row.
struct RowRun {
    int dy;
    int x0;
    int x1;  // inclusive
};

std::vector<RowRun> row_runs(const StructuringElement& se) {
    std::vector<RowRun> runs;
    for (const auto& o : se.offsets()) {
        if (!runs.empty() && runs.back().dy == o.dy && runs.back().x1 + 1 == o.dx) {
            runs.back().x1 = o.dx;
        } else {
            runs.push_back({o.dy, o.dx, o.dx});
        }
    }
    return runs;
}

// Per row prefix counts of set pixels, with one leading zero per row.
std::vector<std::uint32_t> row_prefix(const BinaryMask& mask) {
    const std::size_t w = mask.width();
    std::vector<std::uint32_t> pre((w + 1) * mask.height(), 0);
    for (std::size_t y = 0; y < mask.height(); ++y) {
        std::uint32_t* row = pre.data() + y * (w + 1);
        for (std::size_t x = 0; x < w; ++x) row[x + 1] = row[x] + (mask(x, y) ? 1u : 0u);
    }
    return pre;
}

template <bool Erode>
BinaryMask morph(const BinaryMask& mask, const StructuringElement& se) {
    const auto runs = row_runs(se);
    const auto pre = row_prefix(mask);
    const long w = static_cast<long>(mask.width());
    const long h = static_cast<long>(mask.height());
    BinaryMask out(mask.width(), mask.height());

    for (long y = 0; y < h; ++y) {
        for (long x = 0; x < w; ++x) {
            bool result = Erode;
            for (const auto& r : runs) {
                const long yy = y + r.dy;
                long a = x + r.x0;
                long b = x + r.x1;
                if (yy < 0 || yy >= h || a < 0 || b >= w) {
                    if constexpr (Erode) {
                        // part of the footprint leaves the image
                        result = false;
                        break;
                    }
                    if (yy < 0 || yy >= h) continue;
                    a = std::max(a, 0L);
                    b = std::min(b, w - 1);
                    if (a > b) continue;
                }
                const std::uint32_t* row = pre.data() + yy * (w + 1);
                const std::uint32_t set = row[b + 1] - row[a];
                if constexpr (Erode) {
                    if (set != static_cast<std::uint32_t>(b - a + 1)) {
                        result = false;
                        break;
                    }
                } else if (set > 0) {
                    result = true;
                    break;
                }
            }
            out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = result ? 1 : 0;
        }
    }
    return out;
}

}  // namespace

BinaryMask erode(const BinaryMask& mask, const StructuringElement& se) { return morph<true>(mask, se); }

BinaryMask dilate(const BinaryMask& mask, const StructuringElement& se) { return morph<false>(mask, se); }

BinaryMask open(const BinaryMask& mask, const StructuringElement& se) { return dilate(erode(mask, se), se); }

}  // namespace spectral
