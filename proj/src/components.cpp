#include "spectral/components.hpp"

#include <algorithm>
#include <numeric>

namespace spectral {

namespace {

class DisjointSet {
public:
    std::int32_t make() {
        parent_.push_back(static_cast<std::int32_t>(parent_.size()));
        return parent_.back();
    }
    std::int32_t find(std::int32_t a) {
        while (parent_[a] != a) {
            parent_[a] = parent_[parent_[a]];
            a = parent_[a];
        }
        return a;
    }
    void unite(std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        // keep the smaller (earlier) root so raster order survives
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::int32_t> parent_;
};

}  // namespace

Labeling label_components(const BinaryMask& mask) {
    const std::size_t w = mask.width();
    const std::size_t h = mask.height();
    LabelImage provisional(w, h, -1);
    DisjointSet sets;

    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            if (!mask(x, y)) continue;
            const std::int32_t left = x > 0 ? provisional(x - 1, y) : -1;
            const std::int32_t up = y > 0 ? provisional(x, y - 1) : -1;
            if (left < 0 && up < 0) {
                provisional(x, y) = sets.make();
            } else if (left >= 0 && up >= 0) {
                sets.unite(left, up);
                provisional(x, y) = std::min(left, up);
            } else {
                provisional(x, y) = std::max(left, up);
            }
        }
    }

    Labeling out{LabelImage(w, h, 0), {}};
    std::vector<std::int32_t> final_label;
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const std::int32_t p = provisional(x, y);
            if (p < 0) continue;
            const std::int32_t root = sets.find(p);
            if (static_cast<std::size_t>(root) >= final_label.size()) final_label.resize(root + 1, 0);
            if (final_label[root] == 0) {
                out.components.push_back({static_cast<int>(out.components.size() + 1), 0, {x, y, x, y}, 0.0, 0.0});
                final_label[root] = static_cast<std::int32_t>(out.components.size());
            }
            const std::int32_t label = final_label[root];
            out.labels(x, y) = label;
            Component& c = out.components[label - 1];
            c.pixel_count += 1;
            c.bbox.x0 = std::min(c.bbox.x0, x);
            c.bbox.y0 = std::min(c.bbox.y0, y);
            c.bbox.x1 = std::max(c.bbox.x1, x);
            c.bbox.y1 = std::max(c.bbox.y1, y);
            c.centroid_x += static_cast<double>(x);
            c.centroid_y += static_cast<double>(y);
        }
    }
    for (auto& c : out.components) {
        c.centroid_x /= static_cast<double>(c.pixel_count);
        c.centroid_y /= static_cast<double>(c.pixel_count);
    }
    return out;
}

}  // namespace spectral
