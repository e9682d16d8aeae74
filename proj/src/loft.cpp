#include "spectral/loft.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace spectral {

IntensityHistogram::IntensityHistogram(std::vector<std::uint64_t> counts) : counts_(std::move(counts)) {
    if (counts_.size() != kHistogramBins) throw InvalidInput("histogram must have 65536 bins");
    total_ = std::accumulate(counts_.begin(), counts_.end(), std::uint64_t{0});
}

std::optional<std::uint16_t> IntensityHistogram::max_intensity() const {
    for (std::size_t i = kHistogramBins; i-- > 0;) {
        if (counts_[i]) return static_cast<std::uint16_t>(i);
    }
    return std::nullopt;
}

IntensityHistogram histogram(const GrayImage16& image) {
    std::vector<std::uint64_t> counts(kHistogramBins, 0);
    for (auto v : image.samples()) ++counts[v];
    return IntensityHistogram(std::move(counts));
}

IntensityHistogram histogram(const GrayImage16& image, const BinaryMask& mask) {
    if (!image.same_shape(mask)) throw InvalidInput("mask shape differs from image");
    std::vector<std::uint64_t> counts(kHistogramBins, 0);
    for (std::size_t i = 0; i < image.size(); ++i) {
        if (mask[i]) ++counts[image[i]];
    }
    return IntensityHistogram(std::move(counts));
}

IntensityHistogram smooth_histogram(const IntensityHistogram& h, int window) {
    if (window < 1 || window % 2 == 0) throw InvalidInput("smoothing window must be an odd integer >= 1");
    if (window == 1) return h;
    const auto& c = h.counts();
    const std::size_t n = c.size();
    std::vector<std::uint64_t> prefix(n + 1, 0);
    for (std::size_t i = 0; i < n; ++i) prefix[i + 1] = prefix[i] + c[i];

    const std::size_t r = static_cast<std::size_t>(window / 2);
    std::vector<std::uint64_t> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t a = i >= r ? i - r : 0;
        const std::size_t b = std::min(n, i + r + 1);
        const std::uint64_t sum = prefix[b] - prefix[a];
        const std::uint64_t len = b - a;
        // round half up in exact integer arithmetic
        out[i] = (2 * sum + len) / (2 * len);
    }
    return IntensityHistogram(std::move(out));
}

void LoftBounds::validate() const {
    if (!(lo < hi)) {
        throw InvalidInput("loft bounds require lo < hi (got " + std::to_string(lo) + ", " + std::to_string(hi) + ")");
    }
}

LoftBounds default_bounds(std::uint16_t bit_depth_max) {
    if (bit_depth_max < 255) throw InvalidInput("bit depth maximum must be >= 255");
    const double scale = static_cast<double>(bit_depth_max) / 65535.0;
    long lo = std::lround(300.0 * scale);
    long hi = std::lround(800.0 * scale);
    lo = std::max(lo, 1L);
    hi = std::max(hi, lo + 2);
    return {static_cast<std::uint16_t>(lo), static_cast<std::uint16_t>(hi)};
}

NoLoftFound::NoLoftFound(LoftBounds bounds, std::shared_ptr<const IntensityHistogram> hist)
    : Error("no loft found in [" + std::to_string(bounds.lo) + "," + std::to_string(bounds.hi) + "]"),
      bounds_(bounds),
      hist_(std::move(hist)) {}

ThresholdResult find_loft(const IntensityHistogram& h, LoftBounds bounds, int window) {
    bounds.validate();
    const IntensityHistogram smoothed = smooth_histogram(h, window);
    const auto& c = smoothed.counts();
    const std::size_t n = c.size();

    ThresholdResult result;
    result.smoothing_window = window;
    result.bounds = bounds;

    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j + 1 < n && c[j + 1] == c[i]) ++j;
        if (i > 0 && j + 1 < n && c[i - 1] > c[i] && c[j + 1] > c[i]) {
            const std::size_t centre = (i + j) / 2;
            if (centre > bounds.lo && centre < bounds.hi) {
                result.candidates.push_back({static_cast<std::uint16_t>(centre), c[i]});
            }
        }
        if (j >= bounds.hi) break;
        i = j + 1;
    }
    if (result.candidates.empty()) throw NoLoftFound(bounds);

    // candidates are in increasing intensity, so the first minimum wins ties
    const auto best = std::ranges::min_element(result.candidates, {}, &LoftCandidate::count);
    result.threshold = best->intensity;
    return result;
}

BinaryMask tissue_mask(const GrayImage16& image, const BinaryMask& body, std::uint16_t threshold) {
    if (!image.same_shape(body)) throw InvalidInput("body mask shape differs from image");
    BinaryMask out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) {
        out[i] = (body[i] && image[i] > 0 && image[i] <= threshold) ? 1 : 0;
    }
    return out;
}

BinaryMask lesion_mask(const GrayImage16& image, const BinaryMask& body, std::uint16_t threshold) {
    if (!image.same_shape(body)) throw InvalidInput("body mask shape differs from image");
    BinaryMask out(image.width(), image.height());
    for (std::size_t i = 0; i < image.size(); ++i) out[i] = (body[i] && image[i] > threshold) ? 1 : 0;
    return out;
}

namespace {

[[noreturn]] void rethrow_with_histogram(const NoLoftFound& e, IntensityHistogram hist) {
    throw NoLoftFound(e.bounds(), std::make_shared<const IntensityHistogram>(std::move(hist)));
}

}  // namespace

TissueSegmentation segment_tissue(const GrayImage16& preprocessed, const BinaryMask& body, LoftBounds bounds,
                                  int window) {
    IntensityHistogram hist = histogram(preprocessed, body);
    ThresholdResult t;
    try {
        t = find_loft(hist, bounds, window);
    } catch (const NoLoftFound& e) {
        rethrow_with_histogram(e, std::move(hist));
    }
    BinaryMask mask = tissue_mask(preprocessed, body, t.threshold);
    return {std::move(mask), std::move(t), std::move(hist)};
}

TissueSegmentation segment_tissue(const GrayImage16& image, const PreprocessParams& params, LoftBounds bounds,
                                  int window) {
    const PreprocessResult pre = preprocess_pipeline(image, params);
    return segment_tissue(pre.image, pre.body, bounds, window);
}

LesionSegmentation segment_lesion(const GrayImage16& preprocessed, const BinaryMask& body, int window,
                                  std::size_t min_area) {
    IntensityHistogram hist = histogram(preprocessed, body);
    const std::uint16_t top = hist.max_intensity().value_or(0);
    const LoftBounds bounds{1, static_cast<std::uint16_t>(top > 0 ? top - 1 : 0)};
    ThresholdResult t;
    try {
        if (!(bounds.lo < bounds.hi)) throw NoLoftFound(bounds);
        t = find_loft(hist, bounds, window);
    } catch (const NoLoftFound& e) {
        rethrow_with_histogram(e, std::move(hist));
    }

    const Labeling labeling = label_components(lesion_mask(preprocessed, body, t.threshold));
    std::vector<Component> kept;
    for (const auto& c : labeling.components) {
        if (c.pixel_count >= min_area) kept.push_back(c);
    }
    // "sequential" extraction: largest first, raster order among equals
    std::ranges::stable_sort(kept, std::greater<>{}, &Component::pixel_count);

    std::vector<std::int32_t> relabel(labeling.components.size() + 1, 0);
    for (std::size_t i = 0; i < kept.size(); ++i) {
        relabel[kept[i].label] = static_cast<std::int32_t>(i + 1);
        kept[i].label = static_cast<int>(i + 1);
    }
    BinaryMask mask(preprocessed.width(), preprocessed.height());
    for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = relabel[labeling.labels[i]] > 0 ? 1 : 0;

    LesionReport report{t.threshold, std::move(kept), min_area};
    return {std::move(report), std::move(mask), std::move(t), std::move(hist)};
}

LesionSegmentation segment_lesion(const GrayImage16& image, const PreprocessParams& params, int window,
                                  std::size_t min_area) {
    const PreprocessResult pre = preprocess_pipeline(image, params);
    return segment_lesion(pre.image, pre.body, window, min_area);
}

}  // namespace spectral
