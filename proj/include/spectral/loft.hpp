#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "spectral/components.hpp"
#include "spectral/error.hpp"
#include "spectral/image.hpp"
#include "spectral/preprocess.hpp"

namespace spectral {

inline constexpr std::size_t kHistogramBins = 65536;

/// One bin per 16-bit intensity.
class IntensityHistogram {
public:
    IntensityHistogram() : counts_(kHistogramBins, 0) {}
    explicit IntensityHistogram(std::vector<std::uint64_t> counts);

    [[nodiscard]] std::uint64_t operator[](std::size_t intensity) const noexcept { return counts_[intensity]; }
    [[nodiscard]] const std::vector<std::uint64_t>& counts() const noexcept { return counts_; }
    [[nodiscard]] std::uint64_t total() const noexcept { return total_; }

    /// Highest intensity with a non-zero count, or nullopt when empty.
    [[nodiscard]] std::optional<std::uint16_t> max_intensity() const;

    friend bool operator==(const IntensityHistogram&, const IntensityHistogram&) = default;

private:
    std::vector<std::uint64_t> counts_;
    std::uint64_t total_ = 0;
};

IntensityHistogram histogram(const GrayImage16& image);
IntensityHistogram histogram(const GrayImage16& image, const BinaryMask& mask);

/// Centred moving average whose window shrinks at both ends, rounded to the
/// nearest integer. The total of the result need not match the input total.
IntensityHistogram smooth_histogram(const IntensityHistogram& h, int window);

/// Empirical search interval; minima are accepted strictly inside (lo, hi).
struct LoftBounds {
    std::uint16_t lo = 300;
    std::uint16_t hi = 800;

    void validate() const;
    friend bool operator==(const LoftBounds&, const LoftBounds&) = default;
};

/// Bounds 300/800 rescaled linearly from the 16-bit range to `bit_depth_max`,
/// floored so lo >= 1 and hi >= lo + 2.
LoftBounds default_bounds(std::uint16_t bit_depth_max = 65535);

struct LoftCandidate {
    std::uint16_t intensity = 0;
    std::uint64_t count = 0;  ///< smoothed count

    friend bool operator==(const LoftCandidate&, const LoftCandidate&) = default;
};

struct ThresholdResult {
    std::uint16_t threshold = 0;
    std::vector<LoftCandidate> candidates;
    int smoothing_window = 1;
    LoftBounds bounds;
};

class NoLoftFound : public Error {
public:
    NoLoftFound(LoftBounds bounds, std::shared_ptr<const IntensityHistogram> hist = nullptr);

    [[nodiscard]] LoftBounds bounds() const noexcept { return bounds_; }
    /// The (unsmoothed) histogram that was searched, when available.
    [[nodiscard]] const std::shared_ptr<const IntensityHistogram>& histogram() const noexcept { return hist_; }

private:
    LoftBounds bounds_;
    std::shared_ptr<const IntensityHistogram> hist_;
};

/// Local minima of the window-smoothed histogram inside (lo, hi).
///
/// A minimum is a maximal run of equal smoothed counts whose neighbours on
/// both sides are strictly greater; the run contributes its centre bin
/// (lower middle for even lengths). Runs touching either end of the
/// intensity range are never minima. The threshold is the candidate with the
/// smallest smoothed count, ties going to the lowest intensity.
ThresholdResult find_loft(const IntensityHistogram& h, LoftBounds bounds, int window);

/// Pixels with 0 < v <= threshold inside the body.
BinaryMask tissue_mask(const GrayImage16& image, const BinaryMask& body, std::uint16_t threshold);
/// Pixels with v > threshold inside the body.
BinaryMask lesion_mask(const GrayImage16& image, const BinaryMask& body, std::uint16_t threshold);

struct TissueSegmentation {
    BinaryMask mask;  ///< fibroglandular (low-intensity) class
    ThresholdResult threshold;
    IntensityHistogram histogram;
};

/// Segments an already preprocessed image. Throws NoLoftFound with the
/// histogram attached.
TissueSegmentation segment_tissue(const GrayImage16& preprocessed, const BinaryMask& body, LoftBounds bounds,
                                  int window);
/// Runs the full preprocessing chain first.
TissueSegmentation segment_tissue(const GrayImage16& image, const PreprocessParams& params, LoftBounds bounds,
                                  int window);

struct LesionReport {
    std::uint16_t threshold = 0;
    std::vector<Component> components;  ///< by decreasing pixel count, relabelled 1..n
    std::size_t min_area_applied = 0;
};

struct LesionSegmentation {
    LesionReport report;
    BinaryMask mask;  ///< union of the reported components
    ThresholdResult threshold;
    IntensityHistogram histogram;
};

/// Search bounds are (1, max intensity in body - 1); the lesion class is the
/// bright side of the threshold. Components below min_area are dropped.
LesionSegmentation segment_lesion(const GrayImage16& preprocessed, const BinaryMask& body, int window,
                                  std::size_t min_area);
LesionSegmentation segment_lesion(const GrayImage16& image, const PreprocessParams& params, int window,
                                  std::size_t min_area);

}  // namespace spectral
