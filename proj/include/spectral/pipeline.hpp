#pragma once

#include <filesystem>
#include <optional>
#include <string_view>

#include "spectral/image_io.hpp"
#include "spectral/loft.hpp"
#include "spectral/metrics.hpp"
#include "spectral/preprocess.hpp"
#include "spectral/serialize.hpp"

namespace spectral {

enum class Mode { Tissue, Lesion };

Mode parse_mode(std::string_view name);
std::string_view mode_name(Mode mode);

/// Every parameter of one segmentation run. Shared by the command line and
/// the HTTP service so both produce identical results.
struct RunConfig {
    Mode mode = Mode::Tissue;
    /// Input is already preprocessed; the body is taken as its non-zero pixels.
    bool pre_done = false;
    PreprocessParams preprocess;
    /// Tissue mode only; unset means default_bounds().
    std::optional<LoftBounds> bounds;
    int smooth_window = 5;
    /// Lesion mode only.
    std::size_t min_area = 10;

    void validate() const;
    [[nodiscard]] LoftBounds effective_bounds() const;
};

struct RunResult {
    Mode mode = Mode::Tissue;
    GrayImage16 preprocessed;
    BinaryMask body;
    BinaryMask mask;
    ThresholdResult threshold;
    IntensityHistogram histogram;
    std::optional<LesionReport> lesions;
    double preprocess_ms = 0.0;
    double segment_ms = 0.0;
};

/// Preprocessing (unless pre_done) followed by the mode's segmentation.
/// Throws NoLoftFound carrying the searched histogram.
RunResult run_segmentation(const GrayImage16& image, const RunConfig& config);

/// The "spectral.params/1" document: every effective parameter of a run.
Json params_to_json(const RunConfig& config, std::size_t image_width);
/// Missing keys keep their defaults; unknown keys are rejected. A
/// preprocess.gain_sigma of null means width / 8.
RunConfig params_from_json(const Json& j);

/// Mode-specific overrides as accepted by the service ("lo", "hi",
/// "smooth_window", "min_area", "pre_done" and the preprocess keys).
RunConfig apply_overrides(RunConfig config, const Json& overrides);

}  // namespace spectral
