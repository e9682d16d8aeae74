#pragma once

#include <cstdint>
#include <optional>

#include "spectral/image.hpp"
#include "spectral/morphology.hpp"

namespace spectral {

/// Explicit 4-neighbour Perona-Malik diffusion with exponential conductance
/// c(d) = exp(-(d/k)^2).
struct DiffusionParams {
    double k = 1.0;       ///< edge-magnitude threshold, > 0
    double lambda = 0.25; ///< step weight in (0, 0.25]
    int iterations = 15;

    void validate() const;
};

struct GhostRemovalParams {
    std::uint16_t binarize_threshold = 100;
    StructuringElement se{SeShape::Disk, 3};

    void validate() const;
};

struct BiasParams {
    /// Gain-field smoothing scale in pixels; unset means width / 8.
    std::optional<double> gain_sigma;
    /// Closing masked Gaussian smoothing; 0 disables it. Partial-volume values
    /// it creates at class edges can fill the histogram valley, so it is off
    /// by default.
    double final_sigma = 0.0;
    double epsilon = 1e-3;

    [[nodiscard]] double effective_gain_sigma(std::size_t width) const;
    void validate(std::size_t width) const;
};

struct PreprocessParams {
    GhostRemovalParams ghost;
    double lambda = 0.25;
    int iterations = 15;
    BiasParams bias;
    int speckle_window = 3;
};

struct GhostRemovalResult {
    GrayImage16 image;  ///< original intensities inside the body, 0 outside
    BinaryMask body;
};

/// body = open(binarize(image, t), se); throws NoForeground if it is empty.
GhostRemovalResult remove_ghost_artifacts(const GrayImage16& image, const GhostRemovalParams& params);

/// Automatic edge threshold k = 2 ln(m n) sqrt(mean) / std over the whole
/// image (population std). Throws DegenerateImage when std == 0.
double compute_k(const GrayImage16& image);

/// Replicated borders; iterations == 0 returns the input unchanged.
FloatImage diffuse(const FloatImage& image, const DiffusionParams& params);
FloatImage diffuse(const GrayImage16& image, const DiffusionParams& params);

/// Mean over every full window of (window std / window mean), skipping
/// windows whose mean is <= 0.
double speckle_index(const FloatImage& image, int window = 3);
/// As above, counting only windows that lie wholly inside `region`, so the
/// region's own boundary does not register as speckle.
double speckle_index(const FloatImage& image, const BinaryMask& region, int window = 3);

/// Gaussian smoothing restricted to the mask (normalised convolution).
/// Pixels outside the mask are excluded from every average and come out 0.
/// sigma == 0 only applies the mask. Kernel support is ceil(3 sigma).
FloatImage masked_gaussian(const FloatImage& image, const BinaryMask& mask, double sigma);

/// Quotient correction of a multiplicative gain field. The gain is estimated
/// by masked Gaussian smoothing at gain_sigma and normalised to mean one over
/// the body; the quotient is then rescaled so its body mean equals the
/// input's body mean before the final masked smoothing at final_sigma.
FloatImage correct_bias(const FloatImage& image, const BinaryMask& body, const BiasParams& params);

struct PreprocessResult {
    GrayImage16 image;  ///< rounded and clamped, 0 outside the body
    BinaryMask body;
    double k = 0.0;
    /// Speckle indices over windows inside the body.
    double speckle_before = 0.0;
    double speckle_after_diffusion = 0.0;
    double speckle_after = 0.0;
};

/// Ghost removal, automatic k, diffusion, then bias correction.
PreprocessResult preprocess_pipeline(const GrayImage16& image, const PreprocessParams& params);

}  // namespace spectral
