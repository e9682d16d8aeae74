#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "spectral/image.hpp"

namespace spectral {

/// xoshiro256** seeded through SplitMix64. Fixed algorithm, so phantoms are
/// reproducible on any platform for a given seed.
class Xoshiro256 {
public:
    explicit Xoshiro256(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform in [0, 1) with 53 random bits.
    double uniform();
    /// Standard normal by Box-Muller (one draw per call, second value dropped).
    double normal();

private:
    std::uint64_t s_[4];
};

enum class ClassDistribution { Gaussian, Uniform };

ClassDistribution parse_distribution(std::string_view name);
std::string_view distribution_name(ClassDistribution d);

/// Marginal intensity law of one tissue class. A uniform class spans
/// mean +- sigma*sqrt(3), so sigma is its standard deviation either way.
struct ClassSpec {
    double mean = 0.0;
    double sigma = 0.0;
    ClassDistribution distribution = ClassDistribution::Gaussian;
};

struct EllipseSpec {
    double cx = 0.0;
    double cy = 0.0;
    double rx = 0.0;
    double ry = 0.0;
};

/// `area` pixels nearest to (cx, cy) at a flat intensity.
struct LesionBlob {
    double cx = 0.0;
    double cy = 0.0;
    std::size_t area = 0;
    double intensity = 0.0;
};

enum class DarkLayout { None, Checker };

DarkLayout parse_layout(std::string_view name);
std::string_view layout_name(DarkLayout layout);

struct PhantomSpec {
    std::size_t width = 448;
    std::size_t height = 448;
    /// Unset: centred, semi-axes 0.45 * width and 0.38 * height.
    std::optional<EllipseSpec> body;

    ClassSpec dark{450.0, 60.0};
    ClassSpec bright{1100.0, 80.0};
    /// Spatial arrangement of the dark class inside the body. `Checker` tiles
    /// cells of `cell_size` pixels with a seed-dependent phase.
    DarkLayout layout = DarkLayout::Checker;
    std::size_t cell_size = 48;
    /// Correlation length (Gaussian sigma, pixels) of the class texture;
    /// 0 gives independent pixels. Marginal class laws are unaffected.
    double texture_sigma = 2.0;

    std::vector<LesionBlob> lesions;

    /// Multiplicative noise factor drawn uniformly from [1 - noise, 1 + noise].
    double noise = 0.0;
    /// Gain ramp from left to right edge.
    double gain_min = 1.0;
    double gain_max = 1.0;

    /// Isolated single-pixel specks outside the body.
    std::size_t ghost_specks = 0;
    double ghost_intensity = 150.0;

    std::optional<std::uint64_t> seed;

    [[nodiscard]] EllipseSpec effective_body() const;
    void validate() const;
};

struct Phantom {
    GrayImage16 image;
    BinaryMask body;
    BinaryMask dark_class;  ///< excludes lesion pixels
    BinaryMask lesions;
};

/// Deterministic for a fixed seed; throws InvalidInput for an invalid spec
/// (including a missing seed).
Phantom generate(const PhantomSpec& spec);

}  // namespace spectral
