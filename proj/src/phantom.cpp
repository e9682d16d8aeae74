#include "spectral/phantom.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace spectral {

namespace {

std::uint64_t splitmix64(std::uint64_t& x) {
    std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

Xoshiro256::Xoshiro256(std::uint64_t seed) {
    for (auto& s : s_) s = splitmix64(seed);
}

std::uint64_t Xoshiro256::next() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double Xoshiro256::uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

double Xoshiro256::normal() {
    const double u1 = 1.0 - uniform();  // (0, 1]
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

ClassDistribution parse_distribution(std::string_view name) {
    if (name == "gaussian") return ClassDistribution::Gaussian;
    if (name == "uniform") return ClassDistribution::Uniform;
    throw InvalidInput("unknown class distribution '" + std::string(name) + "'");
}

std::string_view distribution_name(ClassDistribution d) {
    return d == ClassDistribution::Gaussian ? "gaussian" : "uniform";
}

DarkLayout parse_layout(std::string_view name) {
    if (name == "none") return DarkLayout::None;
    if (name == "checker") return DarkLayout::Checker;
    throw InvalidInput("unknown dark-class layout '" + std::string(name) + "'");
}

std::string_view layout_name(DarkLayout layout) { return layout == DarkLayout::None ? "none" : "checker"; }

EllipseSpec PhantomSpec::effective_body() const {
    if (body) return *body;
    const double w = static_cast<double>(width);
    const double h = static_cast<double>(height);
    return {(w - 1.0) / 2.0, (h - 1.0) / 2.0, 0.45 * w, 0.38 * h};
}

void PhantomSpec::validate() const {
    if (!seed) throw InvalidInput("phantom spec requires an explicit seed");
    if (width == 0 || height == 0 || width * height > kMaxPixels) throw InvalidInput("invalid phantom dimensions");
    const EllipseSpec e = effective_body();
    if (!(e.rx > 0.0 && e.ry > 0.0)) throw InvalidInput("body ellipse semi-axes must be positive");
    for (const ClassSpec* c : {&dark, &bright}) {
        if (!(c->sigma >= 0.0) || !(c->mean >= 0.0)) throw InvalidInput("class mean and sigma must be >= 0");
    }
    if (layout == DarkLayout::Checker) {
        if (cell_size == 0) throw InvalidInput("checker cell size must be >= 1");
        if (!(std::abs(bright.mean - dark.mean) > 3.0 * (dark.sigma + bright.sigma))) {
            throw InvalidInput("class means must be separated by more than 3 * (sigma_dark + sigma_bright)");
        }
    }
    if (!(texture_sigma >= 0.0)) throw InvalidInput("texture sigma must be >= 0");
    if (!(noise >= 0.0 && noise < 1.0)) throw InvalidInput("noise half-width must lie in [0, 1)");
    if (!(gain_min > 0.0 && gain_max > 0.0)) throw InvalidInput("gain ramp must be positive");
    if (!(ghost_intensity >= 0.0 && ghost_intensity <= 65535.0)) throw InvalidInput("ghost intensity out of range");
    for (const auto& l : lesions) {
        if (l.area == 0) throw InvalidInput("lesion area must be >= 1");
        if (!(l.intensity >= 0.0)) throw InvalidInput("lesion intensity must be >= 0");
    }
}

namespace {

// Unit-variance texture: white noise filtered by a normalised Gaussian and
// divided by the kernel's L2 norm. The noise is drawn over a padded canvas so
// the variance does not drop near the image border.
std::vector<double> texture_field(Xoshiro256& rng, std::size_t w, std::size_t h, double sigma) {
    if (sigma <= 0.0) {
        std::vector<double> z(w * h);
        for (double& v : z) v = rng.normal();
        return z;
    }
    const std::size_t r = static_cast<std::size_t>(std::ceil(3.0 * sigma));
    std::vector<double> k(2 * r + 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        const double d = static_cast<double>(i) - static_cast<double>(r);
        k[i] = std::exp(-0.5 * d * d / (sigma * sigma));
        sum += k[i];
    }
    double sq = 0.0;
    for (double& v : k) {
        v /= sum;
        sq += v * v;
    }
    // the 2-D separable kernel has squared L2 norm sq^2
    const double norm = 1.0 / sq;

    const std::size_t pw = w + 2 * r;
    const std::size_t ph = h + 2 * r;
    std::vector<double> white(pw * ph);
    for (double& v : white) v = rng.normal();

    std::vector<double> horiz(w * ph);
    for (std::size_t y = 0; y < ph; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::size_t t = 0; t < k.size(); ++t) s += k[t] * white[y * pw + x + t];
            horiz[y * w + x] = s;
        }
    }
    std::vector<double> out(w * h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            double s = 0.0;
            for (std::size_t t = 0; t < k.size(); ++t) s += k[t] * horiz[(y + t) * w + x];
            out[y * w + x] = s * norm;
        }
    }
    return out;
}

double class_value(const ClassSpec& c, double z) {
    if (c.distribution == ClassDistribution::Gaussian) return c.mean + c.sigma * z;
    const double u = 0.5 * std::erfc(-z / std::numbers::sqrt2);  // Phi(z)
    return c.mean + c.sigma * std::numbers::sqrt3 * (2.0 * u - 1.0);
}

std::vector<std::size_t> blob_pixels(const LesionBlob& blob, std::size_t w, std::size_t h) {
    const long reach = static_cast<long>(std::ceil(std::sqrt(static_cast<double>(blob.area) / std::numbers::pi))) + 3;
    const long cx = std::lround(blob.cx);
    const long cy = std::lround(blob.cy);
    struct Cand {
        double d2;
        std::size_t index;
    };
    std::vector<Cand> cands;
    for (long y = cy - reach; y <= cy + reach; ++y) {
        for (long x = cx - reach; x <= cx + reach; ++x) {
            if (x < 0 || y < 0 || x >= static_cast<long>(w) || y >= static_cast<long>(h)) continue;
            const double dx = static_cast<double>(x) - blob.cx;
            const double dy = static_cast<double>(y) - blob.cy;
            cands.push_back({dx * dx + dy * dy, static_cast<std::size_t>(y) * w + static_cast<std::size_t>(x)});
        }
    }
    if (cands.size() < blob.area) throw InvalidInput("lesion blob does not fit inside the image");
    std::ranges::sort(cands, [](const Cand& a, const Cand& b) {
        return a.d2 != b.d2 ? a.d2 < b.d2 : a.index < b.index;
    });
    std::vector<std::size_t> out(blob.area);
    for (std::size_t i = 0; i < blob.area; ++i) out[i] = cands[i].index;
    return out;
}

}  // namespace

Phantom generate(const PhantomSpec& spec) {
    spec.validate();
    const std::size_t w = spec.width;
    const std::size_t h = spec.height;
    Xoshiro256 rng(*spec.seed);

    const EllipseSpec e = spec.effective_body();
    BinaryMask body(w, h);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double nx = (static_cast<double>(x) - e.cx) / e.rx;
            const double ny = (static_cast<double>(y) - e.cy) / e.ry;
            body(x, y) = nx * nx + ny * ny <= 1.0 ? 1 : 0;
        }
    }

    // Draw order is part of the reproducibility contract: phase, dark
    // texture, bright texture, noise, ghosts.
    const std::size_t phase_x = static_cast<std::size_t>(rng.next() % std::max<std::size_t>(spec.cell_size, 1));
    const std::size_t phase_y = static_cast<std::size_t>(rng.next() % std::max<std::size_t>(spec.cell_size, 1));
    const std::vector<double> dark_z = texture_field(rng, w, h, spec.texture_sigma);
    const std::vector<double> bright_z = texture_field(rng, w, h, spec.texture_sigma);

    BinaryMask lesions(w, h);
    std::vector<double> lesion_value(w * h, 0.0);
    for (const auto& blob : spec.lesions) {
        for (std::size_t i : blob_pixels(blob, w, h)) {
            if (!body[i]) throw InvalidInput("lesion blob extends outside the body");
            lesions[i] = 1;
            lesion_value[i] = blob.intensity;
        }
    }

    BinaryMask dark(w, h);
    std::vector<std::uint16_t> px(w * h, 0);
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const std::size_t i = y * w + x;
            const double u = 1.0 + spec.noise * (2.0 * rng.uniform() - 1.0);
            if (!body[i]) continue;
            const bool is_dark = spec.layout == DarkLayout::Checker &&
                                 ((x + phase_x) / spec.cell_size + (y + phase_y) / spec.cell_size) % 2 == 0;
            double t;
            if (lesions[i]) {
                t = lesion_value[i];
            } else if (is_dark) {
                dark[i] = 1;
                t = class_value(spec.dark, dark_z[i]);
            } else {
                t = class_value(spec.bright, bright_z[i]);
            }
            const double g = w > 1 ? spec.gain_min + (spec.gain_max - spec.gain_min) * static_cast<double>(x) /
                                                         static_cast<double>(w - 1)
                                   : spec.gain_min;
            px[i] = static_cast<std::uint16_t>(std::clamp(std::round(t * g * u), 0.0, 65535.0));
        }
    }

    const auto ghost = static_cast<std::uint16_t>(std::clamp(std::round(spec.ghost_intensity), 0.0, 65535.0));
    const std::size_t outside = w * h - count_set(body);
    for (std::size_t n = 0; outside > 0 && n < spec.ghost_specks;) {
        const std::size_t i = static_cast<std::size_t>(rng.next() % (w * h));
        if (body[i]) continue;
        px[i] = ghost;
        ++n;
    }

    return {GrayImage16(w, h, std::move(px)), std::move(body), std::move(dark), std::move(lesions)};
}

}  // namespace spectral
