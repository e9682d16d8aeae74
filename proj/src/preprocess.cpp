#include "spectral/preprocess.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace spectral {

void DiffusionParams::validate() const {
    if (!(k > 0.0) || !std::isfinite(k)) throw InvalidInput("diffusion k must be a positive finite number");
    if (!(lambda > 0.0 && lambda <= 0.25)) throw InvalidInput("diffusion lambda must lie in (0, 0.25]");
    if (iterations < 0) throw InvalidInput("diffusion iterations must be >= 0");
}

void GhostRemovalParams::validate() const {
    if (binarize_threshold == 0 || binarize_threshold == 65535) {
        throw InvalidInput("binarize threshold must lie strictly between 0 and 65535");
    }
    if (se.radius < 1) throw InvalidInput("structuring element radius must be >= 1");
}

double BiasParams::effective_gain_sigma(std::size_t width) const {
    return gain_sigma.value_or(static_cast<double>(width) / 8.0);
}

void BiasParams::validate(std::size_t width) const {
    const double g = effective_gain_sigma(width);
    if (!(g > 0.0)) throw InvalidInput("gain sigma must be > 0");
    if (!(final_sigma >= 0.0)) throw InvalidInput("final sigma must be >= 0");
    if (!(g > final_sigma)) throw InvalidInput("gain sigma must exceed final sigma");
    if (!(epsilon > 0.0)) throw InvalidInput("bias epsilon must be > 0");
}

GhostRemovalResult remove_ghost_artifacts(const GrayImage16& image, const GhostRemovalParams& params) {
    params.validate();
    BinaryMask body = open(binarize(image, params.binarize_threshold), params.se);
    if (count_set(body) == 0) throw NoForeground();
    GrayImage16 masked = apply_mask(image, body);
    return {std::move(masked), std::move(body)};
}

double compute_k(const GrayImage16& image) {
    const ImageStats s = image_stats(image);
    if (s.std == 0.0) throw DegenerateImage("degenerate image for auto-k: intensity std is zero");
    const double mn = static_cast<double>(image.width()) * static_cast<double>(image.height());
    return 2.0 * std::log(mn) * std::sqrt(s.mean) / s.std;
}

FloatImage diffuse(const FloatImage& image, const DiffusionParams& params) {
    params.validate();
    const std::size_t w = image.width();
    const std::size_t h = image.height();
    std::vector<double> cur = image.vector();
    std::vector<double> next(cur.size());
    const double inv_k = 1.0 / params.k;
    const double lambda = params.lambda;
    auto conductance = [inv_k](double d) {
        const double s = d * inv_k;
        return std::exp(-s * s);
    };

    for (int it = 0; it < params.iterations; ++it) {
        for (std::size_t y = 0; y < h; ++y) {
            const double* row = cur.data() + y * w;
            const double* up = y > 0 ? row - w : row;
            const double* down = y + 1 < h ? row + w : row;
            double* out = next.data() + y * w;
            for (std::size_t x = 0; x < w; ++x) {
                const double v = row[x];
                const double vn = up[x];
                const double vs = down[x];
                const double ve = x + 1 < w ? row[x + 1] : v;
                const double vw = x > 0 ? row[x - 1] : v;
                const double dn = vn - v;
                const double ds = vs - v;
                const double de = ve - v;
                const double dw = vw - v;
                const double flux = conductance(dn) * dn + conductance(ds) * ds +
                                    conductance(de) * de + conductance(dw) * dw;
                // The update is a convex combination of v and its neighbours;
                // clamping to their hull only absorbs rounding.
                const double lo = std::min({v, vn, vs, ve, vw});
                const double hi = std::max({v, vn, vs, ve, vw});
                out[x] = std::clamp(v + lambda * flux, lo, hi);
            }
        }
        cur.swap(next);
    }
    return FloatImage(w, h, std::move(cur));
}

FloatImage diffuse(const GrayImage16& image, const DiffusionParams& params) {
    return diffuse(to_float(image), params);
}

namespace {

double speckle_over(const FloatImage& image, const BinaryMask* region, int window) {
    if (window < 3 || window % 2 == 0) throw InvalidInput("speckle window must be an odd integer >= 3");
    const auto win = static_cast<std::size_t>(window);
    if (win > image.width() || win > image.height()) {
        throw InvalidInput("speckle window larger than image");
    }
    if (region && (region->width() != image.width() || region->height() != image.height())) {
        throw InvalidInput("speckle region shape does not match the image");
    }
    const auto inside = [&](std::size_t x0, std::size_t y0) {
        if (!region) return true;
        for (std::size_t y = y0; y < y0 + win; ++y)
            for (std::size_t x = x0; x < x0 + win; ++x)
                if (!(*region)(x, y)) return false;
        return true;
    };
    const double n = static_cast<double>(win * win);
    double total = 0.0;
    std::size_t valid = 0;
    for (std::size_t y0 = 0; y0 + win <= image.height(); ++y0) {
        for (std::size_t x0 = 0; x0 + win <= image.width(); ++x0) {
            if (!inside(x0, y0)) continue;
            double sum = 0.0;
            for (std::size_t y = y0; y < y0 + win; ++y)
                for (std::size_t x = x0; x < x0 + win; ++x) sum += image(x, y);
            const double mean = sum / n;
            if (mean <= 0.0) continue;
            double ss = 0.0;
            for (std::size_t y = y0; y < y0 + win; ++y) {
                for (std::size_t x = x0; x < x0 + win; ++x) {
                    const double d = image(x, y) - mean;
                    ss += d * d;
                }
            }
            total += std::sqrt(ss / n) / mean;
            ++valid;
        }
    }
    if (valid == 0) throw InvalidInput("speckle index: no window with positive mean");
    return total / static_cast<double>(valid);
}

}  // namespace

double speckle_index(const FloatImage& image, int window) { return speckle_over(image, nullptr, window); }

double speckle_index(const FloatImage& image, const BinaryMask& region, int window) {
    return speckle_over(image, &region, window);
}

namespace {

std::vector<double> gaussian_kernel(double sigma) {
    const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
    std::vector<double> k(2 * radius + 1);
    double sum = 0.0;
    for (int i = -radius; i <= radius; ++i) {
        k[i + radius] = std::exp(-0.5 * i * i / (sigma * sigma));
        sum += k[i + radius];
    }
    for (double& v : k) v /= sum;
    return k;
}

// Separable convolution with zero padding outside the image, applied to two
// planes at once (weighted values and weights).
void convolve_pair(std::vector<double>& a, std::vector<double>& b, std::size_t w, std::size_t h,
                   const std::vector<double>& kernel) {
    const long radius = static_cast<long>(kernel.size() / 2);
    std::vector<double> ta(a.size(), 0.0);
    std::vector<double> tb(b.size(), 0.0);

    for (std::size_t y = 0; y < h; ++y) {
        const double* ra = a.data() + y * w;
        const double* rb = b.data() + y * w;
        double* oa = ta.data() + y * w;
        double* ob = tb.data() + y * w;
        for (long x = 0; x < static_cast<long>(w); ++x) {
            const long t0 = std::max(-radius, -x);
            const long t1 = std::min(radius, static_cast<long>(w) - 1 - x);
            double sa = 0.0;
            double sb = 0.0;
            for (long t = t0; t <= t1; ++t) {
                const double k = kernel[t + radius];
                sa += k * ra[x + t];
                sb += k * rb[x + t];
            }
            oa[x] = sa;
            ob[x] = sb;
        }
    }

    // Vertical pass accumulates whole rows for sequential memory access.
    std::fill(a.begin(), a.end(), 0.0);
    std::fill(b.begin(), b.end(), 0.0);
    for (long y = 0; y < static_cast<long>(h); ++y) {
        double* oa = a.data() + y * w;
        double* ob = b.data() + y * w;
        const long t0 = std::max(-radius, -y);
        const long t1 = std::min(radius, static_cast<long>(h) - 1 - y);
        for (long t = t0; t <= t1; ++t) {
            const double k = kernel[t + radius];
            const double* ra = ta.data() + (y + t) * w;
            const double* rb = tb.data() + (y + t) * w;
            for (std::size_t x = 0; x < w; ++x) {
                oa[x] += k * ra[x];
                ob[x] += k * rb[x];
            }
        }
    }
}

double body_mean(const std::vector<double>& v, const BinaryMask& body) {
    double sum = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (body[i]) {
            sum += v[i];
            ++n;
        }
    }
    return n ? sum / static_cast<double>(n) : 0.0;
}

}  // namespace

FloatImage masked_gaussian(const FloatImage& image, const BinaryMask& mask, double sigma) {
    if (!image.same_shape(mask)) throw InvalidInput("mask shape differs from image");
    if (!(sigma >= 0.0)) throw InvalidInput("smoothing sigma must be >= 0");
    const std::size_t n = image.size();
    std::vector<double> num(n);
    std::vector<double> den(n);
    for (std::size_t i = 0; i < n; ++i) {
        num[i] = mask[i] ? image[i] : 0.0;
        den[i] = mask[i] ? 1.0 : 0.0;
    }
    if (sigma == 0.0) return FloatImage(image.width(), image.height(), std::move(num));

    convolve_pair(num, den, image.width(), image.height(), gaussian_kernel(sigma));
    for (std::size_t i = 0; i < n; ++i) {
        num[i] = (mask[i] && den[i] > 0.0) ? num[i] / den[i] : 0.0;
    }
    return FloatImage(image.width(), image.height(), std::move(num));
}

FloatImage correct_bias(const FloatImage& image, const BinaryMask& body, const BiasParams& params) {
    if (!image.same_shape(body)) throw InvalidInput("body mask shape differs from image");
    params.validate(image.width());
    if (count_set(body) == 0) throw NoForeground();

    const FloatImage gain = masked_gaussian(image, body, params.effective_gain_sigma(image.width()));
    const double gain_mean = body_mean(gain.vector(), body);
    const double input_mean = body_mean(image.vector(), body);

    std::vector<double> out(image.size(), 0.0);
    if (gain_mean > 0.0) {
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (body[i]) out[i] = image[i] / std::max(gain[i] / gain_mean, params.epsilon);
        }
        const double out_mean = body_mean(out, body);
        if (out_mean > 0.0) {
            const double scale = input_mean / out_mean;
            for (std::size_t i = 0; i < out.size(); ++i) out[i] *= scale;
        }
    } else {
        for (std::size_t i = 0; i < out.size(); ++i) out[i] = body[i] ? image[i] : 0.0;
    }
    FloatImage corrected(image.width(), image.height(), std::move(out));
    if (params.final_sigma == 0.0) return corrected;
    return masked_gaussian(corrected, body, params.final_sigma);
}

PreprocessResult preprocess_pipeline(const GrayImage16& image, const PreprocessParams& params) {
    params.bias.validate(image.width());
    GhostRemovalResult ghost = remove_ghost_artifacts(image, params.ghost);

    DiffusionParams dp;
    dp.k = compute_k(ghost.image);
    dp.lambda = params.lambda;
    dp.iterations = params.iterations;

    const FloatImage masked = to_float(ghost.image);
    const FloatImage diffused = diffuse(masked, dp);
    const FloatImage corrected = correct_bias(diffused, ghost.body, params.bias);

    PreprocessResult r;
    r.image = apply_mask(to_gray16(corrected), ghost.body);
    r.k = dp.k;
    r.speckle_before = speckle_index(masked, ghost.body, params.speckle_window);
    r.speckle_after_diffusion = speckle_index(diffused, ghost.body, params.speckle_window);
    r.speckle_after = speckle_index(to_float(r.image), ghost.body, params.speckle_window);
    r.body = std::move(ghost.body);
    return r;
}

}  // namespace spectral
