// Independent brute-force reference implementations and random generators
// shared by the unit and acceptance tests. Nothing here calls into the
// library code it is used to check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "spectral/components.hpp"
#include "spectral/image.hpp"
#include "spectral/metrics.hpp"
#include "spectral/morphology.hpp"

namespace oracle {

using spectral::BinaryMask;
using spectral::FloatImage;
using spectral::GrayImage16;

class Gen {
public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    std::size_t size(std::size_t lo, std::size_t hi) {
        return std::uniform_int_distribution<std::size_t>(lo, hi)(rng_);
    }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
    double real(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
    bool coin(double p = 0.5) { return std::bernoulli_distribution(p)(rng_); }

    BinaryMask mask(std::size_t w, std::size_t h, double density) {
        BinaryMask m(w, h);
        for (std::size_t i = 0; i < m.size(); ++i) m[i] = coin(density) ? 1 : 0;
        return m;
    }
    BinaryMask mask(std::size_t max_side = 16) {
        return mask(size(1, max_side), size(1, max_side), real(0.05, 0.95));
    }
    GrayImage16 gray(std::size_t w, std::size_t h, int lo = 0, int hi = 65535) {
        GrayImage16 g(w, h);
        for (std::size_t i = 0; i < g.size(); ++i) g[i] = static_cast<std::uint16_t>(integer(lo, hi));
        return g;
    }

private:
    std::mt19937_64 rng_;
};

/// Footprint written out directly from the shape definitions.
inline bool in_footprint(spectral::SeShape shape, int r, int dx, int dy) {
    switch (shape) {
        case spectral::SeShape::Disk: return dx * dx + dy * dy <= r * r;
        case spectral::SeShape::Square: return std::abs(dx) <= r && std::abs(dy) <= r;
        case spectral::SeShape::Cross: return (dx == 0 && std::abs(dy) <= r) || (dy == 0 && std::abs(dx) <= r);
    }
    return false;
}

inline int at_or_zero(const BinaryMask& m, long x, long y) {
    if (x < 0 || y < 0 || x >= static_cast<long>(m.width()) || y >= static_cast<long>(m.height())) return 0;
    return m(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) ? 1 : 0;
}

inline BinaryMask erode(const BinaryMask& m, spectral::SeShape shape, int r) {
    BinaryMask out(m.width(), m.height());
    for (long y = 0; y < static_cast<long>(m.height()); ++y) {
        for (long x = 0; x < static_cast<long>(m.width()); ++x) {
            bool all = true;
            for (int dy = -r; dy <= r && all; ++dy) {
                for (int dx = -r; dx <= r && all; ++dx) {
                    if (in_footprint(shape, r, dx, dy) && !at_or_zero(m, x + dx, y + dy)) all = false;
                }
            }
            out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = all ? 1 : 0;
        }
    }
    return out;
}

inline BinaryMask dilate(const BinaryMask& m, spectral::SeShape shape, int r) {
    BinaryMask out(m.width(), m.height());
    for (long y = 0; y < static_cast<long>(m.height()); ++y) {
        for (long x = 0; x < static_cast<long>(m.width()); ++x) {
            bool any = false;
            for (int dy = -r; dy <= r && !any; ++dy) {
                for (int dx = -r; dx <= r && !any; ++dx) {
                    // symmetric footprint, so reflection is a no-op
                    if (in_footprint(shape, r, dx, dy) && at_or_zero(m, x + dx, y + dy)) any = true;
                }
            }
            out(static_cast<std::size_t>(x), static_cast<std::size_t>(y)) = any ? 1 : 0;
        }
    }
    return out;
}

inline BinaryMask opening(const BinaryMask& m, spectral::SeShape shape, int r) {
    return dilate(erode(m, shape, r), shape, r);
}

inline spectral::OverlapCounts overlap(const BinaryMask& a, const BinaryMask& b) {
    spectral::OverlapCounts c;
    for (std::size_t y = 0; y < a.height(); ++y) {
        for (std::size_t x = 0; x < a.width(); ++x) {
            const bool p = a(x, y) != 0;
            const bool t = b(x, y) != 0;
            c.tp += p && t;
            c.fp += p && !t;
            c.fn += !p && t;
            c.tn += !p && !t;
        }
    }
    return c;
}

inline double dsc(const spectral::OverlapCounts& c) {
    if (c.tp + c.fp + c.fn == 0) return 1.0;
    return 2.0 * static_cast<double>(c.tp) / (2.0 * static_cast<double>(c.tp) + static_cast<double>(c.fp + c.fn));
}

inline double ji(const spectral::OverlapCounts& c) {
    if (c.tp + c.fp + c.fn == 0) return 1.0;
    return static_cast<double>(c.tp) / static_cast<double>(c.tp + c.fp + c.fn);
}

struct Blob {
    std::vector<std::size_t> pixels;  ///< raster indices, ascending
    double cx = 0.0;
    double cy = 0.0;
};

/// 4-connected components by breadth-first flood fill, in raster order of
/// each component's first pixel.
inline std::vector<Blob> components(const BinaryMask& m) {
    const std::size_t w = m.width();
    const std::size_t h = m.height();
    std::vector<char> seen(m.size(), 0);
    std::vector<Blob> out;
    for (std::size_t s = 0; s < m.size(); ++s) {
        if (!m[s] || seen[s]) continue;
        Blob b;
        std::deque<std::size_t> q{s};
        seen[s] = 1;
        while (!q.empty()) {
            const std::size_t i = q.front();
            q.pop_front();
            b.pixels.push_back(i);
            const std::size_t x = i % w;
            const std::size_t y = i / w;
            const auto visit = [&](std::size_t j) {
                if (m[j] && !seen[j]) {
                    seen[j] = 1;
                    q.push_back(j);
                }
            };
            if (x > 0) visit(i - 1);
            if (x + 1 < w) visit(i + 1);
            if (y > 0) visit(i - w);
            if (y + 1 < h) visit(i + w);
        }
        std::sort(b.pixels.begin(), b.pixels.end());
        for (std::size_t i : b.pixels) {
            b.cx += static_cast<double>(i % w);
            b.cy += static_cast<double>(i / w);
        }
        b.cx /= static_cast<double>(b.pixels.size());
        b.cy /= static_cast<double>(b.pixels.size());
        out.push_back(std::move(b));
    }
    return out;
}

/// Window-smoothing by the shrinking-window rule, evaluated naively.
inline std::vector<std::uint64_t> smooth(const std::vector<std::uint64_t>& c, int window) {
    const long half = window / 2;
    const long n = static_cast<long>(c.size());
    std::vector<std::uint64_t> out(c.size());
    for (long i = 0; i < n; ++i) {
        const long a = std::max(0L, i - half);
        const long b = std::min(n - 1, i + half);
        long double sum = 0;
        for (long j = a; j <= b; ++j) sum += static_cast<long double>(c[static_cast<std::size_t>(j)]);
        // round half up
        out[static_cast<std::size_t>(i)] =
            static_cast<std::uint64_t>(std::floor(sum / static_cast<long double>(b - a + 1) + 0.5L));
    }
    return out;
}

struct Minimum {
    std::size_t intensity;
    std::uint64_t count;
};

/// Plateau-aware minima scan: a maximal run of equal counts with strictly
/// greater neighbours on both sides, not touching either end, reported at its
/// (lower-)middle bin when that bin lies strictly inside (lo, hi).
inline std::vector<Minimum> minima(const std::vector<std::uint64_t>& s, std::size_t lo, std::size_t hi) {
    std::vector<Minimum> out;
    std::size_t i = 0;
    while (i < s.size()) {
        std::size_t j = i;
        while (j + 1 < s.size() && s[j + 1] == s[i]) ++j;
        if (i > 0 && j + 1 < s.size() && s[i - 1] > s[i] && s[j + 1] > s[i]) {
            const std::size_t centre = i + (j - i) / 2;
            if (centre > lo && centre < hi) out.push_back({centre, s[i]});
        }
        i = j + 1;
    }
    return out;
}

/// Lowest-count minimum, earliest on ties.
inline std::optional<Minimum> best(const std::vector<Minimum>& ms) {
    std::optional<Minimum> b;
    for (const auto& m : ms) {
        if (!b || m.count < b->count) b = m;
    }
    return b;
}

/// Intensity between the two means minimising w1 N(mu1, s1) + w2 N(mu2, s2),
/// by dense evaluation on a 0.01 grid.
inline double mixture_valley(double w1, double mu1, double s1, double w2, double mu2, double s2) {
    const auto pdf = [](double x, double mu, double s) {
        const double z = (x - mu) / s;
        return std::exp(-0.5 * z * z) / (s * std::sqrt(2.0 * 3.14159265358979323846));
    };
    double best_x = mu1;
    double best_p = INFINITY;
    for (double x = mu1; x <= mu2; x += 0.01) {
        const double p = w1 * pdf(x, mu1, s1) + w2 * pdf(x, mu2, s2);
        if (p < best_p) {
            best_p = p;
            best_x = x;
        }
    }
    return best_x;
}

/// One explicit step of 4-neighbour diffusion with conductance c(d), borders
/// replicated. `linear` uses c = 1 everywhere.
inline FloatImage diffusion_step(const FloatImage& v, double lambda, double k, bool linear) {
    const std::size_t w = v.width();
    const std::size_t h = v.height();
    std::vector<double> out(v.size());
    for (std::size_t y = 0; y < h; ++y) {
        for (std::size_t x = 0; x < w; ++x) {
            const double c0 = v(x, y);
            const double nb[4] = {v(x, y > 0 ? y - 1 : y), v(x, y + 1 < h ? y + 1 : y), v(x + 1 < w ? x + 1 : x, y),
                                  v(x > 0 ? x - 1 : x, y)};
            double flux = 0.0;
            for (double n : nb) {
                const double d = n - c0;
                const double c = linear ? 1.0 : std::exp(-(d / k) * (d / k));
                flux += c * d;
            }
            out[y * w + x] = c0 + lambda * flux;
        }
    }
    return FloatImage(w, h, std::move(out));
}

struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& tag) {
        static std::size_t counter = 0;
        std::random_device rd;
        path = std::filesystem::temp_directory_path() /
               ("spectral-" + tag + "-" + std::to_string(rd()) + "-" + std::to_string(++counter));
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

inline std::vector<std::uint8_t> file_bytes(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace oracle
