// Phantom designs shared by the unit and acceptance tests.
#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "spectral/phantom.hpp"

namespace fixtures {

/// Two-class checkerboard inside the default ellipse: dark 450/60, bright
/// 1100/80, correlated texture, plus ghost specks outside the body.
inline spectral::PhantomSpec tissue_spec(std::uint64_t seed) {
    spectral::PhantomSpec s;
    s.dark = {450.0, 60.0};
    s.bright = {1100.0, 80.0};
    s.ghost_specks = 40;
    s.seed = seed;
    return s;
}

inline constexpr double kLesionIntensity = 1500.0;
inline constexpr std::size_t kLesionMinArea = 20;

/// Single uniform body band 300..600 with bright blobs of 120 and 40 px (and
/// a 12 px blob below the area cut) at seed-dependent, well separated places.
inline spectral::PhantomSpec lesion_spec(std::uint64_t seed) {
    spectral::PhantomSpec s;
    s.layout = spectral::DarkLayout::None;
    s.bright = {450.0, 150.0 / std::numbers::sqrt3, spectral::ClassDistribution::Uniform};
    s.ghost_specks = 40;
    s.seed = seed;

    const spectral::EllipseSpec e = s.effective_body();
    std::mt19937_64 rng(seed ^ 0x5eedULL);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const std::size_t areas[] = {120, 40, 12};
    for (std::size_t a : areas) {
        for (;;) {
            const double cx = e.cx + u(rng) * (e.rx - 25.0);
            const double cy = e.cy + u(rng) * (e.ry - 25.0);
            const double nx = (cx - e.cx) / (e.rx - 25.0);
            const double ny = (cy - e.cy) / (e.ry - 25.0);
            if (nx * nx + ny * ny > 1.0) continue;
            bool clear = true;
            for (const auto& l : s.lesions) clear = clear && std::hypot(l.cx - cx, l.cy - cy) > 40.0;
            if (!clear) continue;
            s.lesions.push_back({std::round(cx), std::round(cy), a, kLesionIntensity});
            break;
        }
    }
    return s;
}

}  // namespace fixtures
