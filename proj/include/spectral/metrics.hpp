#pragma once

#include <cstdint>

#include "spectral/image.hpp"

namespace spectral {

struct OverlapCounts {
    std::uint64_t tp = 0;
    std::uint64_t fp = 0;
    std::uint64_t fn = 0;
    std::uint64_t tn = 0;

    friend bool operator==(const OverlapCounts&, const OverlapCounts&) = default;
};

struct MetricsReport {
    double dsc = 1.0;
    double ji = 1.0;
    OverlapCounts counts;
};

/// Confusion counts of pred against truth; throws on shape mismatch.
OverlapCounts overlap(const BinaryMask& pred, const BinaryMask& truth);

/// Dice 2tp / (2tp + fp + fn) and Jaccard tp / (tp + fp + fn). Both are 1.0
/// when prediction and truth are empty.
double dsc(const OverlapCounts& c);
double ji(const OverlapCounts& c);

MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& truth);

}  // namespace spectral
