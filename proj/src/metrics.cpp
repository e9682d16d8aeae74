#include "spectral/metrics.hpp"

namespace spectral {

OverlapCounts overlap(const BinaryMask& pred, const BinaryMask& truth) {
    if (!pred.same_shape(truth)) {
        throw InvalidInput("dimension mismatch: prediction " + std::to_string(pred.width()) + "x" +
                           std::to_string(pred.height()) + " vs truth " + std::to_string(truth.width()) + "x" +
                           std::to_string(truth.height()));
    }
    OverlapCounts c;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        const bool p = pred[i] != 0;
        const bool t = truth[i] != 0;
        if (p && t) ++c.tp;
        else if (p) ++c.fp;
        else if (t) ++c.fn;
        else ++c.tn;
    }
    return c;
}

double dsc(const OverlapCounts& c) {
    const std::uint64_t denom = 2 * c.tp + c.fp + c.fn;
    return denom == 0 ? 1.0 : static_cast<double>(2 * c.tp) / static_cast<double>(denom);
}

double ji(const OverlapCounts& c) {
    const std::uint64_t denom = c.tp + c.fp + c.fn;
    return denom == 0 ? 1.0 : static_cast<double>(c.tp) / static_cast<double>(denom);
}

MetricsReport evaluate(const BinaryMask& pred, const BinaryMask& truth) {
    const OverlapCounts c = overlap(pred, truth);
    return {dsc(c), ji(c), c};
}

}  // namespace spectral
