#pragma once

#include <cmath>
#include <stdexcept>

namespace qupass {

struct ConfidenceInterval {
    double estimate;
    double low;
    double high;
};

// Wilson score interval at 95%. Chosen over the normal approximation because
// deep-curve success counts sit near zero.
inline ConfidenceInterval estimate_with_ci(std::size_t successes, std::size_t trials) {
    if (trials < 1) throw std::invalid_argument("trials must be >= 1");
    if (successes > trials) throw std::invalid_argument("successes must not exceed trials");
    const double z = 1.959963984540054;
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double z2n = z * z / n;
    const double center = (p + z2n / 2.0) / (1.0 + z2n);
    const double half = z * std::sqrt(p * (1.0 - p) / n + z2n / (4.0 * n)) / (1.0 + z2n);
    // The bounds at the extremes are exactly 0 and 1.
    const double low = successes == 0 ? 0.0 : std::max(center - half, 0.0);
    const double high = successes == trials ? 1.0 : std::min(center + half, 1.0);
    return {p, low, high};
}

}  // namespace qupass
