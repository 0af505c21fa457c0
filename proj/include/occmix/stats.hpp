#pragma once

#include <vector>

namespace occmix {

// Median of a sample (the values are copied; NaNs must be filtered upstream).
double median(std::vector<double> values);

// Median absolute deviation scaled by 1.4826 to be consistent with the
// standard deviation under normality.
double scaled_mad(const std::vector<double>& values);

inline constexpr double kMadScale = 1.4826;

// Standard normal quantile function (Acklam's rational approximation with a
// Halley refinement); |error| < 1e-13 over (0, 1).
double normal_quantile(double p);

}  // namespace occmix
