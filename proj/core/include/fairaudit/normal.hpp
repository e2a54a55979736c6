#pragma once

namespace fairaudit {

/// Inverse CDF of the standard normal distribution for p in (0, 1).
/// Wichura's AS241 (PPND16); relative accuracy about 1e-16.
/// Throws InputError outside (0, 1).
double standard_normal_quantile(double p);

/// z_{1 - alpha/2}, the two-sided Wald multiplier.
double two_sided_z(double alpha);

}  // namespace fairaudit
