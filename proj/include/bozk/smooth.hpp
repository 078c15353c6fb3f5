#pragma once

#include <cmath>

namespace bozk {

/// Smooth transition from 0 (t <= 0) to 1 (t >= 1), infinitely differentiable
/// with every derivative vanishing at both ends. Built from f(t) = exp(-1/t) as
/// f(t) / (f(t) + f(1 - t)), so smooth_step(t) + smooth_step(1 - t) = 1.
inline double smooth_step(double t)
{
    if (t <= 0.0)
        return 0.0;
    if (t >= 1.0)
        return 1.0;
    // exp(-1/t) / (exp(-1/t) + exp(-1/(1-t))) rewritten to avoid underflow.
    return 1.0 / (1.0 + std::exp(1.0 / t - 1.0 / (1.0 - t)));
}

/// Derivative of smooth_step.
inline double smooth_step_prime(double t)
{
    if (t <= 0.0 || t >= 1.0)
        return 0.0;
    double e = 1.0 / t - 1.0 / (1.0 - t);
    if (e > 700.0 || e < -700.0)
        return 0.0;
    double q = std::exp(e);
    double s = 1.0 / (1.0 + q);
    double de = -1.0 / (t * t) - 1.0 / ((1.0 - t) * (1.0 - t));
    return -s * s * q * de;
}

} // namespace bozk
