#pragma once

#include "gkae/matrix.hpp"

namespace gkae {

// Global z-score statistics of a training window. `clamped` records that a
// zero-variance signal forced the deviation to 1.
struct NormStats {
    double mean = 0.0;
    double stddev = 1.0;
    bool clamped = false;
};

inline double normalize(double x, const NormStats& s) { return (x - s.mean) / s.stddev; }
inline double denormalize(double z, const NormStats& s) { return z * s.stddev + s.mean; }

Matrix normalize(const Matrix& x, const NormStats& s);
Matrix denormalize(const Matrix& z, const NormStats& s);

}  // namespace gkae
