#pragma once

// Real-to-complex transforms over a Grid, backed by cached FFTW plans.
// forward() scales by 1/N; inverse() is unscaled, so inverse(forward(f)) = f.

#include "nslog/field.hpp"

namespace nslog {

namespace fft {
void forward_scalar(const Grid& g, const double* in, cplx* out);
/// Reads `in` without modifying it.
void inverse_scalar(const Grid& g, const cplx* in, double* out);
}  // namespace fft

/// Throws DataError on non-finite samples.
SpecField forward(const PhysField& f);
PhysField inverse(const SpecField& g);

}  // namespace nslog
