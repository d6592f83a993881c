#pragma once

#include "gsr/grid.hpp"

namespace gsr::detail {

// Unnormalised 2-D complex transforms on a row-major width x height array.
// `in` and `out` must not alias.
void fft2_forward(int width, int height, const Complex* in, Complex* out);
void fft2_backward(int width, int height, const Complex* in, Complex* out);

}  // namespace gsr::detail
