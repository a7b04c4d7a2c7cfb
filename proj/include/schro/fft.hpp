#pragma once

#include <vector>

#include "schro/types.hpp"

namespace schro::fft {

// Unnormalized multi-dimensional DFT over `howmany` contiguous row-major
// blocks of the given shape. sign -1 is forward (e^{-i k x}).
void transform(const std::vector<int>& shape, int howmany, int sign, const cplx* in, cplx* out);

// 1-D DFT along one axis of a row-major array; in-place allowed.
void transform_axis(const std::vector<std::size_t>& shape, int axis, int sign, const cplx* in, cplx* out);

}  // namespace schro::fft
