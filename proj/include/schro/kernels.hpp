#pragma once

// Complex array kernels used by the evolution engine. Each entry has a scalar
// reference implementation and an AVX2/FMA variant; the variant is picked once
// at startup from CPUID and stays fixed for the life of the process, so runs
// on the same machine are bitwise reproducible.

#include <cstddef>

#include "schro/types.hpp"

namespace schro::kern {

struct Table {
    const char* name;
    // y += a*x
    void (*axpy)(std::size_t n, cplx a, const cplx* x, cplx* y);
    // x *= a
    void (*scale)(std::size_t n, cplx a, cplx* x);
    // y = a .* x
    void (*mul)(std::size_t n, const cplx* a, const cplx* x, cplx* y);
    // y += a .* x
    void (*mul_acc)(std::size_t n, const cplx* a, const cplx* x, cplx* y);
    // y = r .* x with real r
    void (*rmul)(std::size_t n, const double* r, const cplx* x, cplx* y);
    // y += c * r .* x with real r
    void (*rmul_acc)(std::size_t n, cplx c, const double* r, const cplx* x, cplx* y);
    // sum conj(x_i) y_i
    cplx (*dot)(std::size_t n, const cplx* x, const cplx* y);
    // sum |x_i|^2
    double (*norm2)(std::size_t n, const cplx* x);
};

const Table& scalar();
// nullptr when the CPU or the build lacks AVX2+FMA.
const Table* avx2();
const Table& active();

// Test hook: route active() to the scalar table.
void force_scalar(bool on);

}  // namespace schro::kern
