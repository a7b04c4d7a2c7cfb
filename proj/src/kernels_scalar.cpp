#include "schro/kernels.hpp"

namespace schro::kern {
namespace {

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a * x[i];
}

void scale(std::size_t n, cplx a, cplx* x) {
    for (std::size_t i = 0; i < n; ++i) x[i] *= a;
}

void mul(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = a[i] * x[i];
}

void mul_acc(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += a[i] * x[i];
}

void rmul(std::size_t n, const double* r, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] = r[i] * x[i];
}

void rmul_acc(std::size_t n, cplx c, const double* r, const cplx* x, cplx* y) {
    for (std::size_t i = 0; i < n; ++i) y[i] += c * (r[i] * x[i]);
}

cplx dot(std::size_t n, const cplx* x, const cplx* y) {
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

double norm2(std::size_t n, const cplx* x) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return s;
}

}  // namespace

const Table& scalar() {
    static const Table t{"scalar", axpy, scale, mul, mul_acc, rmul, rmul_acc, dot, norm2};
    return t;
}

}  // namespace schro::kern
