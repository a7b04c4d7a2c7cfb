// Compiled with -mavx2 -mfma. Only reached through the dispatch in
// kernels_dispatch.cpp after a CPUID check.
#include <immintrin.h>

#include "schro/kernels.hpp"

namespace schro::kern {
namespace {

inline const double* dp(const cplx* p) { return reinterpret_cast<const double*>(p); }
inline double* dp(cplx* p) { return reinterpret_cast<double*>(p); }

// (a0,a1) * (x0,x1) as packed complex pairs.
inline __m256d cmul(__m256d a, __m256d x) {
    const __m256d are = _mm256_movedup_pd(a);
    const __m256d aim = _mm256_permute_pd(a, 0xF);
    const __m256d xsw = _mm256_permute_pd(x, 0x5);
    return _mm256_fmaddsub_pd(are, x, _mm256_mul_pd(aim, xsw));
}

void axpy(std::size_t n, cplx a, const cplx* x, cplx* y) {
    const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d yv = _mm256_loadu_pd(dp(y + i));
        yv = _mm256_add_pd(yv, cmul(av, _mm256_loadu_pd(dp(x + i))));
        _mm256_storeu_pd(dp(y + i), yv);
    }
    for (; i < n; ++i) y[i] += a * x[i];
}

void scale(std::size_t n, cplx a, cplx* x) {
    const __m256d av = _mm256_setr_pd(a.real(), a.imag(), a.real(), a.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) _mm256_storeu_pd(dp(x + i), cmul(av, _mm256_loadu_pd(dp(x + i))));
    for (; i < n; ++i) x[i] *= a;
}

void mul(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(dp(y + i), cmul(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(x + i))));
    for (; i < n; ++i) y[i] = a[i] * x[i];
}

void mul_acc(std::size_t n, const cplx* a, const cplx* x, cplx* y) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        __m256d yv = _mm256_loadu_pd(dp(y + i));
        yv = _mm256_add_pd(yv, cmul(_mm256_loadu_pd(dp(a + i)), _mm256_loadu_pd(dp(x + i))));
        _mm256_storeu_pd(dp(y + i), yv);
    }
    for (; i < n; ++i) y[i] += a[i] * x[i];
}

// broadcast r[i], r[i+1] to (r0,r0,r1,r1)
inline __m256d rpair(const double* r) {
    const __m128d rr = _mm_loadu_pd(r);
    return _mm256_permute4x64_pd(_mm256_castpd128_pd256(rr), 0x50);
}

void rmul(std::size_t n, const double* r, const cplx* x, cplx* y) {
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2)
        _mm256_storeu_pd(dp(y + i), _mm256_mul_pd(rpair(r + i), _mm256_loadu_pd(dp(x + i))));
    for (; i < n; ++i) y[i] = r[i] * x[i];
}

void rmul_acc(std::size_t n, cplx c, const double* r, const cplx* x, cplx* y) {
    const __m256d cv = _mm256_setr_pd(c.real(), c.imag(), c.real(), c.imag());
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d t = _mm256_mul_pd(rpair(r + i), _mm256_loadu_pd(dp(x + i)));
        __m256d yv = _mm256_loadu_pd(dp(y + i));
        _mm256_storeu_pd(dp(y + i), _mm256_add_pd(yv, cmul(cv, t)));
    }
    for (; i < n; ++i) y[i] += c * (r[i] * x[i]);
}

cplx dot(std::size_t n, const cplx* x, const cplx* y) {
    __m256d acc_d = _mm256_setzero_pd();  // (xr*yr, xi*yi)
    __m256d acc_c = _mm256_setzero_pd();  // (xi*yr, xr*yi)
    std::size_t i = 0;
    for (; i + 2 <= n; i += 2) {
        const __m256d xv = _mm256_loadu_pd(dp(x + i));
        const __m256d yv = _mm256_loadu_pd(dp(y + i));
        acc_d = _mm256_fmadd_pd(xv, yv, acc_d);
        acc_c = _mm256_fmadd_pd(_mm256_permute_pd(xv, 0x5), yv, acc_c);
    }
    alignas(32) double d[4], c[4];
    _mm256_store_pd(d, acc_d);
    _mm256_store_pd(c, acc_c);
    double re = (d[0] + d[1]) + (d[2] + d[3]);
    double im = (c[1] - c[0]) + (c[3] - c[2]);
    for (; i < n; ++i) {
        re += x[i].real() * y[i].real() + x[i].imag() * y[i].imag();
        im += x[i].real() * y[i].imag() - x[i].imag() * y[i].real();
    }
    return {re, im};
}

double norm2(std::size_t n, const cplx* x) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d a = _mm256_loadu_pd(dp(x + i));
        const __m256d b = _mm256_loadu_pd(dp(x + i + 2));
        acc0 = _mm256_fmadd_pd(a, a, acc0);
        acc1 = _mm256_fmadd_pd(b, b, acc1);
    }
    for (; i + 2 <= n; i += 2) {
        const __m256d a = _mm256_loadu_pd(dp(x + i));
        acc0 = _mm256_fmadd_pd(a, a, acc0);
    }
    alignas(32) double s[4];
    _mm256_store_pd(s, _mm256_add_pd(acc0, acc1));
    double r = (s[0] + s[1]) + (s[2] + s[3]);
    for (; i < n; ++i) r += x[i].real() * x[i].real() + x[i].imag() * x[i].imag();
    return r;
}

}  // namespace

const Table& avx2_table_impl() {
    static const Table t{"avx2", axpy, scale, mul, mul_acc, rmul, rmul_acc, dot, norm2};
    return t;
}

}  // namespace schro::kern
