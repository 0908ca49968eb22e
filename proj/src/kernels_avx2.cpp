#include "pisac/kernels.hpp"

// This translation unit is compiled with -mavx2 -mfma on x86-64; the
// dispatcher only hands out the table after a runtime CPU check.

#if defined(__AVX2__) && defined(__FMA__)

#include <immintrin.h>

#include <algorithm>
#include <cstring>

namespace pisac::kernels {
namespace {

void matmul_nn_avx2(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate) {
    if (!accumulate) std::memset(c, 0, static_cast<size_t>(m) * n * sizeof(double));
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const __m256d av = _mm256_set1_pd(arow[p]);
            const double* brow = b + static_cast<size_t>(p) * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += arow[p] * brow[j];
        }
    }
}

inline double hsum(__m256d v) {
    __m128d lo = _mm256_castpd256_pd128(v);
    __m128d hi = _mm256_extractf128_pd(v, 1);
    lo = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(lo, _mm_unpackhi_pd(lo, lo)));
}

void matmul_nt_avx2(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = b + static_cast<size_t>(j) * k;
            __m256d vacc = _mm256_setzero_pd();
            int p = 0;
            for (; p + 4 <= k; p += 4)
                vacc = _mm256_fmadd_pd(_mm256_loadu_pd(arow + p), _mm256_loadu_pd(brow + p), vacc);
            double acc = hsum(vacc);
            for (; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] = accumulate ? crow[j] + acc : acc;
        }
    }
}

void matmul_tn_avx2(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate) {
    if (!accumulate) std::memset(c, 0, static_cast<size_t>(m) * n * sizeof(double));
    for (int p = 0; p < k; ++p) {
        const double* arow = a + static_cast<size_t>(p) * m;
        const double* brow = b + static_cast<size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const __m256d av = _mm256_set1_pd(arow[i]);
            double* crow = c + static_cast<size_t>(i) * n;
            int j = 0;
            for (; j + 4 <= n; j += 4) {
                __m256d cj = _mm256_loadu_pd(crow + j);
                cj = _mm256_fmadd_pd(av, _mm256_loadu_pd(brow + j), cj);
                _mm256_storeu_pd(crow + j, cj);
            }
            for (; j < n; ++j) crow[j] += arow[i] * brow[j];
        }
    }
}

void add_avx2(const double* a, const double* b, double* c, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_add_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] + b[i];
}

void sub_avx2(const double* a, const double* b, double* c, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] - b[i];
}

void mul_avx2(const double* a, const double* b, double* c, int n) {
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(c + i, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    for (; i < n; ++i) c[i] = a[i] * b[i];
}

void axpy_avx2(double alpha, const double* x, double* y, int n) {
    const __m256d va = _mm256_set1_pd(alpha);
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    for (; i < n; ++i) y[i] += alpha * x[i];
}

void scale_avx2(double alpha, const double* x, double* y, int n) {
    const __m256d va = _mm256_set1_pd(alpha);
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_mul_pd(va, _mm256_loadu_pd(x + i)));
    for (; i < n; ++i) y[i] = alpha * x[i];
}

double dot_avx2(const double* x, const double* y, int n) {
    __m256d vacc = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4)
        vacc = _mm256_fmadd_pd(_mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i), vacc);
    double acc = hsum(vacc);
    for (; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_avx2(const double* x, int n) {
    __m256d vacc = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4) vacc = _mm256_add_pd(vacc, _mm256_loadu_pd(x + i));
    double acc = hsum(vacc);
    for (; i < n; ++i) acc += x[i];
    return acc;
}

void relu_avx2(const double* x, double* y, int n) {
    const __m256d zero = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4)
        _mm256_storeu_pd(y + i, _mm256_max_pd(_mm256_loadu_pd(x + i), zero));
    for (; i < n; ++i) y[i] = std::max(x[i], 0.0);
}

void tanh_grad_acc_avx2(const double* y, const double* g, double* gx, int n) {
    const __m256d one = _mm256_set1_pd(1.0);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d d = _mm256_fnmadd_pd(yv, yv, one);  // 1 - y^2
        _mm256_storeu_pd(gx + i, _mm256_fmadd_pd(_mm256_loadu_pd(g + i), d, _mm256_loadu_pd(gx + i)));
    }
    for (; i < n; ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
}

void logistic_grad_acc_avx2(const double* y, const double* g, double* gx, int n) {
    const __m256d one = _mm256_set1_pd(1.0);
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d yv = _mm256_loadu_pd(y + i);
        const __m256d d = _mm256_mul_pd(yv, _mm256_sub_pd(one, yv));  // y(1-y)
        _mm256_storeu_pd(gx + i, _mm256_fmadd_pd(_mm256_loadu_pd(g + i), d, _mm256_loadu_pd(gx + i)));
    }
    for (; i < n; ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
}

void relu_grad_acc_avx2(const double* x, const double* g, double* gx, int n) {
    const __m256d zero = _mm256_setzero_pd();
    int i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d mask = _mm256_cmp_pd(_mm256_loadu_pd(x + i), zero, _CMP_GT_OQ);
        const __m256d gv = _mm256_and_pd(_mm256_loadu_pd(g + i), mask);
        _mm256_storeu_pd(gx + i, _mm256_add_pd(_mm256_loadu_pd(gx + i), gv));
    }
    for (; i < n; ++i) gx[i] += x[i] > 0.0 ? g[i] : 0.0;
}

}  // namespace

const Ops* avx2_ops() {
    if (!__builtin_cpu_supports("avx2") || !__builtin_cpu_supports("fma")) return nullptr;
    static const Ops ops{
        "avx2",
        matmul_nn_avx2, matmul_nt_avx2, matmul_tn_avx2,
        add_avx2, sub_avx2, mul_avx2, axpy_avx2, scale_avx2,
        dot_avx2, sum_avx2,
        relu_avx2,
        tanh_grad_acc_avx2, logistic_grad_acc_avx2, relu_grad_acc_avx2,
    };
    return &ops;
}

}  // namespace pisac::kernels

#else

namespace pisac::kernels {
const Ops* avx2_ops() { return nullptr; }
}  // namespace pisac::kernels

#endif
