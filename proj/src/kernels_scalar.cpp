#include "pisac/kernels.hpp"

#include <algorithm>
#include <cstring>

namespace pisac::kernels {
namespace {

void matmul_nn_scalar(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate) {
    if (!accumulate) std::memset(c, 0, static_cast<size_t>(m) * n * sizeof(double));
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int p = 0; p < k; ++p) {
            const double av = arow[p];
            const double* brow = b + static_cast<size_t>(p) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void matmul_nt_scalar(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate) {
    for (int i = 0; i < m; ++i) {
        const double* arow = a + static_cast<size_t>(i) * k;
        double* crow = c + static_cast<size_t>(i) * n;
        for (int j = 0; j < n; ++j) {
            const double* brow = b + static_cast<size_t>(j) * k;
            double acc = 0.0;
            for (int p = 0; p < k; ++p) acc += arow[p] * brow[p];
            crow[j] = accumulate ? crow[j] + acc : acc;
        }
    }
}

void matmul_tn_scalar(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate) {
    if (!accumulate) std::memset(c, 0, static_cast<size_t>(m) * n * sizeof(double));
    for (int p = 0; p < k; ++p) {
        const double* arow = a + static_cast<size_t>(p) * m;
        const double* brow = b + static_cast<size_t>(p) * n;
        for (int i = 0; i < m; ++i) {
            const double av = arow[i];
            double* crow = c + static_cast<size_t>(i) * n;
            for (int j = 0; j < n; ++j) crow[j] += av * brow[j];
        }
    }
}

void add_scalar(const double* a, const double* b, double* c, int n) {
    for (int i = 0; i < n; ++i) c[i] = a[i] + b[i];
}

void sub_scalar(const double* a, const double* b, double* c, int n) {
    for (int i = 0; i < n; ++i) c[i] = a[i] - b[i];
}

void mul_scalar(const double* a, const double* b, double* c, int n) {
    for (int i = 0; i < n; ++i) c[i] = a[i] * b[i];
}

void axpy_scalar(double alpha, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] += alpha * x[i];
}

void scale_scalar(double alpha, const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] = alpha * x[i];
}

double dot_scalar(const double* x, const double* y, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i] * y[i];
    return acc;
}

double sum_scalar(const double* x, int n) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) acc += x[i];
    return acc;
}

void relu_scalar(const double* x, double* y, int n) {
    for (int i = 0; i < n; ++i) y[i] = std::max(x[i], 0.0);
}

void tanh_grad_acc_scalar(const double* y, const double* g, double* gx, int n) {
    for (int i = 0; i < n; ++i) gx[i] += g[i] * (1.0 - y[i] * y[i]);
}

void logistic_grad_acc_scalar(const double* y, const double* g, double* gx, int n) {
    for (int i = 0; i < n; ++i) gx[i] += g[i] * y[i] * (1.0 - y[i]);
}

void relu_grad_acc_scalar(const double* x, const double* g, double* gx, int n) {
    for (int i = 0; i < n; ++i) gx[i] += x[i] > 0.0 ? g[i] : 0.0;
}

}  // namespace

const Ops& scalar_ops() {
    static const Ops ops{
        "scalar",
        matmul_nn_scalar, matmul_nt_scalar, matmul_tn_scalar,
        add_scalar, sub_scalar, mul_scalar, axpy_scalar, scale_scalar,
        dot_scalar, sum_scalar,
        relu_scalar,
        tanh_grad_acc_scalar, logistic_grad_acc_scalar, relu_grad_acc_scalar,
    };
    return ops;
}

}  // namespace pisac::kernels
