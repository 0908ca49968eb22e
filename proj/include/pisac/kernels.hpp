#pragma once

// Dense double-precision kernels backing the tape engine. A scalar reference
// implementation always exists; an AVX2+FMA variant is compiled on x86-64 and
// selected at runtime when the CPU supports it. Both variants share this
// table, so callers never branch on the ISA themselves.
//
// All matrices are row-major. Matmul shapes:
//   nn: C(m x n) = A(m x k) * B(k x n)
//   nt: C(m x n) = A(m x k) * B(n x k)^T
//   tn: C(m x n) = A(k x m)^T * B(k x n)
// When `accumulate` is true the product is added into C instead of
// overwriting it.

namespace pisac::kernels {

struct Ops {
    const char* name;

    void (*matmul_nn)(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate);
    void (*matmul_nt)(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate);
    void (*matmul_tn)(const double* a, const double* b, double* c, int m, int k, int n, bool accumulate);

    void (*add)(const double* a, const double* b, double* c, int n);   // c = a + b
    void (*sub)(const double* a, const double* b, double* c, int n);   // c = a - b
    void (*mul)(const double* a, const double* b, double* c, int n);   // c = a .* b
    void (*axpy)(double alpha, const double* x, double* y, int n);     // y += alpha * x
    void (*scale)(double alpha, const double* x, double* y, int n);    // y = alpha * x
    double (*dot)(const double* x, const double* y, int n);
    double (*sum)(const double* x, int n);

    void (*relu)(const double* x, double* y, int n);
    // Activation backward products; `y` is the forward output (tanh/logistic)
    // or the forward input (relu). All accumulate into gx.
    void (*tanh_grad_acc)(const double* y, const double* g, double* gx, int n);
    void (*logistic_grad_acc)(const double* y, const double* g, double* gx, int n);
    void (*relu_grad_acc)(const double* x, const double* g, double* gx, int n);
};

enum class Backend { Auto, Scalar, Avx2 };

// Active table. Resolved once on first use: explicit select() wins, then the
// PISAC_KERNELS environment variable (scalar|avx2|auto), then CPU detection.
const Ops& active();

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when not compiled in or CPU lacks AVX2+FMA

// Force a backend (throws std::runtime_error if unavailable). Intended for
// tests and the CLI flag; affects subsequent active() calls.
void select(Backend backend);

}  // namespace pisac::kernels
