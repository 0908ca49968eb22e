#include "pisac/tape.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pisac/kernels.hpp"

namespace pisac {

namespace {

double stable_logistic(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

}  // namespace

int ParamStore::add(std::string name, Matrix init) {
    Param p;
    p.name = std::move(name);
    p.grad = Matrix(init.rows, init.cols);
    p.adam_m = Matrix(init.rows, init.cols);
    p.adam_v = Matrix(init.rows, init.cols);
    p.value = std::move(init);
    params_.push_back(std::move(p));
    return static_cast<int>(params_.size()) - 1;
}

void ParamStore::zero_grad() {
    for (auto& p : params_) std::fill(p.grad.data.begin(), p.grad.data.end(), 0.0);
}

double ParamStore::grad_norm() const {
    double sq = 0.0;
    for (const auto& p : params_)
        sq += kernels::active().dot(p.grad.data.data(), p.grad.data.data(), p.grad.size());
    return std::sqrt(sq);
}

void ParamStore::scale_grads(double factor) {
    for (auto& p : params_)
        kernels::active().scale(factor, p.grad.data.data(), p.grad.data.data(), p.grad.size());
}

bool ParamStore::all_finite() const {
    for (const auto& p : params_)
        for (double v : p.value.data)
            if (!std::isfinite(v)) return false;
    return true;
}

Matrix uniform_init(int rows, int cols, int fan_in, Rng& rng) {
    Matrix m(rows, cols);
    const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
    for (double& v : m.data) v = rng.uniform(-bound, bound);
    return m;
}

int Tape::push(Node node) {
    nodes_.push_back(std::move(node));
    return static_cast<int>(nodes_.size()) - 1;
}

Matrix& Tape::ensure_grad(int id) {
    Node& n = nodes_[static_cast<size_t>(id)];
    if (n.grad.size() == 0) n.grad = Matrix(n.value.rows, n.value.cols);
    return n.grad;
}

int Tape::constant(Matrix v) {
    Node n;
    n.op = Op::Constant;
    n.value = std::move(v);
    return push(std::move(n));
}

int Tape::param(int param_index) {
    if (!params_) throw std::logic_error("tape has no parameter store");
    Node n;
    n.op = Op::ParamLeaf;
    n.param_index = param_index;
    n.value = (*params_)[param_index].value;
    return push(std::move(n));
}

int Tape::matmul_nt(int x, int w) {
    const Matrix& xv = val(x);
    const Matrix& wv = val(w);
    if (xv.cols != wv.cols) throw std::invalid_argument("matmul_nt: inner dimensions disagree");
    Node n;
    n.op = Op::MatmulNT;
    n.a = x;
    n.b = w;
    n.value = Matrix(xv.rows, wv.rows);
    kernels::active().matmul_nt(xv.data.data(), wv.data.data(), n.value.data.data(), xv.rows,
                                xv.cols, wv.rows, false);
    return push(std::move(n));
}

int Tape::add(int a, int b) {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("add: shape mismatch");
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.value = Matrix(av.rows, av.cols);
    kernels::active().add(av.data.data(), bv.data.data(), n.value.data.data(), av.size());
    return push(std::move(n));
}

int Tape::add_row(int x, int bias) {
    const Matrix& xv = val(x);
    const Matrix& bv = val(bias);
    if (bv.rows != 1 || bv.cols != xv.cols) throw std::invalid_argument("add_row: bias must be 1 x cols");
    Node n;
    n.op = Op::AddRow;
    n.a = x;
    n.b = bias;
    n.value = Matrix(xv.rows, xv.cols);
    for (int r = 0; r < xv.rows; ++r)
        kernels::active().add(xv.row(r), bv.row(0), n.value.row(r), xv.cols);
    return push(std::move(n));
}

int Tape::sub(int a, int b) {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("sub: shape mismatch");
    Node n;
    n.op = Op::Sub;
    n.a = a;
    n.b = b;
    n.value = Matrix(av.rows, av.cols);
    kernels::active().sub(av.data.data(), bv.data.data(), n.value.data.data(), av.size());
    return push(std::move(n));
}

int Tape::mul(int a, int b) {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("mul: shape mismatch");
    Node n;
    n.op = Op::Mul;
    n.a = a;
    n.b = b;
    n.value = Matrix(av.rows, av.cols);
    kernels::active().mul(av.data.data(), bv.data.data(), n.value.data.data(), av.size());
    return push(std::move(n));
}

int Tape::div(int a, int b) {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("div: shape mismatch");
    Node n;
    n.op = Op::Div;
    n.a = a;
    n.b = b;
    n.value = Matrix(av.rows, av.cols);
    for (int i = 0; i < av.size(); ++i) n.value.data[static_cast<size_t>(i)] =
        av.data[static_cast<size_t>(i)] / bv.data[static_cast<size_t>(i)];
    return push(std::move(n));
}

int Tape::scale(int a, double c) {
    const Matrix& av = val(a);
    Node n;
    n.op = Op::Scale;
    n.a = a;
    n.c0 = c;
    n.value = Matrix(av.rows, av.cols);
    kernels::active().scale(c, av.data.data(), n.value.data.data(), av.size());
    return push(std::move(n));
}

int Tape::add_const(int a, double c) {
    const Matrix& av = val(a);
    Node n;
    n.op = Op::AddConst;
    n.a = a;
    n.c0 = c;
    n.value = av;
    for (double& v : n.value.data) v += c;
    return push(std::move(n));
}

int Tape::tanh_op(int a) {
    Node n;
    n.op = Op::Tanh;
    n.a = a;
    n.value = val(a);
    for (double& v : n.value.data) v = std::tanh(v);
    return push(std::move(n));
}

int Tape::relu_op(int a) {
    const Matrix& av = val(a);
    Node n;
    n.op = Op::Relu;
    n.a = a;
    n.value = Matrix(av.rows, av.cols);
    kernels::active().relu(av.data.data(), n.value.data.data(), av.size());
    return push(std::move(n));
}

int Tape::logistic_op(int a) {
    Node n;
    n.op = Op::Logistic;
    n.a = a;
    n.value = val(a);
    for (double& v : n.value.data) v = stable_logistic(v);
    return push(std::move(n));
}

int Tape::exp_op(int a) {
    Node n;
    n.op = Op::Exp;
    n.a = a;
    n.value = val(a);
    for (double& v : n.value.data) v = std::exp(v);
    return push(std::move(n));
}

int Tape::clip(int a, double lo, double hi) {
    Node n;
    n.op = Op::Clip;
    n.a = a;
    n.c0 = lo;
    n.c1 = hi;
    n.value = val(a);
    for (double& v : n.value.data) v = std::clamp(v, lo, hi);
    return push(std::move(n));
}

int Tape::min_elem(int a, int b) {
    const Matrix& av = val(a);
    const Matrix& bv = val(b);
    if (!av.same_shape(bv)) throw std::invalid_argument("min_elem: shape mismatch");
    Node n;
    n.op = Op::MinElem;
    n.a = a;
    n.b = b;
    n.value = Matrix(av.rows, av.cols);
    for (int i = 0; i < av.size(); ++i)
        n.value.data[static_cast<size_t>(i)] =
            std::min(av.data[static_cast<size_t>(i)], bv.data[static_cast<size_t>(i)]);
    return push(std::move(n));
}

int Tape::softmax_rows(int a) {
    Node n;
    n.op = Op::SoftmaxRows;
    n.a = a;
    n.value = val(a);
    for (int r = 0; r < n.value.rows; ++r) {
        double* row = n.value.row(r);
        const double m = *std::max_element(row, row + n.value.cols);
        double sum = 0.0;
        for (int c = 0; c < n.value.cols; ++c) {
            row[c] = std::exp(row[c] - m);
            sum += row[c];
        }
        for (int c = 0; c < n.value.cols; ++c) row[c] /= sum;
    }
    return push(std::move(n));
}

int Tape::gather_sum(int h, const EdgeList* edges) {
    const Matrix& hv = val(h);
    Node n;
    n.op = Op::GatherSum;
    n.a = h;
    n.edges = edges;
    n.value = Matrix(hv.rows, hv.cols);
    for (const auto& [src, dst] : *edges) {
        if (src < 0 || src >= hv.rows || dst < 0 || dst >= hv.rows)
            throw std::invalid_argument("gather_sum: edge endpoint out of range");
        kernels::active().axpy(1.0, hv.row(src), n.value.row(dst), hv.cols);
    }
    return push(std::move(n));
}

int Tape::mean_rows(int a) {
    const Matrix& av = val(a);
    if (av.rows < 1) throw std::invalid_argument("mean_rows: empty input");
    Node n;
    n.op = Op::MeanRows;
    n.a = a;
    n.value = Matrix(1, av.cols);
    for (int r = 0; r < av.rows; ++r)
        kernels::active().axpy(1.0, av.row(r), n.value.row(0), av.cols);
    kernels::active().scale(1.0 / av.rows, n.value.row(0), n.value.row(0), av.cols);
    return push(std::move(n));
}

int Tape::sum_all(int a) {
    const Matrix& av = val(a);
    Node n;
    n.op = Op::SumAll;
    n.a = a;
    n.value = Matrix(1, 1);
    n.value.data[0] = kernels::active().sum(av.data.data(), av.size());
    return push(std::move(n));
}

void Tape::backward(int root) {
    if (root < 0 || root >= node_count()) throw std::invalid_argument("backward: bad root id");
    if (!val(root).is_scalar()) throw std::invalid_argument("backward: root must be a 1x1 scalar");

    ensure_grad(root).data[0] = 1.0;
    const auto& ops = kernels::active();

    for (int id = root; id >= 0; --id) {
        Node& n = nodes_[static_cast<size_t>(id)];
        if (n.grad.size() == 0) continue;  // not on a path to the root
        const Matrix& g = n.grad;
        switch (n.op) {
            case Op::Constant:
                break;
            case Op::ParamLeaf: {
                Matrix& pg = (*params_)[n.param_index].grad;
                ops.axpy(1.0, g.data.data(), pg.data.data(), g.size());
                break;
            }
            case Op::MatmulNT: {
                // value = X * W^T with X (m x k), W (n x k), g (m x n)
                const Matrix& xv = val(n.a);
                const Matrix& wv = val(n.b);
                Matrix& gx = ensure_grad(n.a);
                Matrix& gw = ensure_grad(n.b);
                ops.matmul_nn(g.data.data(), wv.data.data(), gx.data.data(), g.rows, g.cols,
                              wv.cols, true);
                ops.matmul_tn(g.data.data(), xv.data.data(), gw.data.data(), g.cols, g.rows,
                              xv.cols, true);
                break;
            }
            case Op::Add:
                ops.axpy(1.0, g.data.data(), ensure_grad(n.a).data.data(), g.size());
                ops.axpy(1.0, g.data.data(), ensure_grad(n.b).data.data(), g.size());
                break;
            case Op::AddRow: {
                ops.axpy(1.0, g.data.data(), ensure_grad(n.a).data.data(), g.size());
                Matrix& gb = ensure_grad(n.b);
                for (int r = 0; r < g.rows; ++r) ops.axpy(1.0, g.row(r), gb.row(0), g.cols);
                break;
            }
            case Op::Sub:
                ops.axpy(1.0, g.data.data(), ensure_grad(n.a).data.data(), g.size());
                ops.axpy(-1.0, g.data.data(), ensure_grad(n.b).data.data(), g.size());
                break;
            case Op::Mul: {
                Matrix& ga = ensure_grad(n.a);
                Matrix& gb = ensure_grad(n.b);
                const Matrix& av = val(n.a);
                const Matrix& bv = val(n.b);
                for (int i = 0; i < g.size(); ++i) {
                    ga.data[static_cast<size_t>(i)] +=
                        g.data[static_cast<size_t>(i)] * bv.data[static_cast<size_t>(i)];
                    gb.data[static_cast<size_t>(i)] +=
                        g.data[static_cast<size_t>(i)] * av.data[static_cast<size_t>(i)];
                }
                break;
            }
            case Op::Div: {
                Matrix& ga = ensure_grad(n.a);
                Matrix& gb = ensure_grad(n.b);
                const Matrix& bv = val(n.b);
                for (int i = 0; i < g.size(); ++i) {
                    const double inv = 1.0 / bv.data[static_cast<size_t>(i)];
                    ga.data[static_cast<size_t>(i)] += g.data[static_cast<size_t>(i)] * inv;
                    gb.data[static_cast<size_t>(i)] -= g.data[static_cast<size_t>(i)] *
                                                       n.value.data[static_cast<size_t>(i)] * inv;
                }
                break;
            }
            case Op::Scale:
                ops.axpy(n.c0, g.data.data(), ensure_grad(n.a).data.data(), g.size());
                break;
            case Op::AddConst:
                ops.axpy(1.0, g.data.data(), ensure_grad(n.a).data.data(), g.size());
                break;
            case Op::Tanh:
                ops.tanh_grad_acc(n.value.data.data(), g.data.data(),
                                  ensure_grad(n.a).data.data(), g.size());
                break;
            case Op::Relu:
                ops.relu_grad_acc(val(n.a).data.data(), g.data.data(),
                                  ensure_grad(n.a).data.data(), g.size());
                break;
            case Op::Logistic:
                ops.logistic_grad_acc(n.value.data.data(), g.data.data(),
                                      ensure_grad(n.a).data.data(), g.size());
                break;
            case Op::Exp: {
                Matrix& ga = ensure_grad(n.a);
                for (int i = 0; i < g.size(); ++i)
                    ga.data[static_cast<size_t>(i)] +=
                        g.data[static_cast<size_t>(i)] * n.value.data[static_cast<size_t>(i)];
                break;
            }
            case Op::Clip: {
                Matrix& ga = ensure_grad(n.a);
                const Matrix& av = val(n.a);
                for (int i = 0; i < g.size(); ++i) {
                    const double x = av.data[static_cast<size_t>(i)];
                    if (x >= n.c0 && x <= n.c1)
                        ga.data[static_cast<size_t>(i)] += g.data[static_cast<size_t>(i)];
                }
                break;
            }
            case Op::MinElem: {
                Matrix& ga = ensure_grad(n.a);
                Matrix& gb = ensure_grad(n.b);
                const Matrix& av = val(n.a);
                const Matrix& bv = val(n.b);
                for (int i = 0; i < g.size(); ++i) {
                    if (av.data[static_cast<size_t>(i)] <= bv.data[static_cast<size_t>(i)])
                        ga.data[static_cast<size_t>(i)] += g.data[static_cast<size_t>(i)];
                    else
                        gb.data[static_cast<size_t>(i)] += g.data[static_cast<size_t>(i)];
                }
                break;
            }
            case Op::SoftmaxRows: {
                Matrix& ga = ensure_grad(n.a);
                for (int r = 0; r < g.rows; ++r) {
                    const double* y = n.value.row(r);
                    const double* gr = g.row(r);
                    const double dotv = ops.dot(gr, y, g.cols);
                    double* gar = ga.row(r);
                    for (int c = 0; c < g.cols; ++c) gar[c] += y[c] * (gr[c] - dotv);
                }
                break;
            }
            case Op::GatherSum: {
                Matrix& ga = ensure_grad(n.a);
                for (const auto& [src, dst] : *n.edges)
                    ops.axpy(1.0, g.row(dst), ga.row(src), g.cols);
                break;
            }
            case Op::MeanRows: {
                Matrix& ga = ensure_grad(n.a);
                const double inv = 1.0 / ga.rows;
                for (int r = 0; r < ga.rows; ++r) ops.axpy(inv, g.row(0), ga.row(r), g.cols);
                break;
            }
            case Op::SumAll: {
                Matrix& ga = ensure_grad(n.a);
                const double gv = g.data[0];
                for (double& v : ga.data) v += gv;
                break;
            }
        }
    }
}

}  // namespace pisac
