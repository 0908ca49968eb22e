#pragma once

#include <string>
#include <utility>
#include <vector>

#include "pisac/matrix.hpp"
#include "pisac/rng.hpp"

namespace pisac {

/// Named leaf matrices with gradient accumulators and optimizer slots.
class ParamStore {
  public:
    struct Param {
        std::string name;
        Matrix value;
        Matrix grad;
        Matrix adam_m;
        Matrix adam_v;
    };

    int add(std::string name, Matrix init);
    int size() const { return static_cast<int>(params_.size()); }
    Param& operator[](int i) { return params_[static_cast<size_t>(i)]; }
    const Param& operator[](int i) const { return params_[static_cast<size_t>(i)]; }

    void zero_grad();
    double grad_norm() const;
    void scale_grads(double factor);
    bool all_finite() const;

    std::vector<Param>& all() { return params_; }
    const std::vector<Param>& all() const { return params_; }

  private:
    std::vector<Param> params_;
};

/// Uniform init in [-1/sqrt(fan_in), 1/sqrt(fan_in)], row-major fill order so
/// identical seeds give identical parameter bytes.
Matrix uniform_init(int rows, int cols, int fan_in, Rng& rng);

using EdgeList = std::vector<std::pair<int, int>>;

/// Append-only reverse-mode tape over matrix-valued nodes. Node inputs always
/// precede the node itself, so one reverse sweep accumulates every gradient.
/// Parameter leaves are bound to a ParamStore; backward() adds their adjoints
/// into the store's grad buffers.
class Tape {
  public:
    explicit Tape(ParamStore* params = nullptr) : params_(params) {}

    int constant(Matrix v);
    int param(int param_index);  // requires a bound ParamStore

    int matmul_nt(int x, int w);           // x (m x k) times w (n x k) transposed
    int add(int a, int b);                 // same shape
    int add_row(int x, int bias);          // bias 1 x n broadcast over rows of x
    int sub(int a, int b);
    int mul(int a, int b);                 // elementwise
    int div(int a, int b);                 // elementwise
    int scale(int a, double c);
    int add_const(int a, double c);
    int tanh_op(int a);
    int relu_op(int a);
    int logistic_op(int a);
    int exp_op(int a);
    int clip(int a, double lo, double hi);
    int min_elem(int a, int b);            // ties route the gradient to a
    int softmax_rows(int a);               // rowwise, max-subtracted
    int gather_sum(int h, const EdgeList* edges);  // out[dst] += h[src] per edge
    int mean_rows(int a);                  // n x d -> 1 x d
    int sum_all(int a);                    // -> 1 x 1

    const Matrix& value(int id) const { return nodes_[static_cast<size_t>(id)].value; }
    const Matrix& grad(int id) const { return nodes_[static_cast<size_t>(id)].grad; }
    int node_count() const { return static_cast<int>(nodes_.size()); }

    /// Reverse accumulation from a scalar root. Throws std::invalid_argument
    /// when the root is not 1x1.
    void backward(int root);

  private:
    enum class Op {
        Constant, ParamLeaf, MatmulNT, Add, AddRow, Sub, Mul, Div, Scale, AddConst,
        Tanh, Relu, Logistic, Exp, Clip, MinElem, SoftmaxRows, GatherSum, MeanRows, SumAll,
    };

    struct Node {
        Op op;
        int a = -1;
        int b = -1;
        Matrix value;
        Matrix grad;       // sized lazily during backward
        double c0 = 0.0;   // scale factor / added constant / clip lo
        double c1 = 0.0;   // clip hi
        int param_index = -1;
        const EdgeList* edges = nullptr;
    };

    int push(Node node);
    Matrix& ensure_grad(int id);
    const Matrix& val(int id) const { return nodes_[static_cast<size_t>(id)].value; }

    std::vector<Node> nodes_;
    ParamStore* params_ = nullptr;
};

}  // namespace pisac
