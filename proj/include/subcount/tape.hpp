#pragma once

#include <vector>

#include "subcount/tensor.hpp"

namespace subcount {

// Reverse-mode autodiff over a fixed op set. A tape is built per forward
// pass, backward() walks it once in reverse, and gradients land next to
// each node. Ops validate shapes eagerly so a mismatch fails at build time
// with the op name, not deep inside backward.
//
// The op set is intentionally small: dense matmul, adds, two activations,
// row reductions, concat, and row gather/scatter. Message passing over a
// graph is gather(sender rows) -> scatter-add(receiver rows), which keeps
// the graph structure out of the tape core entirely.
class Tape {
public:
    using Id = int;

    Id leaf(Tensor2 value);                    // inputs and parameters
    Id matmul(Id a, Id b);                     // (r x k)(k x c)
    Id add(Id a, Id b);                        // same shape
    Id add_rowvec(Id a, Id bias);              // bias 1 x c, broadcast down the rows
    Id leaky_relu(Id a, double slope);
    Id sigmoid(Id a);
    Id sum_rows(Id a);                         // column sums -> 1 x c
    Id concat_cols(Id a, Id b);                // [a | b]
    Id gather_rows(Id a, std::vector<int> rows);
    // out has num_groups rows; row i of `a` is added into row groups[i]
    Id scatter_add_rows(Id a, std::vector<int> groups, int num_groups);
    Id scale(Id a, double c);
    Id mul_scalar(Id a, Id s);                 // s is 1x1
    Id rsub_const(double c, Id a);             // c - a, elementwise
    // elementwise smooth-l1 against fixed targets: 0.5 d^2 inside |d|<1,
    // |d| - 0.5 outside
    Id smooth_l1(Id pred, Tensor2 targets);

    const Tensor2& value(Id id) const { return nodes_[id].value; }
    const Tensor2& grad(Id id) const { return nodes_[id].grad; }

    // Seeds d(root)/d(root) = 1 and accumulates gradients for every node.
    // root must be 1x1.
    void backward(Id root);

    size_t num_nodes() const { return nodes_.size(); }

private:
    enum class Op {
        Leaf,
        Matmul,
        Add,
        AddRowVec,
        LeakyRelu,
        Sigmoid,
        SumRows,
        ConcatCols,
        GatherRows,
        ScatterAddRows,
        Scale,
        MulScalar,
        RsubConst,
        SmoothL1,
    };
    struct Node {
        Op op;
        Id a = -1, b = -1;
        double c = 0.0;             // slope / scale / constant
        std::vector<int> index;     // gather rows or scatter groups
        Tensor2 aux;                // smooth_l1 targets
        Tensor2 value;
        Tensor2 grad;
    };
    std::vector<Node> nodes_;

    Id push(Node n);
    const Tensor2& val(Id id) const { return nodes_[id].value; }
};

// Scalar helper mirroring the tape's smooth-l1, for direct use in metrics.
double smooth_l1_value(double pred, double target);

}  // namespace subcount
