#include "subcount/tape.hpp"

#include <cmath>
#include <string>

#include "subcount/error.hpp"

namespace subcount {

double smooth_l1_value(double pred, double target) {
    double d = pred - target;
    double a = std::fabs(d);
    return a < 1.0 ? 0.5 * d * d : a - 0.5;
}

Tape::Id Tape::push(Node n) {
    n.grad = Tensor2::zeros(n.value.rows, n.value.cols);
    nodes_.push_back(std::move(n));
    return static_cast<Id>(nodes_.size() - 1);
}

namespace {
[[noreturn]] void shape_fail(const char* op, const Tensor2& a, const Tensor2& b) {
    throw ValidationError(std::string("tape: ") + op + " shape mismatch (" +
                          std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
                          std::to_string(b.rows) + "x" + std::to_string(b.cols) + ")");
}
}  // namespace

Tape::Id Tape::leaf(Tensor2 value) {
    Node n;
    n.op = Op::Leaf;
    n.value = std::move(value);
    return push(std::move(n));
}

Tape::Id Tape::matmul(Id a, Id b) {
    const Tensor2& A = val(a);
    const Tensor2& B = val(b);
    if (A.cols != B.rows) shape_fail("matmul", A, B);
    Node n;
    n.op = Op::Matmul;
    n.a = a;
    n.b = b;
    n.value = Tensor2::zeros(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int k = 0; k < A.cols; ++k) {
            double aik = A.at(i, k);
            if (aik == 0.0) continue;
            for (int j = 0; j < B.cols; ++j) n.value.at(i, j) += aik * B.at(k, j);
        }
    return push(std::move(n));
}

Tape::Id Tape::add(Id a, Id b) {
    const Tensor2& A = val(a);
    const Tensor2& B = val(b);
    if (!A.same_shape(B)) shape_fail("add", A, B);
    Node n;
    n.op = Op::Add;
    n.a = a;
    n.b = b;
    n.value = A;
    for (size_t i = 0; i < B.data.size(); ++i) n.value.data[i] += B.data[i];
    return push(std::move(n));
}

Tape::Id Tape::add_rowvec(Id a, Id bias) {
    const Tensor2& A = val(a);
    const Tensor2& B = val(bias);
    if (B.rows != 1 || B.cols != A.cols) shape_fail("add_rowvec", A, B);
    Node n;
    n.op = Op::AddRowVec;
    n.a = a;
    n.b = bias;
    n.value = A;
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) n.value.at(i, j) += B.at(0, j);
    return push(std::move(n));
}

Tape::Id Tape::leaky_relu(Id a, double slope) {
    Node n;
    n.op = Op::LeakyRelu;
    n.a = a;
    n.c = slope;
    n.value = val(a);
    for (double& v : n.value.data)
        if (v < 0) v *= slope;
    return push(std::move(n));
}

Tape::Id Tape::sigmoid(Id a) {
    Node n;
    n.op = Op::Sigmoid;
    n.a = a;
    n.value = val(a);
    for (double& v : n.value.data) v = 1.0 / (1.0 + std::exp(-v));
    return push(std::move(n));
}

Tape::Id Tape::sum_rows(Id a) {
    const Tensor2& A = val(a);
    Node n;
    n.op = Op::SumRows;
    n.a = a;
    n.value = Tensor2::zeros(1, A.cols);
    for (int i = 0; i < A.rows; ++i)
        for (int j = 0; j < A.cols; ++j) n.value.at(0, j) += A.at(i, j);
    return push(std::move(n));
}

Tape::Id Tape::concat_cols(Id a, Id b) {
    const Tensor2& A = val(a);
    const Tensor2& B = val(b);
    if (A.rows != B.rows) shape_fail("concat_cols", A, B);
    Node n;
    n.op = Op::ConcatCols;
    n.a = a;
    n.b = b;
    n.value = Tensor2::zeros(A.rows, A.cols + B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int j = 0; j < A.cols; ++j) n.value.at(i, j) = A.at(i, j);
        for (int j = 0; j < B.cols; ++j) n.value.at(i, A.cols + j) = B.at(i, j);
    }
    return push(std::move(n));
}

Tape::Id Tape::gather_rows(Id a, std::vector<int> rows) {
    const Tensor2& A = val(a);
    for (int r : rows)
        if (r < 0 || r >= A.rows) throw ValidationError("tape: gather row out of range");
    Node n;
    n.op = Op::GatherRows;
    n.a = a;
    n.value = Tensor2::zeros(static_cast<int>(rows.size()), A.cols);
    for (size_t i = 0; i < rows.size(); ++i)
        for (int j = 0; j < A.cols; ++j) n.value.at(static_cast<int>(i), j) = A.at(rows[i], j);
    n.index = std::move(rows);
    return push(std::move(n));
}

Tape::Id Tape::scatter_add_rows(Id a, std::vector<int> groups, int num_groups) {
    const Tensor2& A = val(a);
    if (static_cast<int>(groups.size()) != A.rows)
        throw ValidationError("tape: scatter needs one group per row");
    for (int gr : groups)
        if (gr < 0 || gr >= num_groups) throw ValidationError("tape: scatter group out of range");
    Node n;
    n.op = Op::ScatterAddRows;
    n.a = a;
    n.value = Tensor2::zeros(num_groups, A.cols);
    for (size_t i = 0; i < groups.size(); ++i)
        for (int j = 0; j < A.cols; ++j)
            n.value.at(groups[i], j) += A.at(static_cast<int>(i), j);
    n.index = std::move(groups);
    return push(std::move(n));
}

Tape::Id Tape::scale(Id a, double c) {
    Node n;
    n.op = Op::Scale;
    n.a = a;
    n.c = c;
    n.value = val(a);
    for (double& v : n.value.data) v *= c;
    return push(std::move(n));
}

Tape::Id Tape::mul_scalar(Id a, Id s) {
    const Tensor2& S = val(s);
    if (S.rows != 1 || S.cols != 1) shape_fail("mul_scalar", val(a), S);
    Node n;
    n.op = Op::MulScalar;
    n.a = a;
    n.b = s;
    n.value = val(a);
    for (double& v : n.value.data) v *= S.data[0];
    return push(std::move(n));
}

Tape::Id Tape::rsub_const(double c, Id a) {
    Node n;
    n.op = Op::RsubConst;
    n.a = a;
    n.c = c;
    n.value = val(a);
    for (double& v : n.value.data) v = c - v;
    return push(std::move(n));
}

Tape::Id Tape::smooth_l1(Id pred, Tensor2 targets) {
    const Tensor2& P = val(pred);
    if (!P.same_shape(targets)) shape_fail("smooth_l1", P, targets);
    Node n;
    n.op = Op::SmoothL1;
    n.a = pred;
    n.value = Tensor2::zeros(P.rows, P.cols);
    for (size_t i = 0; i < P.data.size(); ++i)
        n.value.data[i] = smooth_l1_value(P.data[i], targets.data[i]);
    n.aux = std::move(targets);
    return push(std::move(n));
}

void Tape::backward(Id root) {
    if (root < 0 || root >= static_cast<Id>(nodes_.size()))
        throw ValidationError("tape: bad backward root");
    if (nodes_[root].value.rows != 1 || nodes_[root].value.cols != 1)
        throw ValidationError("tape: backward root must be a 1x1 scalar");
    for (auto& n : nodes_) std::fill(n.grad.data.begin(), n.grad.data.end(), 0.0);
    nodes_[root].grad.data[0] = 1.0;

    for (Id id = root; id >= 0; --id) {
        Node& n = nodes_[id];
        bool any = false;
        for (double gv : n.grad.data)
            if (gv != 0.0) {
                any = true;
                break;
            }
        if (!any) continue;
        const Tensor2& g = n.grad;
        switch (n.op) {
            case Op::Leaf:
                break;
            case Op::Matmul: {
                const Tensor2& A = nodes_[n.a].value;
                const Tensor2& B = nodes_[n.b].value;
                Tensor2& gA = nodes_[n.a].grad;
                Tensor2& gB = nodes_[n.b].grad;
                // gA += g B^T, gB += A^T g
                for (int i = 0; i < A.rows; ++i)
                    for (int j = 0; j < B.cols; ++j) {
                        double gij = g.at(i, j);
                        if (gij == 0.0) continue;
                        for (int k = 0; k < A.cols; ++k) {
                            gA.at(i, k) += gij * B.at(k, j);
                            gB.at(k, j) += A.at(i, k) * gij;
                        }
                    }
                break;
            }
            case Op::Add:
                for (size_t i = 0; i < g.data.size(); ++i) {
                    nodes_[n.a].grad.data[i] += g.data[i];
                    nodes_[n.b].grad.data[i] += g.data[i];
                }
                break;
            case Op::AddRowVec: {
                Tensor2& gA = nodes_[n.a].grad;
                Tensor2& gB = nodes_[n.b].grad;
                for (int i = 0; i < g.rows; ++i)
                    for (int j = 0; j < g.cols; ++j) {
                        gA.at(i, j) += g.at(i, j);
                        gB.at(0, j) += g.at(i, j);
                    }
                break;
            }
            case Op::LeakyRelu: {
                const Tensor2& X = nodes_[n.a].value;
                for (size_t i = 0; i < g.data.size(); ++i)
                    nodes_[n.a].grad.data[i] += g.data[i] * (X.data[i] < 0 ? n.c : 1.0);
                break;
            }
            case Op::Sigmoid:
                for (size_t i = 0; i < g.data.size(); ++i) {
                    double s = n.value.data[i];
                    nodes_[n.a].grad.data[i] += g.data[i] * s * (1.0 - s);
                }
                break;
            case Op::SumRows: {
                Tensor2& gA = nodes_[n.a].grad;
                for (int i = 0; i < gA.rows; ++i)
                    for (int j = 0; j < gA.cols; ++j) gA.at(i, j) += g.at(0, j);
                break;
            }
            case Op::ConcatCols: {
                Tensor2& gA = nodes_[n.a].grad;
                Tensor2& gB = nodes_[n.b].grad;
                for (int i = 0; i < g.rows; ++i) {
                    for (int j = 0; j < gA.cols; ++j) gA.at(i, j) += g.at(i, j);
                    for (int j = 0; j < gB.cols; ++j) gB.at(i, j) += g.at(i, gA.cols + j);
                }
                break;
            }
            case Op::GatherRows: {
                Tensor2& gA = nodes_[n.a].grad;
                for (size_t i = 0; i < n.index.size(); ++i)
                    for (int j = 0; j < g.cols; ++j)
                        gA.at(n.index[i], j) += g.at(static_cast<int>(i), j);
                break;
            }
            case Op::ScatterAddRows: {
                Tensor2& gA = nodes_[n.a].grad;
                for (size_t i = 0; i < n.index.size(); ++i)
                    for (int j = 0; j < g.cols; ++j)
                        gA.at(static_cast<int>(i), j) += g.at(n.index[i], j);
                break;
            }
            case Op::Scale:
                for (size_t i = 0; i < g.data.size(); ++i)
                    nodes_[n.a].grad.data[i] += g.data[i] * n.c;
                break;
            case Op::MulScalar: {
                const Tensor2& A = nodes_[n.a].value;
                double s = nodes_[n.b].value.data[0];
                double& gs = nodes_[n.b].grad.data[0];
                for (size_t i = 0; i < g.data.size(); ++i) {
                    nodes_[n.a].grad.data[i] += g.data[i] * s;
                    gs += g.data[i] * A.data[i];
                }
                break;
            }
            case Op::RsubConst:
                for (size_t i = 0; i < g.data.size(); ++i) nodes_[n.a].grad.data[i] -= g.data[i];
                break;
            case Op::SmoothL1: {
                const Tensor2& P = nodes_[n.a].value;
                for (size_t i = 0; i < g.data.size(); ++i) {
                    double d = P.data[i] - n.aux.data[i];
                    double dd = std::fabs(d) < 1.0 ? d : (d > 0 ? 1.0 : -1.0);
                    nodes_[n.a].grad.data[i] += g.data[i] * dd;
                }
                break;
            }
        }
    }
}

}  // namespace subcount
