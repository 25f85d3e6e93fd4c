#pragma once

#include <initializer_list>
#include <vector>

namespace subcount {

// Row-major 2-d tensor of doubles. Everything the models need fits in two
// dimensions (node states, weights, row-vector biases, 1x1 scalars).
struct Tensor2 {
    int rows = 0, cols = 0;
    std::vector<double> data;

    Tensor2() = default;
    Tensor2(int r, int c) : rows(r), cols(c), data(static_cast<size_t>(r) * c, 0.0) {}

    double& at(int r, int c) { return data[static_cast<size_t>(r) * cols + c]; }
    double at(int r, int c) const { return data[static_cast<size_t>(r) * cols + c]; }
    size_t size() const { return data.size(); }
    bool same_shape(const Tensor2& o) const { return rows == o.rows && cols == o.cols; }

    static Tensor2 zeros(int r, int c) { return Tensor2(r, c); }
    static Tensor2 scalar(double v) {
        Tensor2 t(1, 1);
        t.data[0] = v;
        return t;
    }
    static Tensor2 from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Tensor2 column(const std::vector<double>& v);
};

bool all_finite(const Tensor2& t);
double frobenius_distance(const Tensor2& a, const Tensor2& b);

}  // namespace subcount
