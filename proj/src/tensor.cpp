#include "subcount/tensor.hpp"

#include <cmath>

#include "subcount/error.hpp"

namespace subcount {

Tensor2 Tensor2::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    Tensor2 t(static_cast<int>(rows.size()), rows.size() ? static_cast<int>(rows.begin()->size()) : 0);
    int r = 0;
    for (const auto& row : rows) {
        if (static_cast<int>(row.size()) != t.cols)
            throw ValidationError("tensor: ragged initializer");
        int c = 0;
        for (double v : row) t.at(r, c++) = v;
        ++r;
    }
    return t;
}

Tensor2 Tensor2::column(const std::vector<double>& v) {
    Tensor2 t(static_cast<int>(v.size()), 1);
    for (size_t i = 0; i < v.size(); ++i) t.data[i] = v[i];
    return t;
}

bool all_finite(const Tensor2& t) {
    for (double v : t.data)
        if (!std::isfinite(v)) return false;
    return true;
}

double frobenius_distance(const Tensor2& a, const Tensor2& b) {
    if (!a.same_shape(b)) throw ValidationError("tensor: shape mismatch in distance");
    double acc = 0;
    for (size_t i = 0; i < a.data.size(); ++i) {
        double d = a.data[i] - b.data[i];
        acc += d * d;
    }
    return std::sqrt(acc);
}

}  // namespace subcount
