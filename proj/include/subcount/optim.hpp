#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "subcount/tensor.hpp"

namespace subcount {

// Named parameter tensors with their Adam moments. Iteration follows
// insertion order everywhere (std::map inside would reorder, and ordering
// leaks into checkpoint bytes, which must be reproducible).
struct ParamStore {
    std::vector<std::string> names;
    std::map<std::string, Tensor2> values;
    std::map<std::string, Tensor2> moment1, moment2;
    int64_t step_count = 0;

    Tensor2& add(const std::string& name, Tensor2 init);
    Tensor2& get(const std::string& name);
    const Tensor2& get(const std::string& name) const;
    bool has(const std::string& name) const { return values.count(name) != 0; }
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// One bias-corrected Adam update over every parameter present in `grads`.
// Missing names are an error, as are non-finite gradients.
void adam_step(ParamStore& params, const std::map<std::string, Tensor2>& grads,
               const AdamConfig& cfg);

// Uniform(-a, a) with a = sqrt(6 / (fan_in + fan_out)).
Tensor2 xavier_init(int rows, int cols, uint64_t seed);

// Versioned JSON checkpoint: kind, free-form hyperparameter block, and all
// tensors by name. Loading restores names, values, and step count; Adam
// moments are not persisted (training restarts fresh from a checkpoint).
void save_checkpoint(const std::string& path, const std::string& kind,
                     const std::map<std::string, double>& hyper, const ParamStore& params);
struct Checkpoint {
    std::string kind;
    std::map<std::string, double> hyper;
    ParamStore params;
};
Checkpoint load_checkpoint(const std::string& path);

}  // namespace subcount
