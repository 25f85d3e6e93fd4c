#include "subcount/optim.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "subcount/rng.hpp"

namespace subcount {

Tensor2& ParamStore::add(const std::string& name, Tensor2 init) {
    if (values.count(name)) throw std::logic_error("duplicate parameter: " + name);
    names.push_back(name);
    moment1[name] = Tensor2::zeros(init.rows, init.cols);
    moment2[name] = Tensor2::zeros(init.rows, init.cols);
    return values[name] = std::move(init);
}

Tensor2& ParamStore::get(const std::string& name) {
    auto it = values.find(name);
    if (it == values.end()) throw std::logic_error("unknown parameter: " + name);
    return it->second;
}

const Tensor2& ParamStore::get(const std::string& name) const {
    auto it = values.find(name);
    if (it == values.end()) throw std::logic_error("unknown parameter: " + name);
    return it->second;
}

void adam_step(ParamStore& params, const std::map<std::string, Tensor2>& grads,
               const AdamConfig& cfg) {
    params.step_count += 1;
    const double c1 = 1.0 - std::pow(cfg.beta1, double(params.step_count));
    const double c2 = 1.0 - std::pow(cfg.beta2, double(params.step_count));
    for (const auto& name : params.names) {
        auto git = grads.find(name);
        if (git == grads.end()) throw std::logic_error("missing gradient for: " + name);
        const Tensor2& g = git->second;
        Tensor2& v = params.values[name];
        if (!g.same_shape(v)) throw std::logic_error("gradient shape mismatch for: " + name);
        if (!all_finite(g)) throw std::runtime_error("non-finite gradient for: " + name);
        Tensor2& m1 = params.moment1[name];
        Tensor2& m2 = params.moment2[name];
        for (size_t i = 0; i < v.data.size(); ++i) {
            m1.data[i] = cfg.beta1 * m1.data[i] + (1.0 - cfg.beta1) * g.data[i];
            m2.data[i] = cfg.beta2 * m2.data[i] + (1.0 - cfg.beta2) * g.data[i] * g.data[i];
            double mhat = m1.data[i] / c1;
            double vhat = m2.data[i] / c2;
            v.data[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
}

Tensor2 xavier_init(int rows, int cols, uint64_t seed) {
    Tensor2 t = Tensor2::zeros(rows, cols);
    double a = std::sqrt(6.0 / double(rows + cols));
    Rng rng(seed);
    for (double& x : t.data) x = (2.0 * rng.next_double() - 1.0) * a;
    return t;
}

void save_checkpoint(const std::string& path, const std::string& kind,
                     const std::map<std::string, double>& hyper, const ParamStore& params) {
    nlohmann::ordered_json j;
    j["format"] = "subcount-checkpoint";
    j["version"] = 1;
    j["kind"] = kind;
    j["step_count"] = params.step_count;
    nlohmann::ordered_json h = nlohmann::ordered_json::object();
    for (const auto& [k, v] : hyper) h[k] = v;
    j["hyper"] = std::move(h);
    nlohmann::ordered_json tensors = nlohmann::ordered_json::array();
    for (const auto& name : params.names) {
        const Tensor2& t = params.values.at(name);
        nlohmann::ordered_json tj;
        tj["name"] = name;
        tj["rows"] = t.rows;
        tj["cols"] = t.cols;
        tj["data"] = t.data;
        tensors.push_back(std::move(tj));
    }
    j["tensors"] = std::move(tensors);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << j.dump(2) << "\n";
}

Checkpoint load_checkpoint(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    nlohmann::json j;
    in >> j;
    if (j.value("format", "") != "subcount-checkpoint")
        throw std::runtime_error(path + ": not a checkpoint file");
    if (j.value("version", 0) != 1)
        throw std::runtime_error(path + ": unsupported checkpoint version");
    Checkpoint ck;
    ck.kind = j.at("kind").get<std::string>();
    for (auto it = j.at("hyper").begin(); it != j.at("hyper").end(); ++it)
        ck.hyper[it.key()] = it.value().get<double>();
    ck.params.step_count = j.at("step_count").get<int64_t>();
    for (const auto& tj : j.at("tensors")) {
        Tensor2 t = Tensor2::zeros(tj.at("rows").get<int>(), tj.at("cols").get<int>());
        auto data = tj.at("data").get<std::vector<double>>();
        if (data.size() != t.data.size())
            throw std::runtime_error(path + ": tensor size mismatch");
        t.data = std::move(data);
        ck.params.add(tj.at("name").get<std::string>(), std::move(t));
    }
    return ck;
}

}  // namespace subcount
