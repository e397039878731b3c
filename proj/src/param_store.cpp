#include "sldm/param_store.hpp"

#include <cmath>

#include "sldm/errors.hpp"

namespace sldm {

void ParamStore::add(const std::string& name, Tensor value, bool trainable) {
    if (params_.count(name)) throw ConfigError("duplicate parameter name: " + name);
    Param p;
    p.grad = Tensor::zeros(value.n_rows, value.n_cols);
    p.adam_m = Tensor::zeros(value.n_rows, value.n_cols);
    p.adam_v = Tensor::zeros(value.n_rows, value.n_cols);
    p.value = std::move(value);
    p.trainable = trainable;
    params_.emplace(name, std::move(p));
}

Param& ParamStore::at(const std::string& name) {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

const Param& ParamStore::at(const std::string& name) const {
    auto it = params_.find(name);
    if (it == params_.end()) throw ConfigError("unknown parameter: " + name);
    return it->second;
}

std::vector<std::string> ParamStore::names() const {
    std::vector<std::string> out;
    out.reserve(params_.size());
    for (const auto& [k, _] : params_) out.push_back(k);
    return out;
}

void ParamStore::zero_grads() {
    for (auto& [_, p] : params_) std::fill(p.grad.v.begin(), p.grad.v.end(), 0.0);
}

void ParamStore::set_trainable_all(bool trainable) {
    for (auto& [_, p] : params_) p.trainable = trainable;
}

void ParamStore::set_trainable(const std::string& name, bool trainable) {
    at(name).trainable = trainable;
}

std::vector<std::string> ParamStore::trainable_names() const {
    std::vector<std::string> out;
    for (const auto& [k, p] : params_)
        if (p.trainable) out.push_back(k);
    return out;
}

void adam_step(ParamStore& store, const AdamConfig& cfg) {
    store.adam_step_count += 1;
    const double t = static_cast<double>(store.adam_step_count);
    const double bc1 = 1.0 - std::pow(cfg.beta1, t);
    const double bc2 = 1.0 - std::pow(cfg.beta2, t);
    for (const auto& name : store.names()) {
        Param& p = store.at(name);
        if (!p.trainable) continue;
        for (std::size_t i = 0; i < p.value.v.size(); ++i) {
            const double g = p.grad.v[i];
            p.adam_m.v[i] = cfg.beta1 * p.adam_m.v[i] + (1.0 - cfg.beta1) * g;
            p.adam_v.v[i] = cfg.beta2 * p.adam_v.v[i] + (1.0 - cfg.beta2) * g * g;
            const double mhat = p.adam_m.v[i] / bc1;
            const double vhat = p.adam_v.v[i] / bc2;
            p.value.v[i] -= cfg.lr * mhat / (std::sqrt(vhat) + cfg.eps);
        }
    }
    store.zero_grads();
}

}  // namespace sldm
