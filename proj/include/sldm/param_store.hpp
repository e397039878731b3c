#ifndef SLDM_PARAM_STORE_HPP
#define SLDM_PARAM_STORE_HPP

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "sldm/tensor.hpp"

namespace sldm {

struct Param {
    Tensor value;
    Tensor grad;
    Tensor adam_m;
    Tensor adam_v;
    bool trainable = true;
};

// Named parameter table shared by the codec and diffusion models. Frozen
// parameters keep their bytes through adam_step regardless of gradients.
class ParamStore {
public:
    void add(const std::string& name, Tensor value, bool trainable = true);
    bool has(const std::string& name) const { return params_.count(name) != 0; }
    Param& at(const std::string& name);
    const Param& at(const std::string& name) const;

    std::vector<std::string> names() const;  // sorted, deterministic
    std::size_t size() const { return params_.size(); }

    void zero_grads();
    void set_trainable_all(bool trainable);
    void set_trainable(const std::string& name, bool trainable);
    std::vector<std::string> trainable_names() const;

    std::int64_t adam_step_count = 0;

private:
    std::map<std::string, Param> params_;
};

struct AdamConfig {
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

// Standard Adam with bias correction on trainable params only; grads are
// cleared afterwards.
void adam_step(ParamStore& store, const AdamConfig& cfg);

}  // namespace sldm

#endif
