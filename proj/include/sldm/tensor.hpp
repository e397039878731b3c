#ifndef SLDM_TENSOR_HPP
#define SLDM_TENSOR_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "sldm/rng.hpp"

namespace sldm {

// Dense row-major 2D tensor (scalars are 1x1, vectors 1xN). 64-bit values; the
// training loops run the same code, trading speed for sharp gradient checks.
struct Tensor {
    std::int64_t n_rows = 0;
    std::int64_t n_cols = 0;
    std::vector<double> v;

    Tensor() = default;
    Tensor(std::int64_t r, std::int64_t c) : n_rows(r), n_cols(c), v(static_cast<std::size_t>(r * c), 0.0) {}

    static Tensor zeros(std::int64_t r, std::int64_t c) { return Tensor(r, c); }
    static Tensor full(std::int64_t r, std::int64_t c, double x);
    static Tensor scalar(double x);
    static Tensor row(const std::vector<double>& xs);
    static Tensor randn(std::int64_t r, std::int64_t c, Rng& rng, double stddev = 1.0);

    std::int64_t size() const { return n_rows * n_cols; }
    double& at(std::int64_t r, std::int64_t c) { return v[static_cast<std::size_t>(r * n_cols + c)]; }
    double at(std::int64_t r, std::int64_t c) const { return v[static_cast<std::size_t>(r * n_cols + c)]; }
    bool same_shape(const Tensor& o) const { return n_rows == o.n_rows && n_cols == o.n_cols; }
    std::string shape_str() const;

    bool all_finite() const;
    void check_finite(const char* where) const;
};

// C = A * B, sizes checked by caller
void matmul_into(const Tensor& a, const Tensor& b, Tensor& c);
// C = A * B^T
void matmul_nt_into(const Tensor& a, const Tensor& b, Tensor& c);
// C = A^T * B
void matmul_tn_into(const Tensor& a, const Tensor& b, Tensor& c);

}  // namespace sldm

#endif
