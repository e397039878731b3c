#include "sldm/tensor.hpp"

#include <cmath>
#include <cstring>

#include "sldm/errors.hpp"

namespace sldm {

Tensor Tensor::full(std::int64_t r, std::int64_t c, double x) {
    Tensor t(r, c);
    std::fill(t.v.begin(), t.v.end(), x);
    return t;
}

Tensor Tensor::scalar(double x) {
    Tensor t(1, 1);
    t.v[0] = x;
    return t;
}

Tensor Tensor::row(const std::vector<double>& xs) {
    Tensor t(1, static_cast<std::int64_t>(xs.size()));
    t.v = xs;
    return t;
}

Tensor Tensor::randn(std::int64_t r, std::int64_t c, Rng& rng, double stddev) {
    Tensor t(r, c);
    for (auto& x : t.v) x = rng.normal() * stddev;
    return t;
}

std::string Tensor::shape_str() const {
    return "(" + std::to_string(n_rows) + "," + std::to_string(n_cols) + ")";
}

bool Tensor::all_finite() const {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

void Tensor::check_finite(const char* where) const {
    if (!all_finite()) throw NonFiniteValue(std::string("non-finite value in ") + where);
}

void matmul_into(const Tensor& a, const Tensor& b, Tensor& c) {
    const std::int64_t m = a.n_rows, k = a.n_cols, n = b.n_cols;
    c = Tensor(m, n);
    const double* pa = a.v.data();
    const double* pb = b.v.data();
    double* pc = c.v.data();
    for (std::int64_t i = 0; i < m; ++i) {
        for (std::int64_t p = 0; p < k; ++p) {
            const double aval = pa[i * k + p];
            if (aval == 0.0) continue;
            const double* brow = pb + p * n;
            double* crow = pc + i * n;
            for (std::int64_t j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
}

void matmul_nt_into(const Tensor& a, const Tensor& b, Tensor& c) {
    // a: (m,k), b: (n,k) -> c: (m,n)
    const std::int64_t m = a.n_rows, k = a.n_cols, n = b.n_rows;
    c = Tensor(m, n);
    for (std::int64_t i = 0; i < m; ++i) {
        const double* arow = a.v.data() + i * k;
        double* crow = c.v.data() + i * n;
        for (std::int64_t j = 0; j < n; ++j) {
            const double* brow = b.v.data() + j * k;
            double s = 0.0;
            for (std::int64_t p = 0; p < k; ++p) s += arow[p] * brow[p];
            crow[j] = s;
        }
    }
}

void matmul_tn_into(const Tensor& a, const Tensor& b, Tensor& c) {
    // a: (k,m), b: (k,n) -> c: (m,n)
    const std::int64_t k = a.n_rows, m = a.n_cols, n = b.n_cols;
    c = Tensor(m, n);
    for (std::int64_t p = 0; p < k; ++p) {
        const double* arow = a.v.data() + p * m;
        const double* brow = b.v.data() + p * n;
        for (std::int64_t i = 0; i < m; ++i) {
            const double aval = arow[i];
            if (aval == 0.0) continue;
            double* crow = c.v.data() + i * n;
            for (std::int64_t j = 0; j < n; ++j) crow[j] += aval * brow[j];
        }
    }
}

}  // namespace sldm
