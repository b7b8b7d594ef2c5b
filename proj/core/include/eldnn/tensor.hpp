#ifndef ELDNN_TENSOR_HPP
#define ELDNN_TENSOR_HPP

#include <cstddef>
#include <vector>

#include "eldnn/rng.hpp"

namespace eldnn {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. Everything in this project is 64-bit:
/// the gap quantities under test are O(1e-2)..O(1e-3) and the gradient
/// checks need the headroom.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data; // length rows*cols, row-major

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), data(r * c, fill) {}

    double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// y = m v.
Vector matvec(const Matrix& m, const Vector& v);
/// y = m^T v.
Vector matvec_transposed(const Matrix& m, const Vector& v);

double dot(const Vector& a, const Vector& b);
double norm2(const Vector& v);
double squared_norm(const Vector& v);
/// a + b, a - b elementwise.
Vector add(const Vector& a, const Vector& b);
Vector sub(const Vector& a, const Vector& b);
/// v scaled by s.
Vector scaled(const Vector& v, double s);
/// Elementwise product a .* b.
Vector hadamard(const Vector& a, const Vector& b);
/// y += s * x.
void axpy(double s, const Vector& x, Vector& y);
/// m += s * (u v^T).
void add_outer(Matrix& m, double s, const Vector& u, const Vector& v);

double frobenius_norm(const Matrix& m);
bool all_finite(const Vector& v);
bool all_finite(const Matrix& m);

/// Largest singular value by power iteration on m^T m, starting from the
/// normalized all-ones vector (deterministic). Throws ConvergenceError with
/// the last iterate if max_iter steps do not reach relative tolerance tol.
double spectral_norm(const Matrix& m, double tol = 1e-9, std::size_t max_iter = 1000);

/// Vector of independent Bernoulli(p) draws in {0.0, 1.0}. Always consumes
/// exactly `len` draws from the stream, whatever p is.
Vector bernoulli_vector(RngStream& rng, std::size_t len, double p);

} // namespace eldnn

#endif
