#include "eldnn/tensor.hpp"

#include <cmath>
#include <string>

#include "eldnn/errors.hpp"

namespace eldnn {

Vector matvec(const Matrix& m, const Vector& v) {
    if (m.cols != v.size())
        throw DimensionError("matvec: " + std::to_string(m.rows) + "x" +
                             std::to_string(m.cols) + " times length " +
                             std::to_string(v.size()));
    Vector out(m.rows, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        double acc = 0.0;
        for (std::size_t c = 0; c < m.cols; ++c) acc += row[c] * v[c];
        out[r] = acc;
    }
    return out;
}

Vector matvec_transposed(const Matrix& m, const Vector& v) {
    if (m.rows != v.size())
        throw DimensionError("matvec_transposed: " + std::to_string(m.rows) + "x" +
                             std::to_string(m.cols) + "^T times length " +
                             std::to_string(v.size()));
    Vector out(m.cols, 0.0);
    for (std::size_t r = 0; r < m.rows; ++r) {
        const double* row = m.data.data() + r * m.cols;
        const double s = v[r];
        for (std::size_t c = 0; c < m.cols; ++c) out[c] += row[c] * s;
    }
    return out;
}

double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("dot: length mismatch");
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

double squared_norm(const Vector& v) {
    double acc = 0.0;
    for (double x : v) acc += x * x;
    return acc;
}

double norm2(const Vector& v) { return std::sqrt(squared_norm(v)); }

Vector add(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("add: length mismatch");
    Vector out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Vector sub(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("sub: length mismatch");
    Vector out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] -= b[i];
    return out;
}

Vector scaled(const Vector& v, double s) {
    Vector out(v);
    for (double& x : out) x *= s;
    return out;
}

Vector hadamard(const Vector& a, const Vector& b) {
    if (a.size() != b.size()) throw DimensionError("hadamard: length mismatch");
    Vector out(a);
    for (std::size_t i = 0; i < b.size(); ++i) out[i] *= b[i];
    return out;
}

void axpy(double s, const Vector& x, Vector& y) {
    if (x.size() != y.size()) throw DimensionError("axpy: length mismatch");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += s * x[i];
}

void add_outer(Matrix& m, double s, const Vector& u, const Vector& v) {
    if (m.rows != u.size() || m.cols != v.size())
        throw DimensionError("add_outer: shape mismatch");
    for (std::size_t r = 0; r < m.rows; ++r) {
        double* row = m.data.data() + r * m.cols;
        const double su = s * u[r];
        for (std::size_t c = 0; c < m.cols; ++c) row[c] += su * v[c];
    }
}

double frobenius_norm(const Matrix& m) {
    double acc = 0.0;
    for (double x : m.data) acc += x * x;
    return std::sqrt(acc);
}

bool all_finite(const Vector& v) {
    for (double x : v)
        if (!std::isfinite(x)) return false;
    return true;
}

bool all_finite(const Matrix& m) {
    for (double x : m.data)
        if (!std::isfinite(x)) return false;
    return true;
}

double spectral_norm(const Matrix& m, double tol, std::size_t max_iter) {
    if (m.rows == 0 || m.cols == 0) throw DimensionError("spectral_norm: empty matrix");
    if (tol <= 0) throw DomainError("spectral_norm: tol must be positive");

    // Power iteration on m^T m; v starts as the normalized all-ones vector.
    // Should the start lie exactly in the null space, fall back to basis
    // vectors (still deterministic) before concluding the matrix is zero.
    Vector v(m.cols, 1.0 / std::sqrt(static_cast<double>(m.cols)));
    std::size_t fallback = 0;
    double sigma = 0.0;
    for (std::size_t it = 0; it < max_iter; ++it) {
        Vector u = matvec(m, v);
        double un = norm2(u);
        while (un == 0.0 && fallback < m.cols) {
            v.assign(m.cols, 0.0);
            v[fallback++] = 1.0;
            u = matvec(m, v);
            un = norm2(u);
        }
        if (un == 0.0) return 0.0; // every basis vector maps to zero
        const Vector w = matvec_transposed(m, u);
        const double wn = norm2(w); // wn > 0: v.w == |u|^2 > 0
        const double next = wn / un;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / wn;
        if (it > 0 && std::abs(next - sigma) <= tol * std::max(1.0, std::abs(next)))
            return next;
        sigma = next;
    }
    throw ConvergenceError("spectral_norm: no convergence after " +
                               std::to_string(max_iter) + " iterations",
                           sigma);
}

Vector bernoulli_vector(RngStream& rng, std::size_t len, double p) {
    if (p < 0.0 || p > 1.0)
        throw DomainError("bernoulli_vector: p = " + std::to_string(p) +
                          " outside [0,1]");
    Vector out(len);
    for (std::size_t i = 0; i < len; ++i) out[i] = rng.next_double() < p ? 1.0 : 0.0;
    return out;
}

} // namespace eldnn
