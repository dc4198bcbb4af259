#pragma once

// Seeded generators and small independent helpers shared by the unit tests.

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "polariton/lindblad.hpp"
#include "polariton/model.hpp"

namespace testing {

using polariton::cplx;
using polariton::Matrix;
using polariton::Vector;

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    cplx gaussian() {
        std::normal_distribution<double> n;
        return {n(engine_), n(engine_)};
    }

    Vector ket(Eigen::Index dim) {
        Vector v(dim);
        for (Eigen::Index i = 0; i < dim; ++i) v(i) = gaussian();
        return v.normalized();
    }

    /// Full-rank random state: G G+ / Tr, G with Gaussian entries.
    polariton::DensityMatrix density(const polariton::TruncationConfig& cfg) {
        const Eigen::Index d = cfg.dim();
        Matrix G(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) G(i, j) = gaussian();
        }
        Matrix rho = G * G.adjoint();
        rho /= rho.trace();
        return {rho, cfg.dims()};
    }

    Matrix matrix(Eigen::Index d) {
        Matrix M(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) M(i, j) = gaussian();
        }
        return M;
    }

    /// Parameters with every rate positive and the drive on the chosen mode.
    polariton::SystemParams params(bool qd_drive) {
        polariton::SystemParams p;
        p.delta_a = uniform(-8, 8);
        p.delta_b = uniform(-8, 8);
        p.delta_q = uniform(-8, 8);
        p.g = uniform(0, 6);
        p.f = uniform(0, 6);
        (qd_drive ? p.eta_b : p.eta_a) = uniform(0.05, 1.0);
        p.kappa_a = uniform(0.5, 8);
        p.kappa_b = uniform(0.5, 8);
        p.gamma = uniform(0.5, 2);
        return p;
    }

    /// Resonant, equal-kappa, QD-driven parameters (the weak-drive domain).
    polariton::SystemParams oracle_params() {
        polariton::SystemParams p;
        const double D = uniform(-10, 10);
        p.delta_a = p.delta_b = p.delta_q = D;
        p.g = uniform(0.1, 8);
        p.f = uniform(0.1, 8);
        p.eta_b = uniform(0.01, 1.0);
        p.kappa_a = p.kappa_b = uniform(0.5, 10);
        p.gamma = uniform(0.5, 2);
        return p;
    }

    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

inline double rel_diff(cplx x, cplx ref) {
    const double s = std::abs(ref);
    return s > 0 ? std::abs(x - ref) / s : std::abs(x);
}

/// Kronecker product written out with loops, independent of Eigen's module.
inline Matrix kron(const Matrix& A, const Matrix& B) {
    Matrix K(A.rows() * B.rows(), A.cols() * B.cols());
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            for (Eigen::Index k = 0; k < B.rows(); ++k) {
                for (Eigen::Index l = 0; l < B.cols(); ++l) K(i * B.rows() + k, j * B.cols() + l) = A(i, j) * B(k, l);
            }
        }
    }
    return K;
}

} // namespace testing
