#pragma once

// Lindblad master equation
//
//     d rho/dt = -i[H, rho] + sum_k rate_k D[O_k] rho,
//     D[O] rho = O rho O+ - (rho O+O + O+O rho)/2,
//
// in the column-stacking vectorization vec(A X B) = (B^T (x) A) vec(X).

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Sparse>

#include "polariton/hilbert.hpp"
#include "polariton/model.hpp"

namespace polariton {

using SparseMatrix = Eigen::SparseMatrix<cplx>;

class DensityMatrix {
public:
    DensityMatrix() = default;
    DensityMatrix(Matrix matrix, std::vector<int> dims);

    static DensityMatrix pure(const Vector& ket, std::vector<int> dims);

    const Matrix& matrix() const { return matrix_; }
    const std::vector<int>& dims() const { return dims_; }
    Eigen::Index size() const { return matrix_.rows(); }

    /// Tr(op rho).
    cplx expectation(const QOperator& op) const;
    double trace() const { return matrix_.trace().real(); }

    /// ||rho - rho+||_F / ||rho||_F.
    double hermiticity_error() const;
    double min_eigenvalue() const;

    /// Throws PreconditionError when rho is not Hermitian, unit-trace and PSD
    /// within the given tolerances.
    void validate(double hermitian_tol = 1e-12, double trace_tol = 1e-12, double psd_tol = 1e-10) const;

private:
    Matrix matrix_;
    std::vector<int> dims_;
};

struct CollapseChannel {
    QOperator op;
    double rate = 0.0;
};

class Liouvillian {
public:
    Liouvillian(QOperator hamiltonian, std::vector<CollapseChannel> channels);

    const SparseMatrix& superoperator() const { return super_; }
    const QOperator& hamiltonian() const { return hamiltonian_; }
    const std::vector<CollapseChannel>& channels() const { return channels_; }
    const std::vector<int>& dims() const { return hamiltonian_.dims(); }
    Eigen::Index hilbert_dim() const { return hamiltonian_.size(); }

    /// L[x] for an arbitrary (not necessarily Hermitian) operator x.
    Matrix apply(const Matrix& x) const;

    /// Frobenius norm of the superoperator matrix.
    double norm() const { return norm_; }

private:
    QOperator hamiltonian_;
    std::vector<CollapseChannel> channels_;
    SparseMatrix super_;
    double norm_ = 0.0;
};

/// Channels sqrt(kappa_a) a, sqrt(kappa_b) b, sqrt(gamma) sigma_-; channels
/// with zero rate are dropped. Throws ParameterError for negative rates or a
/// non-Hermitian H.
Liouvillian build_liouvillian(const QOperator& hamiltonian, const SystemParams& p);

struct SteadyStateOptions {
    double residual_tol = 1e-10;   // relative to ||L||_F
    double uniqueness_tol = 1e-8;  // singular values below tol * sigma_max count as zero modes
    Eigen::Index dense_svd_limit = 400; // superoperator size up to which a full SVD is used
};

/// Unique zero mode of L, trace-normalized and Hermitized.
/// Throws NonUniqueSteadyState or ConvergenceError.
DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& options = {});

struct EvolveOptions {
    double rel_tol = 1e-9;
    double abs_tol = 1e-12;
    double initial_step = 1e-4;
    std::size_t max_steps = 5'000'000; // between two consecutive grid points
};

using EvolutionObserver = std::function<void(std::size_t grid_index, const Matrix& state)>;

/// Integrates dx/dt = L[x] from x(0) = x0 and reports x(t) at every grid time.
/// The grid must be non-decreasing with t_grid[0] >= 0. Throws IntegrationError.
void propagate(const Matrix& x0, const Liouvillian& L, std::span<const double> t_grid,
               const EvolutionObserver& observer, const EvolveOptions& options = {});

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& L,
                                  std::span<const double> t_grid, const EvolveOptions& options = {});

} // namespace polariton
