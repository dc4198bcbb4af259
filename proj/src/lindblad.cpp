#include "polariton/lindblad.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>

#include <Eigen/SVD>
#include <boost/numeric/odeint.hpp>

#include "polariton/errors.hpp"
#include "umfpack_lu.hpp"

namespace polariton {

// -- DensityMatrix ----------------------------------------------------------

DensityMatrix::DensityMatrix(Matrix matrix, std::vector<int> dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    long expected = 1;
    for (int d : dims_) expected *= d;
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != expected) {
        throw DimensionMismatch("density matrix shape does not match its subsystem dims");
    }
}

DensityMatrix DensityMatrix::pure(const Vector& ket, std::vector<int> dims) {
    const Vector psi = ket / ket.norm();
    return {psi * psi.adjoint(), std::move(dims)};
}

cplx DensityMatrix::expectation(const QOperator& op) const {
    if (op.dims() != dims_) {
        throw DimensionMismatch("observable and state live on different spaces");
    }
    // Tr(A rho) = sum_ij A_ij rho_ji
    return (op.matrix().transpose().cwiseProduct(matrix_)).sum();
}

double DensityMatrix::hermiticity_error() const {
    const double scale = matrix_.norm();
    if (scale == 0.0) return 0.0;
    return (matrix_ - matrix_.adjoint()).norm() / scale;
}

double DensityMatrix::min_eigenvalue() const {
    const Matrix herm = 0.5 * (matrix_ + matrix_.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(herm, Eigen::EigenvaluesOnly);
    return solver.eigenvalues().minCoeff();
}

void DensityMatrix::validate(double hermitian_tol, double trace_tol, double psd_tol) const {
    if (hermiticity_error() > hermitian_tol) {
        throw PreconditionError("density matrix is not Hermitian");
    }
    if (std::abs(matrix_.trace() - cplx(1.0, 0.0)) > trace_tol) {
        throw PreconditionError("density matrix does not have unit trace");
    }
    if (min_eigenvalue() < -psd_tol) {
        throw PreconditionError("density matrix has a negative eigenvalue");
    }
}

// -- Liouvillian ------------------------------------------------------------

namespace {

using Triplet = Eigen::Triplet<cplx>;

// Appends scale * kron(lhs, rhs) to triplets, skipping structural zeros.
void add_kron(std::vector<Triplet>& out, const Matrix& lhs, const Matrix& rhs, cplx scale) {
    const Eigen::Index n = rhs.rows();
    for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
        for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
            const cplx l = lhs(i, j);
            if (l == cplx(0.0)) continue;
            for (Eigen::Index q = 0; q < rhs.cols(); ++q) {
                for (Eigen::Index p = 0; p < rhs.rows(); ++p) {
                    const cplx r = rhs(p, q);
                    if (r == cplx(0.0)) continue;
                    out.emplace_back(i * n + p, j * n + q, scale * l * r);
                }
            }
        }
    }
}

} // namespace

Liouvillian::Liouvillian(QOperator hamiltonian, std::vector<CollapseChannel> channels)
    : hamiltonian_(std::move(hamiltonian)), channels_(std::move(channels)) {
    const Eigen::Index n = hamiltonian_.size();
    const Matrix& H = hamiltonian_.matrix();
    const Matrix I = Matrix::Identity(n, n);
    const cplx i_unit(0.0, 1.0);

    std::vector<Triplet> triplets;
    add_kron(triplets, I, H, -i_unit);
    add_kron(triplets, H.transpose(), I, i_unit);
    for (const auto& ch : channels_) {
        if (ch.rate < 0.0) {
            throw ParameterError("collapse rates must be non-negative");
        }
        if (ch.op.dims() != hamiltonian_.dims()) {
            throw DimensionMismatch("collapse operator and Hamiltonian live on different spaces");
        }
        if (ch.rate == 0.0) continue;
        const Matrix& C = ch.op.matrix();
        const Matrix CdC = C.adjoint() * C;
        add_kron(triplets, C.conjugate(), C, ch.rate);
        add_kron(triplets, I, CdC, -0.5 * ch.rate);
        add_kron(triplets, CdC.transpose(), I, -0.5 * ch.rate);
    }
    super_.resize(n * n, n * n);
    super_.setFromTriplets(triplets.begin(), triplets.end());
    super_.prune(cplx(0.0), 0.0);
    super_.makeCompressed();
    norm_ = super_.norm();
}

Matrix Liouvillian::apply(const Matrix& x) const {
    const Eigen::Index n = hilbert_dim();
    if (x.rows() != n || x.cols() != n) {
        throw DimensionMismatch("operator shape does not match the Liouvillian");
    }
    const Vector out = super_ * Eigen::Map<const Vector>(x.data(), n * n);
    return Eigen::Map<const Matrix>(out.data(), n, n);
}

Liouvillian build_liouvillian(const QOperator& hamiltonian, const SystemParams& p) {
    p.validate();
    const Matrix& H = hamiltonian.matrix();
    const double scale = std::max(1.0, H.norm());
    if ((H - H.adjoint()).norm() > 1e-12 * scale) {
        throw ParameterError("Liouvillian requires a Hermitian Hamiltonian");
    }
    const TruncationConfig cfg = truncation_of(hamiltonian);
    std::vector<CollapseChannel> channels{
        {embed(annihilation(cfg.photon_dim()), Slot::photon, cfg), p.kappa_a},
        {embed(annihilation(cfg.phonon_dim()), Slot::phonon, cfg), p.kappa_b},
        {embed(qubit_lowering(), Slot::qubit, cfg), p.gamma},
    };
    std::erase_if(channels, [](const CollapseChannel& c) { return c.rate == 0.0; });
    return {hamiltonian, std::move(channels)};
}

// -- steady state -----------------------------------------------------------

namespace {

// Number of singular values of L below tol * sigma_max, from a full SVD.
int dense_zero_modes(const SparseMatrix& L, double tol) {
    const Matrix dense(L);
    Eigen::BDCSVD<Matrix> svd(dense);
    const auto& s = svd.singularValues();
    const double cutoff = tol * s(0);
    return static_cast<int>((s.array() < cutoff).count());
}

double estimate_sigma_max(const SparseMatrix& A) {
    Vector v = Vector::Ones(A.cols()).normalized();
    double sigma = 0.0;
    for (int it = 0; it < 40; ++it) {
        const Vector w = A.adjoint() * (A * v);
        const double nrm = w.norm();
        if (nrm == 0.0) return 0.0;
        const double next = std::sqrt(nrm);
        v = w / nrm;
        if (std::abs(next - sigma) <= 1e-6 * next) return next;
        sigma = next;
    }
    return sigma;
}

// Upper estimate of the smallest singular value of a factorized matrix by a
// few steps of inverse iteration on (M+ M)^-1. A genuinely singular matrix
// blows up within the first step, so a handful of iterations suffices.
double estimate_sigma_min(const detail::UmfpackLU& lu, Eigen::Index n) {
    if (lu.singular()) return 0.0;
    Vector v = Vector::Ones(n);
    for (Eigen::Index k = 0; k < n; ++k) {
        v(k) += 0.1 * std::sin(1.0 + static_cast<double>(k));
    }
    v.normalize();
    double sigma = 0.0;
    for (int it = 0; it < 4; ++it) {
        const Vector w = lu.solve_adjoint(lu.solve(v));
        const double nrm = w.norm();
        if (!std::isfinite(nrm)) return 0.0;
        const double next = 1.0 / std::sqrt(nrm);
        v = w / nrm;
        if (std::abs(next - sigma) <= 1e-2 * next) return next;
        sigma = next;
    }
    return sigma;
}

Matrix hermitize_normalize(const Vector& x, Eigen::Index n) {
    Matrix rho = Eigen::Map<const Matrix>(x.data(), n, n);
    rho = 0.5 * (rho + rho.adjoint()).eval();
    const cplx tr = rho.trace();
    if (std::abs(tr) == 0.0 || !std::isfinite(std::abs(tr))) {
        throw ConvergenceError("steady-state candidate has vanishing or non-finite trace");
    }
    rho /= tr.real();
    return rho;
}

// Fallback: inverse iteration on L with a tiny shift, converging to the
// eigenvector of smallest |lambda|.
Vector inverse_iteration_zero_mode(const SparseMatrix& L, double shift) {
    const Eigen::Index N = L.rows();
    SparseMatrix shifted = L;
    for (Eigen::Index k = 0; k < N; ++k) shifted.coeffRef(k, k) -= shift;
    const detail::UmfpackLU lu(shifted);
    if (lu.singular()) {
        throw ConvergenceError("shifted Liouvillian factorization failed");
    }
    Vector v = Vector::Ones(N).normalized();
    for (int it = 0; it < 30; ++it) {
        Vector w = lu.solve(v);
        const double nrm = w.norm();
        if (!std::isfinite(nrm) || nrm == 0.0) break;
        v = w / nrm;
    }
    return v;
}

} // namespace

DensityMatrix steady_state(const Liouvillian& L, const SteadyStateOptions& options) {
    const SparseMatrix& S = L.superoperator();
    const Eigen::Index n = L.hilbert_dim();
    const Eigen::Index N = n * n;
    const double l_norm = L.norm();
    if (l_norm == 0.0) {
        throw NonUniqueSteadyState("Liouvillian is identically zero; every state is stationary");
    }

    if (N <= options.dense_svd_limit) {
        const int zeros = dense_zero_modes(S, options.uniqueness_tol);
        if (zeros >= 2) {
            throw NonUniqueSteadyState("Liouvillian has " + std::to_string(zeros) + " zero modes");
        }
        if (zeros == 0) {
            throw ConvergenceError("Liouvillian has no singular value below tolerance");
        }
    }

    // Replace the rho_00 equation by the trace constraint. The rows of the
    // diagonal entries sum to zero (trace preservation), so the remaining rows
    // still span the row space.
    double max_entry = 0.0;
    for (Eigen::Index k = 0; k < S.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(S, k); it; ++it) {
            max_entry = std::max(max_entry, std::abs(it.value()));
        }
    }
    std::vector<Triplet> triplets;
    triplets.reserve(static_cast<std::size_t>(S.nonZeros() + n));
    for (Eigen::Index k = 0; k < S.outerSize(); ++k) {
        for (SparseMatrix::InnerIterator it(S, k); it; ++it) {
            if (it.row() != 0) triplets.emplace_back(it.row(), it.col(), it.value());
        }
    }
    for (Eigen::Index i = 0; i < n; ++i) {
        triplets.emplace_back(0, i * n + i, max_entry);
    }
    SparseMatrix bordered(N, N);
    bordered.setFromTriplets(triplets.begin(), triplets.end());
    bordered.makeCompressed();

    const detail::UmfpackLU lu(bordered);
    if (lu.singular()) {
        throw NonUniqueSteadyState("bordered Liouvillian is singular");
    }
    if (N > options.dense_svd_limit) {
        const double smin = estimate_sigma_min(lu, N);
        const double smax = estimate_sigma_max(bordered);
        if (smin < options.uniqueness_tol * smax) {
            throw NonUniqueSteadyState("bordered Liouvillian is numerically singular (sigma_min/sigma_max = " +
                                       std::to_string(smin / smax) + ")");
        }
    }

    Vector rhs = Vector::Zero(N);
    rhs(0) = max_entry;
    Vector x = lu.solve(rhs);
    for (int refine = 0; refine < 2; ++refine) {
        const Vector r = rhs - bordered * x;
        x += lu.solve(r);
    }

    Matrix rho = hermitize_normalize(x, n);
    auto residual = [&](const Matrix& m) {
        return (S * Eigen::Map<const Vector>(m.data(), N)).norm();
    };
    if (residual(rho) > options.residual_tol * l_norm) {
        const Vector v = inverse_iteration_zero_mode(S, 1e-12 * l_norm);
        rho = hermitize_normalize(v, n);
        if (residual(rho) > options.residual_tol * l_norm) {
            throw ConvergenceError("steady-state residual " + std::to_string(residual(rho)) +
                                   " exceeds tolerance");
        }
    }
    return {std::move(rho), L.dims()};
}

// -- time evolution ---------------------------------------------------------

void propagate(const Matrix& x0, const Liouvillian& L, std::span<const double> t_grid,
               const EvolutionObserver& observer, const EvolveOptions& options) {
    namespace odeint = boost::numeric::odeint;
    const Eigen::Index n = L.hilbert_dim();
    const Eigen::Index N = n * n;
    if (x0.rows() != n || x0.cols() != n) {
        throw DimensionMismatch("initial operator shape does not match the Liouvillian");
    }
    if (t_grid.empty()) return;
    if (t_grid.front() < 0.0) {
        throw PreconditionError("time grid must start at t >= 0");
    }
    if (!std::is_sorted(t_grid.begin(), t_grid.end())) {
        throw PreconditionError("time grid must be non-decreasing");
    }

    // Real state vector (re, im interleaved) viewed as complex vec(x).
    using State = std::vector<double>;
    State state(static_cast<std::size_t>(2 * N));
    Eigen::Map<Vector>(reinterpret_cast<cplx*>(state.data()), N) = Eigen::Map<const Vector>(x0.data(), N);

    const SparseMatrix& S = L.superoperator();
    auto rhs = [&S, N](const State& x, State& dxdt, double /*t*/) {
        Eigen::Map<Vector>(reinterpret_cast<cplx*>(dxdt.data()), N).noalias() =
            S * Eigen::Map<const Vector>(reinterpret_cast<const cplx*>(x.data()), N);
    };

    // Integration always starts at t = 0; a leading grid point > 0 is reached
    // by the integrator like any other.
    std::vector<double> times;
    times.reserve(t_grid.size() + 1);
    const bool prepend_zero = t_grid.front() > 0.0;
    if (prepend_zero) times.push_back(0.0);
    times.insert(times.end(), t_grid.begin(), t_grid.end());
    const std::size_t offset = prepend_zero ? 1 : 0;

    Matrix snapshot(n, n);
    std::size_t call = 0;
    auto observe = [&](const State& x, double /*t*/) {
        const std::size_t idx = call++;
        if (idx < offset) return;
        const auto xv = Eigen::Map<const Vector>(reinterpret_cast<const cplx*>(x.data()), N);
        if (!xv.allFinite()) {
            throw IntegrationError("non-finite state during time evolution");
        }
        snapshot = Eigen::Map<const Matrix>(xv.data(), n, n);
        observer(idx - offset, snapshot);
    };

    if (times.size() == 1) {
        observe(state, times.front());
        return;
    }

    try {
        auto stepper = odeint::make_dense_output(options.abs_tol, options.rel_tol,
                                                 odeint::runge_kutta_dopri5<State>());
        const double span = times.back() - times.front();
        const double dt0 = std::min(options.initial_step, span > 0.0 ? span : options.initial_step);
        odeint::integrate_times(stepper, rhs, state, times.begin(), times.end(), dt0, observe,
                                odeint::max_step_checker(static_cast<int>(options.max_steps)));
    } catch (const Error&) {
        throw;
    } catch (const std::exception& e) {
        throw IntegrationError(std::string("time integration failed: ") + e.what());
    }
}

std::vector<DensityMatrix> evolve(const DensityMatrix& rho0, const Liouvillian& L,
                                  std::span<const double> t_grid, const EvolveOptions& options) {
    if (rho0.dims() != L.dims()) {
        throw DimensionMismatch("initial state and Liouvillian live on different spaces");
    }
    std::vector<DensityMatrix> out;
    out.reserve(t_grid.size());
    propagate(rho0.matrix(), L, t_grid,
              [&](std::size_t, const Matrix& x) { out.emplace_back(x, L.dims()); }, options);
    return out;
}

} // namespace polariton
