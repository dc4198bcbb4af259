#include "umfpack_lu.hpp"

#include <string>

#include <umfpack.h>

#include "polariton/errors.hpp"

namespace polariton::detail {

namespace {

const double* real_view(const cplx* p) { return reinterpret_cast<const double*>(p); }
double* real_view(cplx* p) { return reinterpret_cast<double*>(p); }

} // namespace

UmfpackLU::UmfpackLU(const SparseMatrix& A) : A_(A) {
    A_.makeCompressed();
    if (A_.rows() != A_.cols()) {
        throw DimensionMismatch("LU factorization needs a square matrix");
    }
    const int n = static_cast<int>(A_.rows());
    double control[UMFPACK_CONTROL];
    double info[UMFPACK_INFO];
    umfpack_zi_defaults(control);
    // The Liouvillian pattern is structurally symmetric, so AMD on A + A^T
    // with nested dissection keeps the fill several times lower than COLAMD.
    control[UMFPACK_STRATEGY] = UMFPACK_STRATEGY_SYMMETRIC;
    control[UMFPACK_ORDERING] = UMFPACK_ORDERING_CHOLMOD;

    void* symbolic = nullptr;
    int status = umfpack_zi_symbolic(n, n, A_.outerIndexPtr(), A_.innerIndexPtr(), real_view(A_.valuePtr()),
                                     nullptr, &symbolic, control, info);
    if (status != UMFPACK_OK) {
        throw ConvergenceError("UMFPACK symbolic analysis failed (status " + std::to_string(status) + ")");
    }
    status = umfpack_zi_numeric(A_.outerIndexPtr(), A_.innerIndexPtr(), real_view(A_.valuePtr()), nullptr,
                                symbolic, &numeric_, control, info);
    umfpack_zi_free_symbolic(&symbolic);
    if (status == UMFPACK_WARNING_singular_matrix) {
        singular_ = true;
    } else if (status != UMFPACK_OK) {
        umfpack_zi_free_numeric(&numeric_);
        throw ConvergenceError("UMFPACK numeric factorization failed (status " + std::to_string(status) + ")");
    }
    rcond_ = info[UMFPACK_RCOND];
}

UmfpackLU::~UmfpackLU() {
    if (numeric_ != nullptr) umfpack_zi_free_numeric(&numeric_);
}

Vector UmfpackLU::solve_impl(int system, const Vector& b) const {
    if (b.size() != A_.rows()) {
        throw DimensionMismatch("right-hand side length does not match the factorized matrix");
    }
    Vector x(b.size());
    double control[UMFPACK_CONTROL];
    double info[UMFPACK_INFO];
    umfpack_zi_defaults(control);
    control[UMFPACK_IRSTEP] = 0; // refinement is done by the callers
    const int status = umfpack_zi_solve(system, A_.outerIndexPtr(), A_.innerIndexPtr(), real_view(A_.valuePtr()),
                                        nullptr, real_view(x.data()), nullptr, real_view(b.data()), nullptr,
                                        numeric_, control, info);
    if (status != UMFPACK_OK && status != UMFPACK_WARNING_singular_matrix) {
        throw ConvergenceError("UMFPACK solve failed (status " + std::to_string(status) + ")");
    }
    return x;
}

Vector UmfpackLU::solve(const Vector& b) const { return solve_impl(UMFPACK_A, b); }

// UMFPACK_At is the conjugate transpose for complex matrices.
Vector UmfpackLU::solve_adjoint(const Vector& b) const { return solve_impl(UMFPACK_At, b); }

} // namespace polariton::detail
