#pragma once

// Thin RAII wrapper over the UMFPACK complex LU (int indices). Eigen's own
// wrapper only exposes A x = b; the uniqueness check also needs A+ x = b.

#include "polariton/lindblad.hpp"

namespace polariton::detail {

class UmfpackLU {
public:
    /// Factorizes a compressed column-major matrix. Throws ConvergenceError if
    /// UMFPACK fails; a numerically singular matrix is reported by singular().
    explicit UmfpackLU(const SparseMatrix& A);
    ~UmfpackLU();
    UmfpackLU(const UmfpackLU&) = delete;
    UmfpackLU& operator=(const UmfpackLU&) = delete;

    Vector solve(const Vector& b) const;
    Vector solve_adjoint(const Vector& b) const;

    bool singular() const { return singular_; }

    /// min |U_ii| / max |U_ii|, a cheap and crude conditioning indicator.
    double pivot_ratio() const { return rcond_; }

private:
    Vector solve_impl(int system, const Vector& b) const;

    SparseMatrix A_;
    void* numeric_ = nullptr;
    bool singular_ = false;
    double rcond_ = 0.0;
};

} // namespace polariton::detail
