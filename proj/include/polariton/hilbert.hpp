#pragma once

// Truncated Fock spaces for the photon (a) and phonon (b) modes and the
// two-level qubit, plus the tensor-product embeddings used everywhere else.
//
// Basis convention: subsystems are ordered [photon, phonon, qubit] and the
// composite index of |n_a, n_b, q> is
//
//     index = (n_a * (n_b_max + 1) + n_b) * 2 + q,    q = 0 (g), 1 (e).
//
// This is the ordering produced by kron(photon, kron(phonon, qubit)).

#include <array>
#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace polariton {

using cplx = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Slot { photon = 0, phonon = 1, qubit = 2 };
enum class QubitLevel { g = 0, e = 1 };

struct TruncationConfig {
    int n_a_max = 5;
    int n_b_max = 5;
    static constexpr int qubit_dim = 2;

    /// Throws InvalidDimension unless both cutoffs are at least 2.
    void validate() const;

    int photon_dim() const { return n_a_max + 1; }
    int phonon_dim() const { return n_b_max + 1; }
    int slot_dim(Slot slot) const;
    std::vector<int> dims() const { return {photon_dim(), phonon_dim(), qubit_dim}; }
    Eigen::Index dim() const {
        return static_cast<Eigen::Index>(photon_dim()) * phonon_dim() * qubit_dim;
    }

    bool operator==(const TruncationConfig&) const = default;
};

struct FockLabel {
    int n_a = 0;
    int n_b = 0;
    QubitLevel q = QubitLevel::g;

    int excitations() const { return n_a + n_b + static_cast<int>(q); }
    bool operator==(const FockLabel&) const = default;
};

/// Dense complex matrix tagged with the subsystem dimensions it acts on.
/// Single-mode operators carry one entry in dims; composite operators carry
/// [photon, phonon, qubit].
class QOperator {
public:
    QOperator() = default;
    QOperator(Matrix matrix, std::vector<int> dims);

    static QOperator zero(const std::vector<int>& dims);
    static QOperator identity(const std::vector<int>& dims);

    const Matrix& matrix() const { return matrix_; }
    const std::vector<int>& dims() const { return dims_; }
    Eigen::Index size() const { return matrix_.rows(); }

    QOperator adjoint() const { return {matrix_.adjoint(), dims_}; }

    QOperator& operator+=(const QOperator& other);
    QOperator& operator-=(const QOperator& other);
    QOperator& operator*=(cplx scale);

    friend QOperator operator+(QOperator lhs, const QOperator& rhs) { return lhs += rhs; }
    friend QOperator operator-(QOperator lhs, const QOperator& rhs) { return lhs -= rhs; }
    friend QOperator operator*(QOperator op, cplx scale) { return op *= scale; }
    friend QOperator operator*(cplx scale, QOperator op) { return op *= scale; }
    friend QOperator operator*(const QOperator& lhs, const QOperator& rhs);

    /// Vector result of applying this operator to a ket.
    Vector apply(const Vector& ket) const;

private:
    void require_same_dims(const QOperator& other, const char* what) const;

    Matrix matrix_;
    std::vector<int> dims_;
};

QOperator commutator(const QOperator& lhs, const QOperator& rhs);

/// Bosonic lowering operator on the Fock states 0..dim-1.
QOperator annihilation(int dim);

/// sigma_minus = |g><e| in the {|g>, |e>} ordering.
QOperator qubit_lowering();

/// I (x) ... (x) op (x) ... (x) I, with op placed at `slot`.
QOperator embed(const QOperator& op, Slot slot, const TruncationConfig& cfg);

Eigen::Index basis_index(const FockLabel& label, const TruncationConfig& cfg);
FockLabel basis_label(Eigen::Index index, const TruncationConfig& cfg);
Vector basis_state(const FockLabel& label, const TruncationConfig& cfg);

/// All labels of the composite space in canonical index order.
std::vector<FockLabel> enumerate_labels(const TruncationConfig& cfg);

/// Recovers the truncation a composite operator was built for.
TruncationConfig truncation_of(const QOperator& op);

} // namespace polariton
