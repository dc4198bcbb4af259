#include "polariton/hilbert.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "polariton/errors.hpp"

namespace polariton {

void TruncationConfig::validate() const {
    if (n_a_max < 2 || n_b_max < 2) {
        throw InvalidDimension("Fock cutoffs must be >= 2 (got n_a_max=" + std::to_string(n_a_max) +
                               ", n_b_max=" + std::to_string(n_b_max) + ")");
    }
}

int TruncationConfig::slot_dim(Slot slot) const {
    switch (slot) {
    case Slot::photon: return photon_dim();
    case Slot::phonon: return phonon_dim();
    case Slot::qubit: return qubit_dim;
    }
    throw OutOfRange("unknown subsystem slot");
}

QOperator::QOperator(Matrix matrix, std::vector<int> dims)
    : matrix_(std::move(matrix)), dims_(std::move(dims)) {
    const long expected = std::accumulate(dims_.begin(), dims_.end(), 1L, std::multiplies<>());
    if (matrix_.rows() != matrix_.cols() || matrix_.rows() != expected) {
        throw DimensionMismatch("operator matrix is " + std::to_string(matrix_.rows()) + "x" +
                                std::to_string(matrix_.cols()) + " but dims multiply to " +
                                std::to_string(expected));
    }
}

QOperator QOperator::zero(const std::vector<int>& dims) {
    const long n = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<>());
    return {Matrix::Zero(n, n), dims};
}

QOperator QOperator::identity(const std::vector<int>& dims) {
    const long n = std::accumulate(dims.begin(), dims.end(), 1L, std::multiplies<>());
    return {Matrix::Identity(n, n), dims};
}

void QOperator::require_same_dims(const QOperator& other, const char* what) const {
    if (dims_ != other.dims_) {
        throw DimensionMismatch(std::string(what) + " requires operators on identical subsystem dims");
    }
}

QOperator& QOperator::operator+=(const QOperator& other) {
    require_same_dims(other, "addition");
    matrix_ += other.matrix_;
    return *this;
}

QOperator& QOperator::operator-=(const QOperator& other) {
    require_same_dims(other, "subtraction");
    matrix_ -= other.matrix_;
    return *this;
}

QOperator& QOperator::operator*=(cplx scale) {
    matrix_ *= scale;
    return *this;
}

QOperator operator*(const QOperator& lhs, const QOperator& rhs) {
    lhs.require_same_dims(rhs, "multiplication");
    return {lhs.matrix_ * rhs.matrix_, lhs.dims_};
}

Vector QOperator::apply(const Vector& ket) const {
    if (ket.size() != matrix_.cols()) {
        throw DimensionMismatch("ket length does not match operator dimension");
    }
    return matrix_ * ket;
}

QOperator commutator(const QOperator& lhs, const QOperator& rhs) {
    return lhs * rhs - rhs * lhs;
}

QOperator annihilation(int dim) {
    if (dim < 2) {
        throw InvalidDimension("annihilation operator needs dim >= 2, got " + std::to_string(dim));
    }
    Matrix m = Matrix::Zero(dim, dim);
    for (int n = 1; n < dim; ++n) {
        m(n - 1, n) = std::sqrt(static_cast<double>(n));
    }
    return {std::move(m), {dim}};
}

QOperator qubit_lowering() {
    Matrix m = Matrix::Zero(2, 2);
    m(static_cast<int>(QubitLevel::g), static_cast<int>(QubitLevel::e)) = 1.0;
    return {std::move(m), {2}};
}

namespace {

Matrix kron(const Matrix& lhs, const Matrix& rhs) {
    Matrix out(lhs.rows() * rhs.rows(), lhs.cols() * rhs.cols());
    for (Eigen::Index i = 0; i < lhs.rows(); ++i) {
        for (Eigen::Index j = 0; j < lhs.cols(); ++j) {
            out.block(i * rhs.rows(), j * rhs.cols(), rhs.rows(), rhs.cols()) = lhs(i, j) * rhs;
        }
    }
    return out;
}

} // namespace

QOperator embed(const QOperator& op, Slot slot, const TruncationConfig& cfg) {
    cfg.validate();
    const int s = static_cast<int>(slot);
    if (s < 0 || s > 2) {
        throw OutOfRange("subsystem slot out of range");
    }
    if (op.dims().size() != 1 || op.dims()[0] != cfg.slot_dim(slot)) {
        throw DimensionMismatch("operator of dimension " + std::to_string(op.size()) +
                                " does not fit slot of dimension " + std::to_string(cfg.slot_dim(slot)));
    }
    const auto dims = cfg.dims();
    Matrix out = Matrix::Identity(1, 1);
    for (int k = 0; k < 3; ++k) {
        out = kron(out, k == s ? op.matrix() : Matrix::Identity(dims[k], dims[k]));
    }
    return {std::move(out), dims};
}

Eigen::Index basis_index(const FockLabel& label, const TruncationConfig& cfg) {
    if (label.n_a < 0 || label.n_a > cfg.n_a_max || label.n_b < 0 || label.n_b > cfg.n_b_max) {
        throw OutOfRange("Fock label (" + std::to_string(label.n_a) + "," + std::to_string(label.n_b) +
                         ") exceeds truncation (" + std::to_string(cfg.n_a_max) + "," +
                         std::to_string(cfg.n_b_max) + ")");
    }
    return (static_cast<Eigen::Index>(label.n_a) * cfg.phonon_dim() + label.n_b) * 2 +
           static_cast<int>(label.q);
}

FockLabel basis_label(Eigen::Index index, const TruncationConfig& cfg) {
    if (index < 0 || index >= cfg.dim()) {
        throw OutOfRange("basis index " + std::to_string(index) + " out of range");
    }
    FockLabel label;
    label.q = static_cast<QubitLevel>(index % 2);
    index /= 2;
    label.n_b = static_cast<int>(index % cfg.phonon_dim());
    label.n_a = static_cast<int>(index / cfg.phonon_dim());
    return label;
}

Vector basis_state(const FockLabel& label, const TruncationConfig& cfg) {
    cfg.validate();
    Vector v = Vector::Zero(cfg.dim());
    v(basis_index(label, cfg)) = 1.0;
    return v;
}

std::vector<FockLabel> enumerate_labels(const TruncationConfig& cfg) {
    std::vector<FockLabel> out;
    out.reserve(static_cast<std::size_t>(cfg.dim()));
    for (Eigen::Index i = 0; i < cfg.dim(); ++i) {
        out.push_back(basis_label(i, cfg));
    }
    return out;
}

TruncationConfig truncation_of(const QOperator& op) {
    const auto& d = op.dims();
    if (d.size() != 3 || d[2] != TruncationConfig::qubit_dim) {
        throw DimensionMismatch("operator is not defined on the [photon, phonon, qubit] space");
    }
    TruncationConfig cfg{d[0] - 1, d[1] - 1};
    cfg.validate();
    return cfg;
}

} // namespace polariton
