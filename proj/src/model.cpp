#include "polariton/model.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <tuple>

#include "polariton/errors.hpp"

namespace polariton {

void SystemParams::validate() const {
    const double all[] = {delta_a, delta_b, delta_q, g, f, eta_a, eta_b, kappa_a, kappa_b, gamma};
    for (double v : all) {
        if (!std::isfinite(v)) {
            throw ParameterError("system parameters must be finite");
        }
    }
    if (kappa_a < 0.0 || kappa_b < 0.0 || gamma < 0.0) {
        throw ParameterError("decay rates must be non-negative");
    }
}

double SystemParams::kappa_max() const { return std::max({kappa_a, kappa_b, gamma}); }

std::string_view mode_name(Mode mode) {
    switch (mode) {
    case Mode::a: return "a";
    case Mode::b: return "b";
    case Mode::c: return "c";
    case Mode::d: return "d";
    }
    return "?";
}

namespace {

struct Ladder {
    QOperator a, b, sm;
};

Ladder ladder_operators(const TruncationConfig& cfg) {
    return {embed(annihilation(cfg.photon_dim()), Slot::photon, cfg),
            embed(annihilation(cfg.phonon_dim()), Slot::phonon, cfg),
            embed(qubit_lowering(), Slot::qubit, cfg)};
}

// Free part, JC interaction and the plus-sign hopping.
QOperator undriven_plus(const SystemParams& p, const Ladder& L) {
    const QOperator ad = L.a.adjoint();
    const QOperator bd = L.b.adjoint();
    const QOperator sp = L.sm.adjoint();
    return p.delta_a * (ad * L.a) + p.delta_b * (bd * L.b) + p.delta_q * (sp * L.sm) +
           p.g * (ad * L.sm + L.a * sp) + p.f * (ad * L.b + L.a * bd);
}

} // namespace

QOperator hamiltonian_smr_driven(const SystemParams& p, const TruncationConfig& cfg) {
    p.validate();
    const Ladder L = ladder_operators(cfg);
    return undriven_plus(p, L) + p.eta_a * (L.a + L.a.adjoint());
}

QOperator hamiltonian_qd_driven(const SystemParams& p, const TruncationConfig& cfg) {
    p.validate();
    const Ladder L = ladder_operators(cfg);
    return undriven_plus(p, L) + p.eta_b * (L.b + L.b.adjoint());
}

QOperator hamiltonian_undriven(const SystemParams& p, CouplingSign sign, const TruncationConfig& cfg) {
    p.validate();
    if (p.eta_a != 0.0 || p.eta_b != 0.0) {
        throw PreconditionError("undriven Hamiltonian requested with a nonzero drive amplitude");
    }
    const Ladder L = ladder_operators(cfg);
    if (sign == CouplingSign::plus) {
        return undriven_plus(p, L);
    }
    SystemParams no_hop = p;
    no_hop.f = 0.0;
    const QOperator hop = L.a * L.b.adjoint() - L.a.adjoint() * L.b;
    return undriven_plus(no_hop, L) + cplx(0.0, p.f) * hop;
}

QOperator polariton_number(const TruncationConfig& cfg) {
    const Ladder L = ladder_operators(cfg);
    return L.a.adjoint() * L.a + L.b.adjoint() * L.b + L.sm.adjoint() * L.sm;
}

QOperator hybrid_mode_operator(Mode mode, const TruncationConfig& cfg) {
    const Ladder L = ladder_operators(cfg);
    const double s = 1.0 / std::sqrt(2.0);
    switch (mode) {
    case Mode::a: return L.a;
    case Mode::b: return L.b;
    case Mode::c: return s * (L.a + L.b);
    case Mode::d: return s * (L.a - L.b);
    }
    throw OutOfRange("unknown mode selector");
}

std::pair<QOperator, QOperator> linear_coupler(double theta, const TruncationConfig& cfg) {
    const Ladder L = ladder_operators(cfg);
    const double s = std::sin(theta);
    const double c = std::cos(theta);
    return {s * L.a + c * L.b, c * L.a - s * L.b};
}

namespace {

double factorial(int n) { return std::tgamma(n + 1.0); }

double binomial(int n, int k) { return factorial(n) / (factorial(k) * factorial(n - k)); }

} // namespace

Vector bs_fock_map(const Vector& state, const TruncationConfig& cfg) {
    cfg.validate();
    if (state.size() != cfg.dim()) {
        throw DimensionMismatch("state length does not match the composite dimension");
    }
    // (n_a, n_b, q) -> amplitude of the image.
    std::map<std::tuple<int, int, int>, cplx> image;
    for (Eigen::Index idx = 0; idx < state.size(); ++idx) {
        const cplx amp = state(idx);
        if (amp == cplx(0.0, 0.0)) continue;
        const FockLabel in = basis_label(idx, cfg);
        const int n = in.n_a;
        const int m = in.n_b;
        const double norm = 1.0 / std::sqrt(factorial(n) * factorial(m) * std::pow(2.0, n + m));
        // (a+ - b+)^n (a+ + b+)^m |0>
        for (int i = 0; i <= n; ++i) {
            for (int j = 0; j <= m; ++j) {
                const int pa = n - i + m - j;
                const int pb = i + j;
                const double sign = (i % 2 == 0) ? 1.0 : -1.0;
                const double coeff =
                    sign * binomial(n, i) * binomial(m, j) * std::sqrt(factorial(pa) * factorial(pb));
                image[{pa, pb, static_cast<int>(in.q)}] += amp * norm * coeff;
            }
        }
    }
    const double scale = std::max(state.norm(), 1.0);
    Vector out = Vector::Zero(cfg.dim());
    for (const auto& [key, amp] : image) {
        const auto [pa, pb, q] = key;
        if (std::abs(amp) <= 1e-14 * scale) continue;
        if (pa > cfg.n_a_max || pb > cfg.n_b_max) {
            throw TruncationError("beam-splitter image contains |" + std::to_string(pa) + "," +
                                  std::to_string(pb) + "> beyond the cutoffs");
        }
        out(basis_index({pa, pb, static_cast<QubitLevel>(q)}, cfg)) = amp;
    }
    return out;
}

} // namespace polariton
