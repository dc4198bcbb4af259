#include "polariton/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <Eigen/Eigenvalues>

#include "polariton/errors.hpp"

namespace polariton {

std::vector<FockLabel> manifold_labels(int n, const TruncationConfig& cfg) {
    cfg.validate();
    if (n < 0) {
        throw OutOfRange("manifold index must be non-negative");
    }
    if (n > cfg.n_a_max || n > cfg.n_b_max) {
        throw OutOfRange("manifold " + std::to_string(n) + " is cut by the Fock truncation");
    }
    std::vector<FockLabel> out;
    for (const FockLabel& l : enumerate_labels(cfg)) {
        if (l.excitations() == n) out.push_back(l);
    }
    return out;
}

ManifoldSpectrum manifold_spectrum(const QOperator& H, int n) {
    const TruncationConfig cfg = truncation_of(H);
    const QOperator N = polariton_number(cfg);
    const double scale = std::max(1.0, H.matrix().norm());
    if (commutator(H, N).matrix().norm() > 1e-12 * scale) {
        throw PreconditionError("Hamiltonian does not conserve the polariton number");
    }
    ManifoldSpectrum out;
    out.n = n;
    out.basis = manifold_labels(n, cfg);
    const auto m = static_cast<Eigen::Index>(out.basis.size());
    Matrix block(m, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < m; ++j) {
            block(i, j) = H.matrix()(basis_index(out.basis[i], cfg), basis_index(out.basis[j], cfg));
        }
    }
    Eigen::SelfAdjointEigenSolver<Matrix> solver(block);
    out.frequencies.assign(solver.eigenvalues().data(), solver.eigenvalues().data() + m);
    out.eigenvectors = solver.eigenvectors();
    return out;
}

AnalyticManifolds analytic_manifolds(const SystemParams& p) {
    if (p.delta_a != p.delta_b || p.delta_a != p.delta_q) {
        throw PreconditionError("closed-form manifolds need delta_a = delta_b = delta_q");
    }
    const double D = p.delta_a;
    const double g2 = p.g * p.g;
    const double f2 = p.f * p.f;
    const double r1 = std::sqrt(g2 + f2);
    const double f1 = std::sqrt(3.0 * f2 * (10.0 * g2 + 3.0 * f2) + g2 * g2);
    const double outer = 0.5 * std::sqrt(2.0 * (3.0 * g2 + 5.0 * f2 + f1));
    // 3g^2 + 5f^2 >= f1 always; clamp the rounding error at g = f = 0.
    const double inner = 0.5 * std::sqrt(std::max(0.0, 2.0 * (3.0 * g2 + 5.0 * f2 - f1)));
    AnalyticManifolds out;
    out.first = {D - r1, D, D + r1};
    out.second = {2.0 * D - outer, 2.0 * D - inner, 2.0 * D, 2.0 * D + inner, 2.0 * D + outer};
    return out;
}

JcDoublet jc_spectrum(int n, const SystemParams& p) {
    if (n < 0) {
        throw OutOfRange("JC doublet index must be non-negative");
    }
    const double delta1 = p.delta_q - p.delta_a;
    JcDoublet out;
    out.rabi = 2.0 * p.g * std::sqrt(n + 1.0);
    const double centre = (n + 1.0) * p.delta_a + 0.5 * delta1;
    const double half = 0.5 * std::hypot(delta1, out.rabi);
    out.e_plus = centre + half;
    out.e_minus = centre - half;
    out.resonant = delta1 == 0.0;
    out.mixing_angle = out.resonant ? 0.5 * std::numbers::pi : std::atan2(out.rabi, delta1);
    return out;
}

ResonanceDistances resonance_distances(double omega_p, std::span<const ManifoldSpectrum, 3> spectra) {
    double d[3];
    for (int k = 1; k <= 3; ++k) {
        const ManifoldSpectrum& s = spectra[static_cast<std::size_t>(k - 1)];
        if (s.frequencies.empty()) {
            throw PreconditionError("manifold " + std::to_string(k) + " is empty");
        }
        double best = std::numeric_limits<double>::infinity();
        for (double w : s.frequencies) {
            const double x = k * omega_p - w;
            best = std::min(best, x * x);
        }
        d[k - 1] = best;
    }
    return {d[0], d[1], d[2]};
}

namespace {

SystemParams undriven(SystemParams p) {
    p.eta_a = 0.0;
    p.eta_b = 0.0;
    return p;
}

} // namespace

ResonanceDistances resonance_distances(const SystemParams& p, const TruncationConfig& cfg) {
    const QOperator H = hamiltonian_undriven(undriven(p), CouplingSign::plus, cfg);
    const std::array<ManifoldSpectrum, 3> spectra{manifold_spectrum(H, 1), manifold_spectrum(H, 2),
                                                  manifold_spectrum(H, 3)};
    return resonance_distances(0.0, std::span<const ManifoldSpectrum, 3>(spectra));
}

ManifoldSweep manifold_sweep(const SystemParams& p, int n, std::span<const double> delta_b_grid,
                             const TruncationConfig& cfg) {
    if (delta_b_grid.empty()) {
        throw PreconditionError("manifold sweep needs a non-empty grid");
    }
    ManifoldSweep out;
    out.n = n;
    out.x.assign(delta_b_grid.begin(), delta_b_grid.end());
    out.min_gap = std::numeric_limits<double>::infinity();
    SystemParams q = undriven(p);
    for (double x : delta_b_grid) {
        q.delta_b = x;
        ManifoldSpectrum s = manifold_spectrum(hamiltonian_undriven(q, CouplingSign::plus, cfg), n);
        for (std::size_t j = 1; j < s.frequencies.size(); ++j) {
            const double gap = s.frequencies[j] - s.frequencies[j - 1];
            if (gap < out.min_gap) {
                out.min_gap = gap;
                out.min_gap_at = x;
                out.min_gap_branch = static_cast<int>(j - 1);
            }
        }
        out.levels.push_back(std::move(s.frequencies));
    }
    return out;
}

} // namespace polariton
