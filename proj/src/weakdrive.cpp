#include "polariton/weakdrive.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

#include <Eigen/LU>

#include "polariton/correlations.hpp"
#include "polariton/errors.hpp"

namespace polariton {

namespace {

const double sqrt2 = std::sqrt(2.0);

struct Detunings {
    cplx dk, dg;
};

Detunings detunings(const SystemParams& p) {
    return {cplx(p.delta_a, -0.5 * p.kappa_a), cplx(p.delta_a, -0.5 * p.gamma)};
}

template <int N>
Eigen::Matrix<cplx, N, 1> solve_checked(const Eigen::Matrix<cplx, N, N>& M, const Eigen::Matrix<cplx, N, 1>& r,
                                        const char* what) {
    Eigen::FullPivLU<Eigen::Matrix<cplx, N, N>> lu(M);
    // rcond-style guard: pivots relative to the largest entry
    const double scale = M.cwiseAbs().maxCoeff();
    const double smallest = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
    if (scale == 0.0 || smallest <= 1e-14 * scale) {
        throw ResonanceSingularity(std::string(what) + " is singular at these parameters");
    }
    return lu.solve(r);
}

} // namespace

double AmplitudeSet::hierarchy_ratio() const {
    const double first = std::max({std::abs(c10g), std::abs(c01g), std::abs(c00e)});
    const double second =
        std::max({std::abs(c11g), std::abs(c20g), std::abs(c02g), std::abs(c10e), std::abs(c01e)});
    const double r1 = first / std::abs(c00g);
    const double r2 = first > 0.0 ? second / first : 0.0;
    return std::max(r1, r2);
}

void require_oracle_conditions(const SystemParams& p) {
    p.validate();
    if (p.delta_a != p.delta_b || p.delta_a != p.delta_q) {
        throw PreconditionError("weak-drive oracle needs delta_a = delta_b = delta_q");
    }
    if (p.kappa_a != p.kappa_b) {
        throw PreconditionError("weak-drive oracle needs kappa_a = kappa_b; use the master equation instead");
    }
    if (p.eta_a != 0.0) {
        throw PreconditionError("weak-drive oracle covers the QD-driven system only (eta_a must be 0)");
    }
}

SingleExcitation solve_single_excitation(const SystemParams& p) {
    require_oracle_conditions(p);
    const auto [dk, dg] = detunings(p);
    Eigen::Matrix<cplx, 3, 3> M;
    // unknowns (C01g, C10g, C00e)
    M << dk, p.f, 0.0,
         p.f, dk, p.g,
         0.0, p.g, dg;
    Eigen::Matrix<cplx, 3, 1> r(-p.eta_b, 0.0, 0.0);
    const auto x = solve_checked<3>(M, r, "single-excitation system");
    return {x(0), x(1), x(2)};
}

AmplitudeSet solve_double_excitation(const SystemParams& p, const SingleExcitation& s) {
    require_oracle_conditions(p);
    const auto [dk, dg] = detunings(p);
    const double f = p.f;
    const double g = p.g;
    const double eta = p.eta_b;
    Eigen::Matrix<cplx, 5, 5> M;
    // unknowns (C11g, C10e, C01e, C20g, C02g)
    M << 2.0 * dk, 0.0, g, sqrt2 * f, sqrt2 * f,
         0.0, dk + dg, f, sqrt2 * g, 0.0,
         g, f, dk + dg, 0.0, 0.0,
         sqrt2 * f, sqrt2 * g, 0.0, 2.0 * dk, 0.0,
         sqrt2 * f, 0.0, 0.0, 0.0, 2.0 * dk;
    Eigen::Matrix<cplx, 5, 1> r;
    r << -eta * s.c10g, 0.0, -eta * s.c00e, 0.0, -sqrt2 * eta * s.c01g;
    const auto x = solve_checked<5>(M, r, "two-excitation system");
    AmplitudeSet A;
    A.c01g = s.c01g;
    A.c10g = s.c10g;
    A.c00e = s.c00e;
    A.c11g = x(0);
    A.c10e = x(1);
    A.c01e = x(2);
    A.c20g = x(3);
    A.c02g = x(4);
    return A;
}

AmplitudeSet solve_amplitudes(const SystemParams& p) {
    return solve_double_excitation(p, solve_single_excitation(p));
}

AmplitudeSet closed_form_amplitudes(const SystemParams& p) {
    require_oracle_conditions(p);
    const auto [dk, dg] = detunings(p);
    const cplx dkg = dk + dg;
    const double f = p.f;
    const double g = p.g;
    const double eta = p.eta_b;
    const double f2 = f * f;
    const double g2 = g * g;
    const double g4 = g2 * g2;

    const cplx X1 = dkg * dkg - f2;
    const cplx X2 = dkg * (2.0 * dk + 5.0 * dg) - 4.0 * f2;
    const cplx X3 = 2.0 * dk * (dk * dk - f2) * X1;
    const cplx X4 = (3.0 * dk * dk * dkg + (dk - dg) * f2) * g2 - dk * g4;
    const cplx X5 = dk * dk * dg - dg * f2 - dk * g2;
    const cplx X6 = 3.0 * dk * dk + 4.0 * dk * dg + f2;
    const cplx X7 = dk * (2.0 * f2 - 3.0 * dg * dkg);
    if (std::abs(X5) == 0.0 || std::abs(X3 - X4) == 0.0) {
        throw ResonanceSingularity("closed-form denominators vanish at these parameters");
    }
    const cplx den2 = X5 * (X3 - X4);

    AmplitudeSet A;
    A.c01g = (dk * dg - g2) * eta / X5;
    A.c10g = -dg * f * eta / X5;
    A.c00e = g * f * eta / X5;
    A.c02g = eta * eta * (-2.0 * dk * dk * dk * dg * X1 + dk * dk * X2 * g2 - X6 * g4 + g4 * g2) / (sqrt2 * den2);
    A.c20g = -eta * eta * f2 * (2.0 * dk * dg * X1 + (2.0 * dk - dg) * dkg * g2 - g4) / (sqrt2 * den2);
    A.c11g = eta * eta * f * (2.0 * dk * dk * dg * X1 + X7 * g2 + dg * g4) / den2;
    A.c10e = 0.0;
    A.c01e = 0.0;
    return A;
}

FactorTwentyFourReport factor_twenty_four_diagnostic(const SystemParams& p) {
    const SingleExcitation s = solve_single_excitation(p);
    const double D = p.delta_a;
    const double k = p.kappa_a;
    const cplx Q(24.0 * p.g * p.g - 24.0 * D * D + k * k, 14.0 * k * D);
    FactorTwentyFourReport out;
    out.c10_ratio_snippet = p.f * cplx(24.0 * D, -2.0 * k) / Q;
    out.c00e_ratio_snippet = -24.0 * p.f * p.g / Q;
    out.c10_ratio_linear = s.c10g / s.c01g;
    out.c00e_ratio_linear = s.c00e / s.c01g;
    auto rel = [](cplx x, cplx ref) {
        const double scale = std::abs(ref);
        return scale > 0.0 ? std::abs(x - ref) / scale : std::abs(x);
    };
    out.max_relative_discrepancy = std::max(rel(out.c10_ratio_snippet, out.c10_ratio_linear),
                                            rel(out.c00e_ratio_snippet, out.c00e_ratio_linear));
    return out;
}

HybridAmplitudeSet bs_transform_amplitudes(const AmplitudeSet& A) {
    HybridAmplitudeSet H;
    H.c10g = (A.c10g + A.c01g) / sqrt2;
    H.c01g = (A.c10g - A.c01g) / sqrt2;
    H.c10e = (A.c10e + A.c01e) / sqrt2;
    H.c01e = (A.c10e - A.c01e) / sqrt2;
    H.c11g = (A.c20g - A.c02g) / sqrt2;
    H.c20g = 0.5 * (A.c20g + sqrt2 * A.c11g + A.c02g);
    H.c02g = 0.5 * (A.c20g - sqrt2 * A.c11g + A.c02g);
    return H;
}

OracleG2 oracle_g2(const AmplitudeSet& A) {
    const HybridAmplitudeSet H = bs_transform_amplitudes(A);
    auto ratio = [](cplx two, cplx one, const char* name) {
        const double n = std::norm(one);
        if (!(n > occupancy_floor)) {
            throw UndefinedCorrelation(std::string("single-excitation amplitude of mode ") + name +
                                       " is below the occupancy floor");
        }
        return 2.0 * std::norm(two) / (n * n);
    };
    return {ratio(A.c20g, A.c10g, "a"), ratio(A.c02g, A.c01g, "b"), ratio(H.c20g, H.c10g, "c")};
}

} // namespace polariton
