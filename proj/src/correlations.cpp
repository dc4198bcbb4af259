#include "polariton/correlations.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "polariton/errors.hpp"

namespace polariton {

ModeVector mode_vector(Mode mode) {
    const double s = 1.0 / std::sqrt(2.0);
    switch (mode) {
    case Mode::a: return {1.0, 0.0};
    case Mode::b: return {0.0, 1.0};
    case Mode::c: return {s, s};
    case Mode::d: return {s, -s};
    }
    throw OutOfRange("unknown mode selector");
}

namespace {

// <n + i - j| a+^i a^j |n>, zero when the result would leave [0, cutoff].
double ladder_element(int n, int i, int j, int cutoff) {
    if (n < j || n - j + i > cutoff) return 0.0;
    double v = 1.0;
    for (int k = n - j + 1; k <= n; ++k) v *= k;         // n! / (n-j)!
    for (int k = n - j + 1; k <= n - j + i; ++k) v *= k; // (n-j+i)! / (n-j)!
    return std::sqrt(v);
}

double binomial(int n, int k) {
    double v = 1.0;
    for (int t = 1; t <= k; ++t) v = v * (n - k + t) / t;
    return v;
}

cplx ipow(cplx z, int n) {
    cplx out = 1.0;
    for (int k = 0; k < n; ++k) out *= z;
    return out;
}

QOperator mode_operator(const ModeVector& z, const TruncationConfig& cfg) {
    const QOperator a = embed(annihilation(cfg.photon_dim()), Slot::photon, cfg);
    const QOperator b = embed(annihilation(cfg.phonon_dim()), Slot::phonon, cfg);
    return z.alpha * a + z.beta * b;
}

TruncationConfig truncation_of(const DensityMatrix& rho) {
    const auto& d = rho.dims();
    if (d.size() != 3 || d[2] != TruncationConfig::qubit_dim) {
        throw DimensionMismatch("state is not defined on the [photon, phonon, qubit] space");
    }
    return {d[0] - 1, d[1] - 1};
}

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

} // namespace

cplx local_moment(const DensityMatrix& rho, int i, int j, int m, int n) {
    if (i < 0 || j < 0 || m < 0 || n < 0) {
        throw OutOfRange("moment powers must be non-negative");
    }
    const TruncationConfig cfg = truncation_of(rho);
    const Matrix& r = rho.matrix();
    cplx sum = 0.0;
    // Tr(rho A) = sum over the single nonzero diagonal of A = f_ij (x) g_mn (x) 1.
    for (int na = j; na <= cfg.n_a_max; ++na) {
        const double fa = ladder_element(na, i, j, cfg.n_a_max);
        if (fa == 0.0) continue;
        for (int nb = n; nb <= cfg.n_b_max; ++nb) {
            const double fb = ladder_element(nb, m, n, cfg.n_b_max);
            if (fb == 0.0) continue;
            for (int q = 0; q < 2; ++q) {
                const auto col = basis_index({na, nb, static_cast<QubitLevel>(q)}, cfg);
                const auto row = basis_index({na - j + i, nb - n + m, static_cast<QubitLevel>(q)}, cfg);
                sum += fa * fb * r(col, row);
            }
        }
    }
    return sum;
}

cplx normal_moment(const DensityMatrix& rho, const ModeVector& z, int k, int l) {
    // z+^k z^l = sum_{p,q} C(k,p) C(l,q) conj(alpha)^p conj(beta)^(k-p) alpha^q beta^(l-q)
    //            a+^p a^q b+^(k-p) b^(l-q)
    cplx sum = 0.0;
    for (int p = 0; p <= k; ++p) {
        const cplx left = binomial(k, p) * ipow(std::conj(z.alpha), p) * ipow(std::conj(z.beta), k - p);
        if (left == cplx(0.0)) continue;
        for (int q = 0; q <= l; ++q) {
            const cplx right = binomial(l, q) * ipow(z.alpha, q) * ipow(z.beta, l - q);
            if (right == cplx(0.0)) continue;
            sum += left * right * local_moment(rho, p, q, k - p, l - q);
        }
    }
    return sum;
}

double g_k_zero(const DensityMatrix& rho, const ModeVector& z, int k) {
    if (k < 2) {
        throw OutOfRange("correlation order must be >= 2, got " + std::to_string(k));
    }
    const double n = normal_moment(rho, z, 1, 1).real();
    if (!(n > occupancy_floor)) {
        throw UndefinedCorrelation("mean occupation " + std::to_string(n) + " is below the occupancy floor");
    }
    return normal_moment(rho, z, k, k).real() / std::pow(n, k);
}

CorrelationPoint g_k_zero(const DensityMatrix& rho, Mode mode, int k) {
    const ModeVector z = mode_vector(mode);
    CorrelationPoint out;
    out.mode = mode;
    out.order = k;
    out.value = g_k_zero(rho, z, k);
    out.mean_occupation = normal_moment(rho, z, 1, 1).real();
    return out;
}

std::vector<double> g2_tau(const DensityMatrix& rho_ss, const Liouvillian& L, const ModeVector& z,
                           std::span<const double> tau_grid, const EvolveOptions& options) {
    if (rho_ss.dims() != L.dims()) {
        throw DimensionMismatch("steady state and Liouvillian live on different spaces");
    }
    const double n = normal_moment(rho_ss, z, 1, 1).real();
    if (!(n > occupancy_floor)) {
        throw UndefinedCorrelation("mean occupation " + std::to_string(n) + " is below the occupancy floor");
    }
    const TruncationConfig cfg = truncation_of(rho_ss);
    const Matrix zm = mode_operator(z, cfg).matrix();
    const Matrix number = zm.adjoint() * zm;
    const Matrix dressed = zm * rho_ss.matrix() * zm.adjoint();
    // Tr(N x) = sum_ij N_ij x_ji
    const Matrix number_t = number.transpose();

    std::vector<double> values(tau_grid.size());
    propagate(dressed, L, tau_grid, [&](std::size_t k, const Matrix& x) {
        values[k] = number_t.cwiseProduct(x).sum().real() / (n * n);
    }, options);
    return values;
}

G2TauCurve g2_tau(const DensityMatrix& rho_ss, const Liouvillian& L, Mode mode,
                  std::span<const double> tau_grid, const EvolveOptions& options) {
    const ModeVector z = mode_vector(mode);
    G2TauCurve out;
    out.mode = mode;
    out.tau.assign(tau_grid.begin(), tau_grid.end());
    out.values = g2_tau(rho_ss, L, z, tau_grid, options);
    out.mean_occupation = normal_moment(rho_ss, z, 1, 1).real();
    return out;
}

StatisticsLabel classify_statistics(double g2_a, double g2_b, double g2_c) {
    const double g[3] = {g2_a, g2_b, g2_c};
    StatisticsLabel out;
    for (int k = 0; k < 3; ++k) {
        if (!std::isfinite(g[k])) {
            throw ClassificationError("cannot classify an undefined or non-finite correlation");
        }
        out.signs[k] = sign_of(g[k] - 1.0);
        out.boundary = out.boundary || std::abs(g[k] - 1.0) <= poissonian_band;
    }
    for (int c = 1; c <= 8; ++c) {
        if (case_signs(c) == out.signs) {
            out.case_number = c;
            break;
        }
    }
    return out;
}

std::array<int, 3> case_signs(int case_number) {
    static constexpr std::array<std::array<int, 3>, 8> table{{
        {-1, -1, -1},
        {-1, -1, +1},
        {-1, +1, -1},
        {+1, -1, -1},
        {-1, +1, +1},
        {+1, -1, +1},
        {+1, +1, -1},
        {+1, +1, +1},
    }};
    if (case_number < 1 || case_number > 8) {
        throw OutOfRange("statistics case must be in 1..8, got " + std::to_string(case_number));
    }
    return table[static_cast<std::size_t>(case_number - 1)];
}

std::string_view dynamics_name(DynamicsCase c) {
    switch (c) {
    case DynamicsCase::I: return "I";
    case DynamicsCase::II: return "II";
    case DynamicsCase::III: return "III";
    case DynamicsCase::IV: return "IV";
    case DynamicsCase::unbunched_sub: return "unbunched-sub";
    case DynamicsCase::unbunched_super: return "unbunched-super";
    }
    return "?";
}

double bunching_window(const SystemParams& p) {
    const double k = p.kappa_max();
    if (!(k > 0.0)) {
        throw ParameterError("bunching window needs a positive decay rate");
    }
    return 1.0 / k;
}

DynamicsLabel classify_dynamics(const G2TauCurve& curve, double tau_w) {
    const auto& t = curve.tau;
    const auto& v = curve.values;
    if (t.size() != v.size() || t.size() < 2) {
        throw InsufficientData("delay-time curve needs at least two points");
    }
    if (t.front() != 0.0) {
        throw InsufficientData("delay-time curve must start at tau = 0");
    }
    if (!(tau_w > 0.0)) {
        throw PreconditionError("bunching window must be positive");
    }
    if (t.back() < tau_w * (1.0 - 1e-12)) {
        throw InsufficientData("curve ends at tau = " + std::to_string(t.back()) +
                               " before the bunching window " + std::to_string(tau_w));
    }
    DynamicsLabel out;
    out.g2_zero = v.front();
    if (!std::isfinite(out.g2_zero)) {
        throw ClassificationError("g2(0) is not finite");
    }
    double area = 0.0;
    double span = 0.0;
    for (std::size_t k = 1; k < t.size() && t[k - 1] < tau_w; ++k) {
        const double h = std::min(t[k], tau_w) - t[k - 1];
        const double d0 = v[k - 1] - out.g2_zero;
        double d1 = v[k] - out.g2_zero;
        if (t[k] > tau_w) {
            // linear interpolation to the window edge
            d1 = d0 + (d1 - d0) * h / (t[k] - t[k - 1]);
        }
        out.max_shift = std::max({out.max_shift, std::abs(d0), std::abs(d1)});
        area += 0.5 * h * (d0 + d1);
        span += h;
    }
    if (span <= 0.0) {
        throw InsufficientData("no grid interval inside the bunching window");
    }
    out.mean_shift = area / span;

    const bool sub = out.g2_zero < 1.0;
    if (out.max_shift <= unbunched_band) {
        out.dynamics = sub ? DynamicsCase::unbunched_sub : DynamicsCase::unbunched_super;
    } else if (out.mean_shift > 0.0) {
        out.dynamics = sub ? DynamicsCase::I : DynamicsCase::III;
    } else {
        out.dynamics = sub ? DynamicsCase::IV : DynamicsCase::II;
    }
    return out;
}

G234Signature g234_signature(const DensityMatrix& rho, Mode mode) {
    const ModeVector z = mode_vector(mode);
    G234Signature out;
    for (int k = 2; k <= 4; ++k) {
        const double g = g_k_zero(rho, z, k);
        const auto idx = static_cast<std::size_t>(k - 2);
        out.values[idx] = g;
        if (!(g > 0.0)) {
            throw UndefinedCorrelation("g(" + std::to_string(k) + ") vanishes; its logarithm is undefined");
        }
        out.signs[idx] = sign_of(std::log(g));
        out.boundary[idx] = std::abs(g - 1.0) <= poissonian_band;
    }
    return out;
}

HybridMoments hybrid_moments_from_local(const DensityMatrix& rho, Mode mode) {
    if (mode != Mode::c && mode != Mode::d) {
        throw OutOfRange("moment identities are defined for the hybrid modes c and d");
    }
    // For d = (a - b)/sqrt2 every phonon ladder operator carries a factor -1.
    const double s = mode == Mode::c ? 1.0 : -1.0;
    auto fg = [&](int k, int l, int m, int n) {
        const double sign = ((m + n) % 2 == 0) ? 1.0 : s;
        return sign * local_moment(rho, k, l, m, n);
    };
    const cplx n1 = 0.5 * (fg(1, 1, 0, 0) + fg(0, 0, 1, 1) + fg(0, 1, 1, 0) + fg(1, 0, 0, 1));
    const cplx n2 = 0.25 * (fg(2, 2, 0, 0) + 4.0 * fg(1, 1, 1, 1) + fg(0, 0, 2, 2) + 2.0 * fg(0, 1, 2, 1) +
                            2.0 * fg(1, 0, 1, 2) + fg(2, 0, 0, 2) + fg(0, 2, 2, 0) + 2.0 * fg(2, 1, 0, 1) +
                            2.0 * fg(1, 2, 1, 0));
    return {n1.real(), n2.real()};
}

} // namespace polariton
