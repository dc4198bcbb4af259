#include <doctest.h>

#include <set>

#include "polariton/correlations.hpp"
#include "polariton/errors.hpp"
#include "polariton/scenarios.hpp"
#include "support.hpp"

using namespace polariton;

namespace {

double falling_ratio(int n, int k) {
    // n!/((n-k)! n^k)
    double r = 1.0;
    for (int j = 0; j < k; ++j) r *= static_cast<double>(n - j) / n;
    return r;
}

// Truncated, renormalized two-mode coherent state |alpha>|beta>|g>.
Vector coherent(cplx alpha, cplx beta, const TruncationConfig& cfg) {
    Vector psi = Vector::Zero(cfg.dim());
    for (const FockLabel& l : enumerate_labels(cfg)) {
        if (l.q != QubitLevel::g) continue;
        const double fa = std::sqrt(std::tgamma(l.n_a + 1.0));
        const double fb = std::sqrt(std::tgamma(l.n_b + 1.0));
        psi(basis_index(l, cfg)) = std::pow(alpha, l.n_a) / fa * std::pow(beta, l.n_b) / fb;
    }
    return psi.normalized();
}

QOperator power(const QOperator& x, int k) {
    QOperator out = QOperator::identity(x.dims());
    for (int i = 0; i < k; ++i) out = out * x;
    return out;
}

} // namespace

TEST_CASE("Fock states obey g(k) = n!/((n-k)! n^k)") {
    const TruncationConfig cfg{4, 4};
    for (int n = 1; n <= 4; ++n) {
        const DensityMatrix rho = DensityMatrix::pure(basis_state({n, 0, QubitLevel::g}, cfg), cfg.dims());
        const CorrelationPoint p = g_k_zero(rho, Mode::a, 2);
        CHECK(std::abs(p.value - (1.0 - 1.0 / n)) < 1e-14);
        CHECK(p.mean_occupation == doctest::Approx(n));
        for (int k = 3; k <= 4; ++k) CHECK(std::abs(g_k_zero(rho, Mode::a, k).value - falling_ratio(n, k)) < 1e-13);
        // a beam splitter with vacuum keeps normalized correlations
        CHECK(std::abs(g_k_zero(rho, Mode::c, 2).value - (1.0 - 1.0 / n)) < 1e-13);
        CHECK(std::abs(g_k_zero(rho, Mode::d, 2).value - (1.0 - 1.0 / n)) < 1e-13);
        const DensityMatrix rb = DensityMatrix::pure(basis_state({0, n, QubitLevel::e}, cfg), cfg.dims());
        CHECK(std::abs(g_k_zero(rb, Mode::b, 2).value - (1.0 - 1.0 / n)) < 1e-14);
    }
}

TEST_CASE("coherent states are Poissonian to all orders") {
    const TruncationConfig cfg{12, 12};
    const DensityMatrix rho = DensityMatrix::pure(coherent({0.4, 0.2}, {-0.1, 0.5}, cfg), cfg.dims());
    for (Mode m : all_modes) {
        for (int k = 2; k <= 4; ++k) CHECK(std::abs(g_k_zero(rho, m, k).value - 1.0) < 1e-8);
    }
    const cplx alpha(0.4, 0.2), beta(-0.1, 0.5);
    const cplx expect = std::pow(std::conj(alpha), 2) * alpha * std::conj(beta) * std::pow(beta, 3);
    CHECK(std::abs(local_moment(rho, 2, 1, 1, 3) - expect) < 1e-9);
}

TEST_CASE("local moments of product Fock states") {
    const TruncationConfig cfg{3, 3};
    const DensityMatrix rho = DensityMatrix::pure(basis_state({2, 3, QubitLevel::g}, cfg), cfg.dims());
    CHECK(local_moment(rho, 1, 1, 1, 1) == cplx(6.0));
    CHECK(local_moment(rho, 2, 2, 0, 0).real() == doctest::Approx(2.0));
    CHECK(local_moment(rho, 0, 0, 3, 3).real() == doctest::Approx(6.0));
    CHECK(std::abs(local_moment(rho, 1, 0, 0, 0)) == 0.0);
    CHECK_THROWS_AS(local_moment(rho, -1, 0, 0, 0), OutOfRange);
}

TEST_CASE("thermal state has g(k) = k! and an all-plus signature") {
    const TruncationConfig cfg{30, 2};
    const double nbar = 0.3;
    Matrix m = Matrix::Zero(cfg.dim(), cfg.dim());
    for (int n = 0; n <= cfg.n_a_max; ++n) {
        m(basis_index({n, 0, QubitLevel::g}, cfg), basis_index({n, 0, QubitLevel::g}, cfg)) =
            std::pow(nbar, n) / std::pow(1 + nbar, n + 1);
    }
    m /= m.trace();
    const DensityMatrix rho(m, cfg.dims());
    CHECK(g_k_zero(rho, Mode::a, 2).value == doctest::Approx(2.0).epsilon(1e-10));
    CHECK(g_k_zero(rho, Mode::a, 3).value == doctest::Approx(6.0).epsilon(1e-10));
    CHECK(g_k_zero(rho, Mode::a, 4).value == doctest::Approx(24.0).epsilon(1e-10));
    const G234Signature s = g234_signature(rho, Mode::a);
    CHECK(s.signs == std::array<int, 3>{1, 1, 1});
    CHECK(s.boundary == std::array<bool, 3>{false, false, false});
}

TEST_CASE("undefined correlations") {
    const TruncationConfig cfg{3, 3};
    const DensityMatrix vac = DensityMatrix::pure(basis_state({0, 0, QubitLevel::e}, cfg), cfg.dims());
    CHECK_THROWS_AS(g_k_zero(vac, Mode::a, 2), UndefinedCorrelation);
    const DensityMatrix one = DensityMatrix::pure(basis_state({1, 0, QubitLevel::g}, cfg), cfg.dims());
    CHECK_THROWS_AS(g_k_zero(one, Mode::a, 1), OutOfRange);
    CHECK(g_k_zero(one, Mode::a, 2).value == 0.0);
    CHECK_THROWS_AS(g234_signature(one, Mode::a), UndefinedCorrelation);
}

TEST_CASE("three routes to hybrid moments agree on random states") {
    // local photon/phonon moments, binomial normal-ordered expansion, and the
    // operator products on the truncated space (exact for normal order)
    const TruncationConfig cfg{4, 4};
    testing::Rng rng(99);
    for (Mode mode : {Mode::c, Mode::d}) {
        const QOperator z = hybrid_mode_operator(mode, cfg);
        const QOperator n1 = z.adjoint() * z;
        const QOperator n2 = power(z.adjoint(), 2) * power(z, 2);
        for (int trial = 0; trial < 50; ++trial) {
            const DensityMatrix rho = rng.density(cfg);
            const HybridMoments local = hybrid_moments_from_local(rho, mode);
            const cplx m1 = normal_moment(rho, mode_vector(mode), 1, 1);
            const cplx m2 = normal_moment(rho, mode_vector(mode), 2, 2);
            CHECK(std::abs(local.n - m1.real()) < 1e-12);
            CHECK(std::abs(local.n2 - m2.real()) < 1e-12);
            CHECK(std::abs(rho.expectation(n1) - m1) < 1e-12);
            CHECK(std::abs(rho.expectation(n2) - m2) < 1e-12);
        }
    }
    CHECK_THROWS_AS(hybrid_moments_from_local(testing::Rng(1).density(cfg), Mode::a), OutOfRange);
}

TEST_CASE("normal moments of general modes match operator products") {
    const TruncationConfig cfg{4, 3};
    testing::Rng rng(123);
    const QOperator a = embed(annihilation(cfg.photon_dim()), Slot::photon, cfg);
    const QOperator b = embed(annihilation(cfg.phonon_dim()), Slot::phonon, cfg);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = rng.density(cfg);
        const ModeVector z{rng.gaussian(), rng.gaussian()};
        const QOperator zop = z.alpha * a + z.beta * b;
        for (int k = 0; k <= 3; ++k) {
            for (int l = 0; l <= 3; ++l) {
                const cplx direct = rho.expectation(power(zop.adjoint(), k) * power(zop, l));
                CHECK(std::abs(normal_moment(rho, z, k, l) - direct) < 1e-11 * std::max(1.0, std::abs(direct)));
            }
        }
    }
}

TEST_CASE("statistics cases") {
    const std::array<std::array<int, 3>, 8> table{{{-1, -1, -1}, {-1, -1, 1}, {-1, 1, -1}, {1, -1, -1},
                                                   {-1, 1, 1}, {1, -1, 1}, {1, 1, -1}, {1, 1, 1}}};
    std::set<int> seen;
    for (int c = 1; c <= 8; ++c) {
        const auto s = table[static_cast<std::size_t>(c - 1)];
        CHECK(case_signs(c) == s);
        const StatisticsLabel l = classify_statistics(1 + 0.5 * s[0], 1 + 0.5 * s[1], 1 + 0.5 * s[2]);
        CHECK(l.case_number == c);
        CHECK_FALSE(l.boundary);
        seen.insert(l.case_number);
    }
    CHECK(seen.size() == 8);
    CHECK(classify_statistics(1.005, 0.3, 2.0).boundary);
    CHECK(classify_statistics(1.005, 0.3, 2.0).case_number == 6);
    CHECK(classify_statistics(1.0, 0.3, 2.0).case_number == 0);
    CHECK_THROWS_AS(classify_statistics(std::nan(""), 1, 1), ClassificationError);
    CHECK_THROWS_AS(case_signs(9), OutOfRange);
}

TEST_CASE("dynamics rule on synthetic curves") {
    auto curve = [](double g0, double slope) {
        G2TauCurve c;
        for (int i = 0; i <= 100; ++i) {
            const double t = 0.02 * i;
            c.tau.push_back(t);
            c.values.push_back(g0 + slope * t * std::exp(-t));
        }
        return c;
    };
    CHECK(classify_dynamics(curve(0.5, 0.3), 0.5).dynamics == DynamicsCase::I);
    CHECK(classify_dynamics(curve(1.5, -0.3), 0.5).dynamics == DynamicsCase::II);
    CHECK(classify_dynamics(curve(1.5, 0.3), 0.5).dynamics == DynamicsCase::III);
    CHECK(classify_dynamics(curve(0.5, -0.3), 0.5).dynamics == DynamicsCase::IV);
    CHECK(classify_dynamics(curve(0.5, 1e-5), 0.5).dynamics == DynamicsCase::unbunched_sub);
    CHECK(classify_dynamics(curve(1.5, 1e-5), 0.5).dynamics == DynamicsCase::unbunched_super);
    // a dip before the rise is judged on the whole window, not the first step
    G2TauCurve dip = curve(0.5, 0.3);
    dip.values[1] = 0.499;
    CHECK(classify_dynamics(dip, 0.5).dynamics == DynamicsCase::I);
    const DynamicsLabel l = classify_dynamics(curve(0.5, 0.3), 0.5);
    CHECK(l.g2_zero == 0.5);
    CHECK(l.mean_shift > 0.0);
    CHECK_THROWS_AS(classify_dynamics(curve(0.5, 0.3), 3.0), InsufficientData);
    CHECK(dynamics_name(DynamicsCase::III) == "III");
    CHECK(bunching_window(presets::A3) == doctest::Approx(1 / 3.5));
}

TEST_CASE("regression curve starts at the zero-delay value") {
    const TruncationConfig cfg{3, 3};
    SystemParams p = presets::A1;
    p.g = 1.2;
    for (DrivenMode d : {DrivenMode::smr, DrivenMode::qd}) {
        const SystemParams q = d == DrivenMode::smr ? p : presets::A2;
        const Liouvillian L = build_liouvillian(driven_hamiltonian(q, d, cfg), q);
        const DensityMatrix rho = steady_state(L);
        const std::vector<double> tau{0.0, 0.1, 0.4};
        for (Mode m : all_modes) {
            const G2TauCurve c = g2_tau(rho, L, m, tau);
            CHECK(std::abs(c.values[0] - g_k_zero(rho, m, 2).value) < 1e-8);
        }
        // long delays decorrelate
        const std::vector<double> far{0.0, 60.0};
        CHECK(std::abs(g2_tau(rho, L, Mode::b, far).values[1] - 1.0) < 1e-6);
    }
}

TEST_CASE("minus-coupling correlations equal plus-coupling ones with a -> -i a") {
    const TruncationConfig cfg{4, 4};
    SystemParams p = presets::A2;
    p.g = 4.5;
    SystemParams undriven = p;
    undriven.eta_b = 0.0;
    const QOperator b = embed(annihilation(cfg.phonon_dim()), Slot::phonon, cfg);
    const QOperator Hm = hamiltonian_undriven(undriven, CouplingSign::minus, cfg) + p.eta_b * (b + b.adjoint());
    const Liouvillian Lm = build_liouvillian(Hm, p);
    const Liouvillian Lp = build_liouvillian(hamiltonian_qd_driven(p, cfg), p);
    const DensityMatrix rm = steady_state(Lm);
    const DensityMatrix rp = steady_state(Lp);
    const double s = 1 / std::sqrt(2.0);
    const ModeVector c_minus{s, s};
    const ModeVector c_plus{cplx(0, -s), s};
    CHECK(g_k_zero(rm, c_minus, 2) == doctest::Approx(g_k_zero(rp, c_plus, 2)).epsilon(1e-9));
    CHECK(g_k_zero(rm, Mode::a, 2).value == doctest::Approx(g_k_zero(rp, Mode::a, 2).value).epsilon(1e-9));
    CHECK(g_k_zero(rm, Mode::b, 2).value == doctest::Approx(g_k_zero(rp, Mode::b, 2).value).epsilon(1e-9));
    const std::vector<double> tau{0.0, 0.05, 0.2, 0.5};
    const auto gm = g2_tau(rm, Lm, c_minus, tau);
    const auto gp = g2_tau(rp, Lp, c_plus, tau);
    for (std::size_t i = 0; i < tau.size(); ++i) CHECK(std::abs(gm[i] - gp[i]) < 1e-7 * std::abs(gp[i]));
}
