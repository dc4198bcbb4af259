#include <doctest.h>

#include <numbers>

#include "polariton/errors.hpp"
#include "polariton/model.hpp"
#include "polariton/weakdrive.hpp"
#include "support.hpp"

using namespace polariton;

namespace {

cplx element(const QOperator& H, FockLabel bra, FockLabel ket, const TruncationConfig& cfg) {
    return H.matrix()(basis_index(bra, cfg), basis_index(ket, cfg));
}

constexpr auto g_ = QubitLevel::g;
constexpr auto e_ = QubitLevel::e;

} // namespace

TEST_CASE("preset values") {
    CHECK(presets::A1 == SystemParams{-3, 3, -6, 0, 5, 0.7, 0, 1.5, 6, 1});
    CHECK(presets::A2 == SystemParams{5, -5, 3, 0, 7, 0, 0.5, 7.5, 6, 1});
    CHECK(presets::A3 == SystemParams{4, -4, 7, 0, 6.4, 0, 0.22, 3.5, 0.002, 1});
    CHECK(presets::A1.kappa_max() == 6.0);
    CHECK(presets::A2.kappa_max() == 7.5);
    CHECK(presets::A3.kappa_max() == 3.5);
}

TEST_CASE("time unit conversion") {
    CHECK(to_microseconds(10.0 * std::numbers::pi) == doctest::Approx(1.0));
    CHECK(from_microseconds(to_microseconds(3.7)) == doctest::Approx(3.7));
}

TEST_CASE("parameter validation") {
    SystemParams p = presets::A1;
    p.kappa_a = -1;
    CHECK_THROWS_AS(p.validate(), ParameterError);
    p = presets::A1;
    p.g = std::nan("");
    CHECK_THROWS_AS(p.validate(), ParameterError);
    CHECK_NOTHROW(presets::A2.validate());
}

TEST_CASE("SMR-driven Hamiltonian matrix elements") {
    const TruncationConfig cfg{3, 3};
    SystemParams p{-1.5, 2.5, 0.75, 1.25, 3.5, 0.6, 0.0, 1, 1, 1};
    const QOperator H = hamiltonian_smr_driven(p, cfg);
    CHECK((H.matrix() - H.matrix().adjoint()).norm() < 1e-14);
    // diagonal: D_a n_a + D_b n_b + D_q q
    for (const FockLabel& l : enumerate_labels(cfg)) {
        const double d = p.delta_a * l.n_a + p.delta_b * l.n_b + p.delta_q * static_cast<int>(l.q);
        CHECK(element(H, l, l, cfg).real() == doctest::Approx(d));
    }
    CHECK(element(H, {1, 0, g_}, {0, 0, e_}, cfg).real() == doctest::Approx(p.g));
    CHECK(element(H, {2, 1, g_}, {1, 1, e_}, cfg).real() == doctest::Approx(p.g * std::sqrt(2.0)));
    CHECK(element(H, {1, 0, g_}, {0, 1, g_}, cfg).real() == doctest::Approx(p.f));
    CHECK(element(H, {2, 0, e_}, {1, 1, e_}, cfg).real() == doctest::Approx(p.f * std::sqrt(2.0)));
    CHECK(element(H, {1, 2, g_}, {0, 2, g_}, cfg).real() == doctest::Approx(p.eta_a));
    // no counter-rotating terms and no QD drive
    CHECK(std::abs(element(H, {1, 0, e_}, {0, 0, g_}, cfg)) == 0.0);
    CHECK(std::abs(element(H, {0, 1, g_}, {0, 0, g_}, cfg)) == 0.0);
}

TEST_CASE("QD-driven Hamiltonian drives the phonon mode") {
    const TruncationConfig cfg{3, 3};
    SystemParams p = presets::A2;
    p.g = 2.0;
    const QOperator H = hamiltonian_qd_driven(p, cfg);
    CHECK(element(H, {0, 1, g_}, {0, 0, g_}, cfg).real() == doctest::Approx(p.eta_b));
    CHECK(element(H, {1, 3, e_}, {1, 2, e_}, cfg).real() == doctest::Approx(p.eta_b * std::sqrt(3.0)));
    CHECK(std::abs(element(H, {1, 0, g_}, {0, 0, g_}, cfg)) == 0.0);
}

TEST_CASE("undriven Hamiltonians conserve the polariton number") {
    const TruncationConfig cfg{4, 4};
    testing::Rng rng(3);
    for (int trial = 0; trial < 10; ++trial) {
        SystemParams p = rng.params(true);
        p.eta_b = 0.0;
        const QOperator N = polariton_number(cfg);
        for (CouplingSign s : {CouplingSign::plus, CouplingSign::minus}) {
            const QOperator H = hamiltonian_undriven(p, s, cfg);
            CHECK(commutator(H, N).matrix().norm() < 1e-12);
            CHECK((H.matrix() - H.matrix().adjoint()).norm() < 1e-13);
        }
    }
    CHECK_THROWS_AS(hamiltonian_undriven(presets::A1, CouplingSign::plus, cfg), PreconditionError);
}

TEST_CASE("minus coupling is the plus coupling with a -> i a") {
    // U = exp(i pi/2 (a+a + s+s)) gives a -> i a and s -> i s; the
    // qubit term is unchanged and the f term turns into the minus form
    const TruncationConfig cfg{3, 3};
    SystemParams p{1, -2, 0.5, 1.5, 2.5, 0, 0, 1, 1, 1};
    const Matrix Hp = hamiltonian_undriven(p, CouplingSign::plus, cfg).matrix();
    const Matrix Hm = hamiltonian_undriven(p, CouplingSign::minus, cfg).matrix();
    Matrix U = Matrix::Zero(cfg.dim(), cfg.dim());
    for (const FockLabel& l : enumerate_labels(cfg)) {
        const Eigen::Index i = basis_index(l, cfg);
        U(i, i) = std::polar(1.0, 0.5 * std::numbers::pi * (l.n_a + (l.q == QubitLevel::e ? 1 : 0)));
    }
    CHECK((U.adjoint() * Hp * U - Hm).norm() < 1e-12);
    CHECK(element({Hm, cfg.dims()}, {1, 0, g_}, {0, 1, g_}, cfg) == cplx(0.0, -p.f));
}

TEST_CASE("hybrid modes and the linear coupler") {
    const TruncationConfig cfg{3, 3};
    const QOperator a = hybrid_mode_operator(Mode::a, cfg);
    const QOperator b = hybrid_mode_operator(Mode::b, cfg);
    const QOperator c = hybrid_mode_operator(Mode::c, cfg);
    const QOperator d = hybrid_mode_operator(Mode::d, cfg);
    const double s = 1 / std::sqrt(2.0);
    CHECK((c.matrix() - s * (a.matrix() + b.matrix())).norm() < 1e-14);
    CHECK((d.matrix() - s * (a.matrix() - b.matrix())).norm() < 1e-14);
    const auto [cc, dd] = linear_coupler(std::numbers::pi / 4, cfg);
    CHECK((cc.matrix() - c.matrix()).norm() < 1e-14);
    CHECK((dd.matrix() - d.matrix()).norm() < 1e-14);
    const auto [c0, d0] = linear_coupler(0.0, cfg);
    CHECK((c0.matrix() - b.matrix()).norm() < 1e-14);
    CHECK((d0.matrix() - a.matrix()).norm() < 1e-14);
    CHECK(mode_name(Mode::c) == "c");
}

TEST_CASE("balanced coupler on Fock states") {
    const TruncationConfig cfg{3, 3};
    const double s = 1 / std::sqrt(2.0);
    const Vector out10 = bs_fock_map(basis_state({1, 0, g_}, cfg), cfg);
    CHECK(std::abs(out10(basis_index({1, 0, g_}, cfg)) - s) < 1e-14);
    CHECK(std::abs(out10(basis_index({0, 1, g_}, cfg)) + s) < 1e-14);
    const Vector out11 = bs_fock_map(basis_state({1, 1, e_}, cfg), cfg);
    CHECK(std::abs(out11(basis_index({2, 0, e_}, cfg)) - s) < 1e-14);
    CHECK(std::abs(out11(basis_index({0, 2, e_}, cfg)) + s) < 1e-14);
    CHECK(out11.norm() == doctest::Approx(1.0));
    CHECK_THROWS_AS(bs_fock_map(basis_state({3, 1, g_}, cfg), cfg), TruncationError);
}

TEST_CASE("balanced coupler is unitary on random low-excitation kets") {
    const TruncationConfig cfg{4, 4};
    testing::Rng rng(5);
    for (int trial = 0; trial < 50; ++trial) {
        Vector psi = Vector::Zero(cfg.dim());
        for (const FockLabel& l : enumerate_labels(cfg)) {
            if (l.n_a + l.n_b <= 4) psi(basis_index(l, cfg)) = rng.gaussian();
        }
        Vector phi = Vector::Zero(cfg.dim());
        for (const FockLabel& l : enumerate_labels(cfg)) {
            if (l.n_a + l.n_b <= 4) phi(basis_index(l, cfg)) = rng.gaussian();
        }
        const Vector Upsi = bs_fock_map(psi, cfg);
        const Vector Uphi = bs_fock_map(phi, cfg);
        CHECK(std::abs(Uphi.dot(Upsi) - phi.dot(psi)) < 1e-11 * psi.norm() * phi.norm());
    }
}

TEST_CASE("coupler image and hybrid amplitudes are two routes to the same numbers") {
    // the image amplitude at |n_a, n_b> equals (-1)^n_b times the amplitude
    // on the hybrid pair (c, d) computed by the weak-drive transform
    const TruncationConfig cfg{3, 3};
    testing::Rng rng(17);
    for (int trial = 0; trial < 20; ++trial) {
        AmplitudeSet A;
        A.c10g = rng.gaussian(); A.c01g = rng.gaussian();
        A.c10e = rng.gaussian(); A.c01e = rng.gaussian();
        A.c11g = rng.gaussian(); A.c20g = rng.gaussian(); A.c02g = rng.gaussian();
        Vector psi = Vector::Zero(cfg.dim());
        auto set = [&](FockLabel l, cplx v) { psi(basis_index(l, cfg)) = v; };
        set({1, 0, g_}, A.c10g); set({0, 1, g_}, A.c01g);
        set({1, 0, e_}, A.c10e); set({0, 1, e_}, A.c01e);
        set({1, 1, g_}, A.c11g); set({2, 0, g_}, A.c20g); set({0, 2, g_}, A.c02g);
        const Vector img = bs_fock_map(psi, cfg);
        const HybridAmplitudeSet H = bs_transform_amplitudes(A);
        auto at = [&](FockLabel l) { return img(basis_index(l, cfg)); };
        CHECK(std::abs(at({1, 0, g_}) - H.c10g) < 1e-12);
        CHECK(std::abs(at({0, 1, g_}) + H.c01g) < 1e-12);
        CHECK(std::abs(at({1, 0, e_}) - H.c10e) < 1e-12);
        CHECK(std::abs(at({0, 1, e_}) + H.c01e) < 1e-12);
        CHECK(std::abs(at({1, 1, g_}) + H.c11g) < 1e-12);
        CHECK(std::abs(at({2, 0, g_}) - H.c20g) < 1e-12);
        CHECK(std::abs(at({0, 2, g_}) - H.c02g) < 1e-12);
    }
}
