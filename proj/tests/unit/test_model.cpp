#include <doctest.h>

#include <cmath>
#include <random>

#include "dicke/model.hpp"
#include "support.hpp"

using namespace dicke;
using testing::max_abs;

TEST_CASE("space dimension and ordering") {
    const SpaceConfig s(5, 2);
    CHECK(s.dim() == 4 * 6);
    CHECK(s.index(3, 0b10) == 3 * 4 + 2);
    CHECK(s.emitter_mask(1) == 0b10u);
    CHECK(s.emitter_mask(2) == 0b01u);
    CHECK_THROWS_AS(SpaceConfig(0, 1), InvalidArgument);
    CHECK_THROWS_AS(SpaceConfig(3, 0), InvalidArgument);
}

TEST_CASE("model parameter validation") {
    ModelParams p = ModelParams::resonant(1, 0.1, 0.0);
    CHECK_NOTHROW(p.validate());
    p.g = -0.1;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = ModelParams::resonant(1, 0.1, -1.0);
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
    p = ModelParams::resonant(1, 0.1, 0.0);
    p.omega_d = 0;
    CHECK_THROWS_AS(p.validate(), InvalidArgument);
}

TEST_CASE("annihilation operator matrix elements") {
    const SpaceConfig s(2, 1);
    const DenseOperator a = build_annihilation(s);
    for (unsigned e : {0u, 1u}) {
        CHECK(a(s.index(0, e), s.index(1, e)).real() == doctest::Approx(1.0).epsilon(1e-15));
        CHECK(a(s.index(1, e), s.index(2, e)).real() == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
        // a|0> = 0
        CHECK(a.col(s.index(0, e)).norm() == 0.0);
    }
    // identity on the emitter
    CHECK(a(s.index(0, 0), s.index(1, 1)) == cplx{});
}

TEST_CASE("truncated bosonic commutator deviates only at the top level") {
    const SpaceConfig s(6, 2);
    const DenseOperator a = build_annihilation(s);
    DenseOperator c = a * a.adjoint() - a.adjoint() * a;
    for (unsigned e = 0; e < 4; ++e) {
        const Eigen::Index top = s.index(6, e);
        CHECK(c(top, top).real() == doctest::Approx(-6.0));
        c(top, top) = 1.0;
    }
    CHECK(max_abs(c - DenseOperator::Identity(s.dim(), s.dim())) <= 1e-14);
}

TEST_CASE("emitter lowering operators") {
    const SpaceConfig s1(1, 1);
    const DenseOperator sm = build_emitter_lowering(1, s1);
    CHECK(sm(s1.index(0, 0), s1.index(0, 1)) == cplx{1.0});
    CHECK(sm.col(s1.index(0, 0)).norm() == 0.0);

    const SpaceConfig s2(3, 2);
    const DenseOperator s_1 = build_emitter_lowering(1, s2);
    const DenseOperator s_2 = build_emitter_lowering(2, s2);
    CHECK(max_abs(s_1 * s_2 - s_2 * s_1) <= 1e-14);
    CHECK(max_abs(s_1 * s_1) == 0.0);
    CHECK(max_abs(s_2 * s_2) == 0.0);
    // emitter 1 is the high bit
    CHECK(s_1(s2.index(0, 0b00), s2.index(0, 0b10)) == cplx{1.0});
    CHECK(s_2(s2.index(0, 0b00), s2.index(0, 0b01)) == cplx{1.0});
    CHECK_THROWS_AS(build_emitter_lowering(0, s2), InvalidArgument);
    CHECK_THROWS_AS(build_emitter_lowering(3, s2), InvalidArgument);
}

TEST_CASE("hand-expanded Hamiltonian on the 4-dimensional space") {
    const double g = 0.37;
    const SpaceConfig s(1, 1);
    const DenseOperator h = build_dicke_hamiltonian(ModelParams::resonant(1, g, 0.0), s);
    const auto g0 = s.index(0, 0), g1 = s.index(1, 0), e0 = s.index(0, 1), e1 = s.index(1, 1);
    DenseOperator expected = DenseOperator::Zero(4, 4);
    expected(g1, g1) = 1.0;
    expected(e0, e0) = 1.0;
    expected(e1, e1) = 2.0;
    expected(e0, g1) = expected(g1, e0) = g;  // rotating
    expected(e1, g0) = expected(g0, e1) = g;  // counter-rotating
    CHECK(max_abs(h - expected) <= 1e-15);
}

TEST_CASE("Hamiltonian builders are Hermitian for random parameters") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.1, 2.0);
    for (int trial = 0; trial < 10; ++trial) {
        ModelParams p;
        p.n_emitters = 1 + trial % 3;
        p.omega_c = u(rng);
        p.omega_x = u(rng);
        p.omega_d = u(rng);
        p.g = u(rng);
        p.drive_amplitude = u(rng);
        const SpaceConfig s(4, p.n_emitters);
        const DenseOperator h = build_dicke_hamiltonian(p, s);
        CHECK(max_abs(h - h.adjoint()) <= 1e-13 * max_abs(h));
        const DenseOperator d = build_drive_operator(p, s);
        CHECK(max_abs(d - d.adjoint()) <= 1e-14 * max_abs(d));
        for (const auto& x : build_coupling_channels(s)) CHECK(max_abs(x - x.adjoint()) <= 1e-14);
    }
}

TEST_CASE("drive operator") {
    const SpaceConfig s(1, 1);
    CHECK(max_abs(build_drive_operator(ModelParams::resonant(1, 0.1, 0.0), s)) == 0.0);
    const DenseOperator d = build_drive_operator(ModelParams::resonant(1, 0.1, 0.3), s);
    for (unsigned e : {0u, 1u}) {
        CHECK(d(s.index(0, e), s.index(1, e)) == cplx{0.3});
        CHECK(d(s.index(1, e), s.index(0, e)) == cplx{0.3});
        CHECK(d(s.index(0, e), s.index(0, e)) == cplx{});
    }
}

TEST_CASE("coupling channels") {
    const SpaceConfig s(1, 1);
    const auto ch = build_coupling_channels(s);
    REQUIRE(ch.size() == 2);
    CHECK(ch[0](s.index(0, 0), s.index(1, 0)) == cplx(0, -1));
    CHECK(ch[0](s.index(1, 0), s.index(0, 0)) == cplx(0, 1));
    CHECK(ch[1](s.index(0, 0), s.index(0, 1)) == cplx(0, -1));
    CHECK(build_coupling_channels(SpaceConfig(2, 3)).size() == 4);
}

TEST_CASE("spectrum at g = 0 is the ladder n_c omega_c + n_x omega_x") {
    ModelParams p;
    p.n_emitters = 2;
    p.omega_c = 1.0;
    p.omega_x = 1.3;
    const SpaceConfig s(5, 2);
    const Eigen::VectorXd ev = spectrum(build_dicke_hamiltonian(p, s));
    std::vector<double> ladder;
    for (int n = 0; n <= 5; ++n)
        for (int nx : {0, 1, 1, 2}) ladder.push_back(n * p.omega_c + nx * p.omega_x);
    std::sort(ladder.begin(), ladder.end());
    for (Eigen::Index i = 0; i < ev.size(); ++i) CHECK(ev(i) == doctest::Approx(ladder[static_cast<std::size_t>(i)]).epsilon(1e-13));

    const Eigen::VectorXd res = spectrum(build_dicke_hamiltonian(ModelParams::resonant(1, 0.0, 0.0), SpaceConfig(3, 1)));
    const double expected[] = {0, 1, 1, 2, 2, 3, 3, 4};
    for (int i = 0; i < 8; ++i) CHECK(std::abs(res(i) - expected[i]) <= 1e-13);
}

TEST_CASE("spectrum rejects non-Hermitian input") {
    DenseOperator m = DenseOperator::Zero(2, 2);
    m(0, 1) = 1.0;
    CHECK_THROWS_AS(spectrum(m), InvalidArgument);
}

TEST_CASE("single-excitation doublet splits to omega0 +- g") {
    for (double g : {1e-3, 5e-3, 1e-2}) {
        const Eigen::VectorXd ev = spectrum(build_dicke_hamiltonian(ModelParams::resonant(1, g, 0.0), SpaceConfig(4, 1)));
        // ev(0) ~ -g^2/2, the doublet follows; O(g^2) shifts from counter-rotating terms
        CHECK(std::abs(ev(1) - (1.0 - g)) <= 2 * g * g);
        CHECK(std::abs(ev(2) - (1.0 + g)) <= 2 * g * g);
    }
}

TEST_CASE("ground energy decreases with g") {
    double prev = 1.0;
    for (double g : {0.1, 0.3, 0.5}) {
        const double e0 = spectrum(build_dicke_hamiltonian(ModelParams::resonant(1, g, 0.0), SpaceConfig(30, 1)))(0);
        CHECK(e0 < prev);
        prev = e0;
    }
}

TEST_CASE("partial traces of product states") {
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 1 + trial % 2;
        const SpaceConfig s(3, n);
        const DenseOperator rc = testing::random_density(s.cavity_dim(), rng);
        const DenseOperator rx = testing::random_density(s.emitter_dim(), rng);
        const DenseOperator joint = embed_product(rc, rx);
        CHECK(max_abs(partial_trace_cavity(joint, s).matrix() - rx) <= 1e-13);
        CHECK(max_abs(partial_trace_emitters(joint, s).matrix() - rc) <= 1e-13);
    }
}

TEST_CASE("partial trace of a maximally entangled emitter-cavity pair") {
    const SpaceConfig s(1, 1);
    Eigen::VectorXcd psi = Eigen::VectorXcd::Zero(4);
    psi(s.index(0, 0)) = psi(s.index(1, 1)) = 1.0 / std::sqrt(2.0);
    const DenseOperator rho = psi * psi.adjoint();
    CHECK(max_abs(partial_trace_cavity(rho, s).matrix() - 0.5 * DenseOperator::Identity(2, 2)) <= 1e-15);
    CHECK(max_abs(partial_trace_emitters(rho, s).matrix() - 0.5 * DenseOperator::Identity(2, 2)) <= 1e-15);
}

TEST_CASE("reduced states of random joint states have unit trace") {
    std::mt19937_64 rng(3);
    const SpaceConfig s(4, 2);
    for (int trial = 0; trial < 20; ++trial) {
        const DenseOperator rho = testing::random_density(s.dim(), rng);
        CHECK(std::abs(partial_trace_cavity(rho, s).matrix().trace() - 1.0) <= 1e-12);
        CHECK(std::abs(partial_trace_emitters(rho, s).matrix().trace() - 1.0) <= 1e-12);
    }
    CHECK_THROWS_AS(partial_trace_cavity(DenseOperator::Identity(5, 5) / 5.0, s), InvalidArgument);
}

TEST_CASE("density matrix invariants") {
    DenseOperator m = DenseOperator::Identity(2, 2);
    CHECK_THROWS_AS(DensityMatrix{m}, InvalidArgument);  // trace 2
    m(0, 0) = 1.5;
    m(1, 1) = -0.5;
    CHECK_THROWS_AS(DensityMatrix{m}, InvalidArgument);  // negative eigenvalue
    Eigen::VectorXcd v(2);
    v << 1.0, cplx(0, 1);
    const DensityMatrix p = DensityMatrix::pure(v);
    CHECK(p.purity() == doctest::Approx(1.0));
}
