#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "dicke/floquet.hpp"
#include "support.hpp"

using namespace dicke;
using testing::max_abs;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

DenseOperator expm_hermitian(const DenseOperator& h, double t) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
    Eigen::VectorXcd ph(es.eigenvalues().size());
    for (Eigen::Index i = 0; i < ph.size(); ++i) ph(i) = std::exp(cplx(0, -t * es.eigenvalues()(i)));
    return es.eigenvectors() * ph.asDiagonal() * es.eigenvectors().adjoint();
}

std::vector<double> sorted(const Eigen::VectorXd& v) {
    std::vector<double> s(v.data(), v.data() + v.size());
    std::sort(s.begin(), s.end());
    return s;
}

FloquetNumerics desk_numerics() {
    FloquetNumerics n;
    n.n_steps = 128;
    n.nu_max = 20;
    return n;
}

}  // namespace

TEST_CASE("zone folding") {
    CHECK(fold_into_zone(0.5, 1.0) == doctest::Approx(0.5));
    CHECK(fold_into_zone(-0.5, 1.0) == doctest::Approx(0.5));
    CHECK(fold_into_zone(1.2, 1.0) == doctest::Approx(0.2));
    CHECK(fold_into_zone(-2.3, 1.0) == doctest::Approx(-0.3));
    CHECK(fold_into_zone(3.0, 2.0) == doctest::Approx(-1.0 + 2.0));
}

TEST_CASE("undriven propagator equals the matrix exponential") {
    for (double g : {0.0, 0.1, 0.3}) {
        const ModelParams p = ModelParams::resonant(1, g, 0.0);
        const SpaceConfig s(8, 1);
        const DenseOperator h = build_dicke_hamiltonian(p, s);
        const auto props = propagate_period(h, build_drive_operator(p, s), 1.0, 64);
        CHECK(max_abs(props.one_period() - expm_hermitian(h, kTwoPi)) <= 1e-8);
        if (g == 0.0) CHECK(max_abs(props.one_period() - DenseOperator::Identity(s.dim(), s.dim())) <= 1e-8);
    }
}

TEST_CASE("driven propagators are unitary on every grid point") {
    const ModelParams p = ModelParams::resonant(2, 0.15, 0.2);
    const SpaceConfig s(5, 2);
    const auto props = propagate_period(build_dicke_hamiltonian(p, s), build_drive_operator(p, s), 1.0, 64);
    for (const auto& u : props.u)
        CHECK(max_abs(u.adjoint() * u - DenseOperator::Identity(s.dim(), s.dim())) <= 1e-9);
}

TEST_CASE("fourth-order Magnus converges faster than the midpoint rule") {
    const ModelParams p = ModelParams::resonant(1, 0.2, 0.3);
    const SpaceConfig s(5, 1);
    const DenseOperator h = build_dicke_hamiltonian(p, s), v = build_drive_operator(p, s);
    const auto ref = propagate_period(h, v, 1.0, 2048, 4).one_period();
    const double e2 = max_abs(propagate_period(h, v, 1.0, 64, 2).one_period() - ref);
    const double e4 = max_abs(propagate_period(h, v, 1.0, 64, 4).one_period() - ref);
    CHECK(e4 < e2);
    const double e4_fine = max_abs(propagate_period(h, v, 1.0, 128, 4).one_period() - ref);
    CHECK(e4 / e4_fine > 12.0);  // ~16 for a fourth-order scheme
}

TEST_CASE("undriven quasienergies are the folded static eigenvalues") {
    for (double g : {0.1, 0.3}) {
        const ModelParams p = ModelParams::resonant(1, g, 0.0);
        const SpaceConfig s(10, 1);
        const FloquetBasis b = build_floquet_basis(p, s, FloquetNumerics{}, true);
        REQUIRE(b.driven);
        const Eigen::VectorXd e = spectrum(build_dicke_hamiltonian(p, s));
        Eigen::VectorXd folded(e.size());
        for (Eigen::Index i = 0; i < e.size(); ++i) folded(i) = fold_into_zone(e(i), 1.0);
        const auto a = sorted(b.energies), c = sorted(folded);
        for (std::size_t i = 0; i < a.size(); ++i) CHECK(std::abs(a[i] - c[i]) <= 1e-8);
        for (Eigen::Index i = 0; i < b.energies.size(); ++i) {
            CHECK(b.energies(i) > -0.5);
            CHECK(b.energies(i) <= 0.5);
        }

        // Fourier weight sits on the folding integer only
        for (Eigen::Index n = 0; n < b.size(); ++n) {
            int heavy = 0;
            for (int nu = -b.nu_max; nu <= b.nu_max; ++nu) {
                const double w = b.coefficients(nu).col(n).squaredNorm();
                if (w > 1e-10) ++heavy;
            }
            CHECK(heavy == 1);
        }
    }
}

TEST_CASE("driven basis: completeness and orthonormality") {
    const ModelParams p = ModelParams::resonant(1, 0.2, 0.1);
    const SpaceConfig s(6, 1);
    const FloquetBasis b = build_floquet_basis(p, s, desk_numerics());
    const Eigen::VectorXd w = b.fourier_norms();
    for (Eigen::Index n = 0; n < w.size(); ++n) CHECK(std::abs(w(n) - 1.0) <= 1e-6);
    for (double t : {0.0, 0.3, 2.0}) {
        const DenseOperator phi = b.states_at(t);
        CHECK(max_abs(phi.adjoint() * phi - DenseOperator::Identity(b.size(), b.size())) <= 1e-8);
    }
}

TEST_CASE("Floquet states solve the time-dependent Schroedinger equation") {
    const ModelParams p = ModelParams::resonant(1, 0.2, 0.1);
    const SpaceConfig s(6, 1);
    const FloquetBasis b = build_floquet_basis(p, s, desk_numerics());
    const DenseOperator h = build_dicke_hamiltonian(p, s), v = build_drive_operator(p, s);
    auto psi = [&](double t) {
        DenseOperator phi = b.states_at(t);
        for (Eigen::Index n = 0; n < b.size(); ++n) phi.col(n) *= std::exp(cplx(0, -b.energies(n) * t));
        return phi;
    };
    const double dt = 1e-4;
    for (double t : {0.5 * kTwoPi / 128, 1.7, 4.1}) {
        const DenseOperator deriv = (psi(t + dt) - psi(t - dt)) / (2 * dt);
        const DenseOperator resid = kI * deriv - (h + std::cos(t) * v) * psi(t);
        for (Eigen::Index n = 0; n < b.size(); ++n) CHECK(resid.col(n).norm() <= 1e-5);
    }
}

TEST_CASE("quasienergies converge under step doubling") {
    const ModelParams p = ModelParams::resonant(1, 0.2, 0.05);
    const SpaceConfig s(6, 1);
    FloquetNumerics a = desk_numerics(), c = desk_numerics();
    c.n_steps *= 2;
    const auto ea = sorted(build_floquet_basis(p, s, a).energies);
    const auto ec = sorted(build_floquet_basis(p, s, c).energies);
    for (std::size_t i = 0; i < ea.size(); ++i) CHECK(std::abs(ea[i] - ec[i]) <= 1e-8);
}

TEST_CASE("quasienergy set does not depend on the integration origin") {
    const ModelParams p = ModelParams::resonant(1, 0.2, 0.1);
    const SpaceConfig s(6, 1);
    const DenseOperator h = build_dicke_hamiltonian(p, s), v = build_drive_operator(p, s);
    const auto e0 = sorted(floquet_states(propagate_period(h, v, 1.0, 128, 4, 0.0), 20).energies);
    const auto e1 = sorted(floquet_states(propagate_period(h, v, 1.0, 128, 4, std::numbers::pi), 20).energies);
    for (std::size_t i = 0; i < e0.size(); ++i) CHECK(std::abs(e0[i] - e1[i]) <= 1e-9);
}

TEST_CASE("static basis") {
    const SpaceConfig s(4, 1);
    const FloquetBasis b0 = static_basis(build_dicke_hamiltonian(ModelParams::resonant(1, 0.0, 0.0), s));
    CHECK_FALSE(b0.driven);
    const double ladder[] = {0, 1, 1, 2, 2, 3, 3, 4, 4, 5};
    const auto e = sorted(b0.energies);
    for (int i = 0; i < 10; ++i) CHECK(std::abs(e[static_cast<std::size_t>(i)] - ladder[i]) <= 1e-13);

    const DenseOperator h = build_dicke_hamiltonian(ModelParams::resonant(1, 0.25, 0.0), s);
    const FloquetBasis b = static_basis(h);
    const DenseOperator phi = b.states_at(0.0);
    CHECK(max_abs(phi.adjoint() * phi - DenseOperator::Identity(b.size(), b.size())) <= 1e-12);
    const Eigen::VectorXd ref = spectrum(h);
    const auto got = sorted(b.energies);
    for (Eigen::Index i = 0; i < ref.size(); ++i) CHECK(got[static_cast<std::size_t>(i)] == ref(i));
    CHECK(max_abs(h * phi - phi * b.energies.cast<cplx>().asDiagonal()) <= 1e-12);
}

TEST_CASE("degenerate levels at g = 0 are resolved into product states") {
    const SpaceConfig s(3, 2);
    const FloquetBasis b = build_floquet_basis(ModelParams::resonant(2, 0.0, 0.0), s, FloquetNumerics{});
    CHECK(b.has_degeneracy());
    const DenseOperator phi = b.states_at(0.0);
    // every state is a single basis vector
    for (Eigen::Index n = 0; n < b.size(); ++n) CHECK(phi.col(n).cwiseAbs().maxCoeff() == doctest::Approx(1.0));
}

TEST_CASE("Fourier coefficients agree with the direct sum") {
    std::mt19937_64 rng(5);
    const int ns = 64, nu_max = 10;
    std::vector<DenseOperator> samples;
    for (int j = 0; j < ns; ++j) samples.push_back(testing::gaussian_matrix(3, 2, rng));
    const auto fft = fourier_coefficients(samples, nu_max);
    for (int nu = -nu_max; nu <= nu_max; ++nu) {
        DenseOperator direct = DenseOperator::Zero(3, 2);
        for (int j = 0; j < ns; ++j) direct += std::exp(cplx(0, kTwoPi * nu * j / ns)) * samples[static_cast<std::size_t>(j)];
        direct /= ns;
        CHECK(max_abs(fft[static_cast<std::size_t>(nu + nu_max)] - direct) <= 1e-13);
    }
    // band-limited round trip
    const auto full = fourier_coefficients(samples, ns / 2 - 1);
    const auto back = synthesize_samples(full, ns);
    const auto again = fourier_coefficients(back, ns / 2 - 1);
    for (std::size_t k = 0; k < full.size(); ++k) CHECK(max_abs(full[k] - again[k]) <= 1e-13);
}

TEST_CASE("numerics validation") {
    FloquetNumerics n;
    CHECK_NOTHROW(n.validate());
    n.n_steps = 100;
    CHECK_THROWS_AS(n.validate(), InvalidArgument);
    n.n_steps = 64;
    n.nu_max = 55;
    CHECK_THROWS_AS(n.validate(), InvalidArgument);
}
