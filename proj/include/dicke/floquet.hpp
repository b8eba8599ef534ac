#pragma once

#include <span>
#include <vector>

#include "dicke/model.hpp"

namespace dicke {

/// Numerical knobs of the Floquet construction.
struct FloquetNumerics {
    int n_steps = 256;        // time steps per drive period (power of two, >= 32)
    int magnus_order = 4;     // 2: exponential midpoint, 4: commutator-free Magnus
    int nu_max = 55;          // Fourier modes nu in [-nu_max, nu_max]
    double degeneracy_tol = 1e-8;  // in units of omega0

    void validate() const;
};

/// U(t_i, t0) for t_i = t0 + i * T_d / n_steps, i = 0..n_steps.
struct PeriodPropagators {
    double omega_d = 1.0;
    double t0 = 0.0;
    double dt = 0.0;
    std::vector<DenseOperator> u;

    int n_steps() const { return static_cast<int>(u.size()) - 1; }
    const DenseOperator& one_period() const { return u.back(); }
};

/// Quasienergies and Fourier coefficients of the periodic Floquet states.
///
/// Column n of `coefficients(nu)` is |phi~_n(nu)>, so that
///     |phi_n(t)> = sum_nu exp(-i nu omega_d t) |phi~_n(nu)>.
/// For a static basis (driven == false) only nu = 0 is stored and `energies`
/// holds the unfolded eigenvalues of H_D.
struct FloquetBasis {
    double omega_d = 1.0;
    bool driven = false;
    int nu_max = 0;
    Eigen::VectorXd energies;
    std::vector<DenseOperator> fourier;  // index nu + nu_max

    /// Groups of states whose energies agree within the degeneracy tolerance.
    std::vector<std::vector<Eigen::Index>> degenerate_clusters;
    /// Set when a quasienergy cluster straddles the zone boundary and could not
    /// be rotated into a definite basis.
    bool unresolved_degeneracy = false;

    Eigen::Index dim() const { return fourier.empty() ? 0 : fourier.front().rows(); }
    Eigen::Index size() const { return energies.size(); }
    double period() const;
    bool has_degeneracy() const { return !degenerate_clusters.empty(); }

    const DenseOperator& coefficients(int nu) const { return fourier.at(static_cast<std::size_t>(nu + nu_max)); }

    /// Columns |phi_n(t)>.
    DenseOperator states_at(double t) const;
    /// Period-averaged energies eps_n + sum_nu nu omega_d || phi~_n(nu) ||^2.
    Eigen::VectorXd mean_energies() const;
    /// sum_nu || phi~_n(nu) ||^2 for every state.
    Eigen::VectorXd fourier_norms() const;
};

/// exp(-i dt H) for Hermitian H.
DenseOperator unitary_step(const DenseOperator& h, double dt);

/// Time-ordered propagators over one drive period of
/// H_S(t) = H_D + cos(omega_d t) * drive_factor.
PeriodPropagators propagate_period(const DenseOperator& h_dicke, const DenseOperator& drive_factor, double omega_d,
                                   int n_steps, int magnus_order = 4, double t0 = 0.0);

/// Diagonalizes the one-period propagator and Fourier-transforms the periodic
/// states. `label_operator` (optional, may be empty) breaks ties inside
/// degenerate quasienergy clusters after the period-averaged energy.
FloquetBasis floquet_states(const PeriodPropagators& props, int nu_max, double degeneracy_tol = 1e-8,
                            const DenseOperator& label_operator = {});

/// Eigenbasis of a time-independent Hamiltonian packaged as a static basis.
FloquetBasis static_basis(const DenseOperator& h_dicke, double omega_d = 1.0, double degeneracy_tol = 1e-8,
                          const DenseOperator& label_operator = {});

/// Full pipeline. Omega = 0 goes through static_basis unless `force_driven`.
FloquetBasis build_floquet_basis(const ModelParams& p, const SpaceConfig& space, const FloquetNumerics& num,
                                 bool force_driven = false);

/// E mapped to (-omega_d/2, omega_d/2].
double fold_into_zone(double energy, double omega_d);

/// Fourier coefficients c(nu), nu in [-nu_max, nu_max], of a matrix-valued
/// function sampled uniformly over one period:
///     c(nu) = (1/Ns) sum_j samples[j] exp(+2 pi i nu j / Ns).
std::vector<DenseOperator> fourier_coefficients(std::span<const DenseOperator> samples, int nu_max);

/// Inverse of fourier_coefficients: samples f(t_j) = sum_nu c(nu) exp(-2 pi i nu j / Ns).
std::vector<DenseOperator> synthesize_samples(std::span<const DenseOperator> coeffs, int n_samples);

}  // namespace dicke
