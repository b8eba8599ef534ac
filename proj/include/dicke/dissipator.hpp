#pragma once

#include <string>
#include <vector>

#include "dicke/floquet.hpp"

namespace dicke {

/// Ohmic thermal bath shared by the cavity and all emitters.
struct SpectralModel {
    double gamma = 0.01;         // gamma(omega) = gamma * omega / omega0
    double omega0 = 1.0;
    double temperature = 0.05;   // k_B T in units of omega0; 0 allowed
    bool lamb_shift = false;
    double lamb_cutoff = 10.0;   // upper limit of the principal-value integral
    int quadrature_cells = 20000;

    void validate() const;
    double cell_width() const { return lamb_cutoff / quadrature_cells; }
};

/// Ohmic spectral function; omega must be positive.
double gamma_fn(double omega, const SpectralModel& s);
/// Bose-Einstein occupation 1 / (exp(omega / T) - 1); zero at T = 0.
double thermal_occupation(double omega, double temperature);
/// Emission (omega > 0) and absorption (omega < 0) rate factor. At omega = 0
/// the common limit gamma * T / omega0 is returned.
double chi(double omega, const SpectralModel& s);

/// Re Gamma(omega + i0+) = (1/pi) P int_0^cutoff gamma(w) / (omega - w) dw,
/// evaluated by singularity subtraction and composite Gauss-Legendre cells.
double principal_value_shift(double omega, const SpectralModel& s);
/// Lamb-shift factor. Zero when the shift is disabled and at omega = 0.
double xi(double omega, const SpectralModel& s);

/// X_{m,n,nu} for nu in [-nu_max, nu_max]; element (m, n) of `at(nu)`.
/// The matching transition frequency is eps_n - eps_m + nu * omega_d.
struct TransitionTable {
    int nu_max = 0;
    std::vector<DenseOperator> elements;

    const DenseOperator& at(int nu) const { return elements.at(static_cast<std::size_t>(nu + nu_max)); }
};

TransitionTable transition_elements(const FloquetBasis& basis, const DenseOperator& x);

/// omega_{m,n,nu} = eps_m - eps_n + nu * omega_d
inline double transition_frequency(const FloquetBasis& b, Eigen::Index m, Eigen::Index n, int nu) {
    return b.energies(m) - b.energies(n) + nu * b.omega_d;
}

struct RateDiagnostics {
    double tail_fraction = 0.0;  // weight carried by |nu| >= basis nu_max
    bool tail_warning = false;
};

/// Population rate matrix: dp_n/dt = sum_k W(n, k) p_k.
Eigen::MatrixXd rate_matrix(const FloquetBasis& basis, const TransitionTable& table, const SpectralModel& s,
                            RateDiagnostics* diag = nullptr);
Eigen::MatrixXd rate_matrix(const FloquetBasis& basis, const std::vector<TransitionTable>& tables,
                            const SpectralModel& s, RateDiagnostics* diag = nullptr);

/// Coherence decay coefficients Z(m, n), m != n; the diagonal is zero.
Eigen::MatrixXcd coherence_coeffs(const FloquetBasis& basis, const std::vector<TransitionTable>& tables,
                                  const SpectralModel& s);

struct DissipatorData {
    std::vector<TransitionTable> tables;  // one per coupling channel
    Eigen::MatrixXd rates;                // W
    Eigen::MatrixXcd coherence;           // Z
    RateDiagnostics diagnostics;
    std::vector<std::string> warnings;
};

DissipatorData assemble_dissipator(const FloquetBasis& basis, const std::vector<DenseOperator>& channels,
                                   const SpectralModel& s);

}  // namespace dicke
