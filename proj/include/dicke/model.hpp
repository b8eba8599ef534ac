#pragma once

#include <complex>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace dicke {

using cplx = std::complex<double>;
using DenseOperator = Eigen::MatrixXcd;

inline constexpr cplx kI{0.0, 1.0};

/// Thrown when an input violates a documented precondition.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Thrown when a numerical result fails one of its self-checks.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Physical parameters of the laser-driven Dicke model. All frequencies are
/// angular frequencies measured in units of omega0.
struct ModelParams {
    int n_emitters = 1;
    double omega0 = 1.0;
    double omega_c = 1.0;
    double omega_x = 1.0;
    double omega_d = 1.0;
    double g = 0.0;
    double drive_amplitude = 0.0;

    /// Cavity, emitters and drive all at omega0.
    static ModelParams resonant(int n_emitters, double g, double drive_amplitude, double omega0 = 1.0);

    void validate() const;
    double drive_period() const;
};

/// Truncated joint Hilbert space. The cavity Fock index is the slow (outer)
/// index and the emitter bits are fast (inner):
///
///     index(n, bits) = n * 2^N + bits
///
/// Emitter j (1-based) is bit N - j of `bits`, so the emitter factor is the
/// Kronecker product e_1 (x) e_2 (x) ... (x) e_N. A set bit means excited.
class SpaceConfig {
public:
    SpaceConfig(int photon_cutoff, int n_emitters);

    int photon_cutoff() const { return photon_cutoff_; }
    int n_emitters() const { return n_emitters_; }
    Eigen::Index cavity_dim() const { return photon_cutoff_ + 1; }
    Eigen::Index emitter_dim() const { return Eigen::Index{1} << n_emitters_; }
    Eigen::Index dim() const { return cavity_dim() * emitter_dim(); }

    Eigen::Index index(int photons, unsigned emitter_bits) const {
        return photons * emitter_dim() + static_cast<Eigen::Index>(emitter_bits);
    }
    /// Bit mask of emitter j (1-based).
    unsigned emitter_mask(int j) const { return 1u << (n_emitters_ - j); }

    bool operator==(const SpaceConfig&) const = default;

private:
    int photon_cutoff_;
    int n_emitters_;
};

/// Hermitian, unit-trace, positive semidefinite matrix. Construction checks
/// the invariants (tolerance 1e-10) and symmetrizes away round-off.
class DensityMatrix {
public:
    static constexpr double kTolerance = 1e-10;

    explicit DensityMatrix(DenseOperator rho, double tolerance = kTolerance);

    static DensityMatrix pure(const Eigen::VectorXcd& psi);

    const DenseOperator& matrix() const { return rho_; }
    Eigen::Index dim() const { return rho_.rows(); }
    double purity() const;

private:
    DenseOperator rho_;
};

// --- operators --------------------------------------------------------------

DenseOperator build_annihilation(const SpaceConfig& space);
DenseOperator build_emitter_lowering(int j, const SpaceConfig& space);
DenseOperator build_dicke_hamiltonian(const ModelParams& p, const SpaceConfig& space);

/// Time-independent factor Omega (a + a^dag) of the drive; the full Hamiltonian
/// is H_S(t) = H_D + cos(omega_d t) * factor.
DenseOperator build_drive_operator(const ModelParams& p, const SpaceConfig& space);

/// Hermitian system-bath coupling operators: the cavity channel -i(a - a^dag)
/// first, then -i(sigma_-^(j) - sigma_+^(j)) for j = 1..N.
std::vector<DenseOperator> build_coupling_channels(const SpaceConfig& space);

/// Sum_j 2^(j-1) sigma_+^(j) sigma_-^(j). Distinct eigenvalue for every emitter
/// configuration; used to fix the basis inside degenerate eigenspaces.
DenseOperator build_emitter_label_operator(const SpaceConfig& space);

/// Ascending eigenvalues of a Hermitian matrix.
Eigen::VectorXd spectrum(const DenseOperator& h);

DensityMatrix partial_trace_cavity(const DenseOperator& rho, const SpaceConfig& space);
DensityMatrix partial_trace_emitters(const DenseOperator& rho, const SpaceConfig& space);

/// Tr_c without the density-matrix checks; used for traceless differences.
DenseOperator reduce_to_emitters(const DenseOperator& op, const SpaceConfig& space);
DenseOperator reduce_to_cavity(const DenseOperator& op, const SpaceConfig& space);

/// rho_cavity (x) rho_emitters in the global ordering.
DenseOperator embed_product(const DenseOperator& rho_cavity, const DenseOperator& rho_emitters);

bool is_hermitian(const DenseOperator& a, double rel_tol = 1e-12);

}  // namespace dicke
