#pragma once

#include <optional>
#include <vector>

#include "dicke/model.hpp"

namespace dicke::semiclassical {

/// Mean-field parameters in the frame rotating at the drive frequency.
struct Params {
    int n_emitters = 1;
    double g = 0.0;
    double drive_amplitude = 0.0;
    double kappa = 1e-3;           // cavity amplitude decay rate
    double detuning_cavity = 0.0;  // omega_c - omega_d
    double detuning_emitter = 0.0; // omega_x - omega_d

    void validate() const;
};

/// alpha = <a>, beta_j = <sigma_-^(j)>, zeta_j = <sigma_z^(j)>.
struct State {
    cplx alpha{};
    std::vector<cplx> beta;
    std::vector<double> zeta;

    /// 4 |beta_j|^2 + zeta_j^2
    double pseudospin_length(std::size_t j) const;
    /// 4 |sum beta|^2 + (sum zeta)^2
    double total_pseudospin() const;
    cplx beta_sum() const;
    double zeta_sum() const;
};

State rhs(const State& s, const Params& p);

struct Sample {
    double t;
    State state;
};

struct Trajectory {
    std::vector<Sample> samples;
    double max_length_drift = 0.0;  // max_j,t |4|beta_j|^2 + zeta_j^2 - initial|
    double max_total_drift = 0.0;   // max_t |C(t) - C(0)|
};

/// Thrown when a conserved quantity drifts by more than 1e-6.
class ConservationError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Fixed-step classical RK4; every `sample_every`-th step is recorded.
Trajectory integrate(const State& s0, const Params& p, double t_end, double dt, int sample_every = 1);

/// Steady state on the alpha = 0 branch for total pseudospin C (resonance).
struct Branch {
    bool bimodal = false;   // (Omega / g)^2 > C: only the zeta = 0 phase exists
    cplx beta_sum{};        // -Omega / (2 g)
    double zeta_sum = 0.0;  // sqrt(C - (Omega / g)^2)
};

Branch steady_branch(double total_pseudospin, const Params& p);

/// A full state with alpha = 0 realizing the branch; each emitter has unit
/// pseudospin length. Empty for the bimodal marker or an unreachable C.
std::optional<State> branch_state(double total_pseudospin, const Params& p);

/// Omega_crit = g sqrt(C).
double critical_amplitude(double total_pseudospin, double g);

/// Allowed C values N^2, (N-2)^2, ..., ending at 0 (even N) or 1 (odd N).
std::vector<double> allowed_total_pseudospins(int n_emitters);

/// Closed-form alpha(t) for g = 0: -i Omega/(2 kappa) + (alpha0 + i Omega/(2 kappa)) e^{-kappa t}.
cplx decoupled_cavity_amplitude(cplx alpha0, const Params& p, double t);

}  // namespace dicke::semiclassical
