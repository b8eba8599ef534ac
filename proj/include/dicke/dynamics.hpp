#pragma once

#include <span>
#include <string>
#include <vector>

#include "dicke/dissipator.hpp"

namespace dicke {

/// Density matrix in the Floquet frame at t = 0:
/// rho_{m,n}(0) = <phi_m(0)| rho0 |phi_n(0)>.
struct FloquetDensity {
    DenseOperator rho;
};

/// Accepts traceless Hermitian input as well (differences of states).
FloquetDensity project_initial(const DenseOperator& rho0, const FloquetBasis& basis);
FloquetDensity project_initial(const DensityMatrix& rho0, const FloquetBasis& basis);

enum class PopulationMethod {
    dense_exponential,   // exp(W t) by scaling and squaring
    implicit_trapezoid,  // A-stable Crank-Nicolson substeps
};

/// Secular evolution of a Floquet-frame density matrix: populations follow
/// exp(W t), coherences decay as exp(-Z_{m,n} t).
class FloquetEvolution {
public:
    FloquetEvolution(FloquetDensity initial, Eigen::MatrixXcd coherence, std::vector<double> times,
                     std::vector<Eigen::VectorXd> populations);

    const std::vector<double>& times() const { return times_; }
    const std::vector<Eigen::VectorXd>& populations() const { return populations_; }
    /// rho_{m,n}(t_i) in the Floquet frame.
    DenseOperator rho_at(std::size_t i) const;

private:
    FloquetDensity initial_;
    Eigen::MatrixXcd coherence_;
    std::vector<double> times_;
    std::vector<Eigen::VectorXd> populations_;
};

/// `times` ascending and starting at 0. With `check_positivity` a population
/// below -1e-7 throws (inconsistent rate matrix).
FloquetEvolution evolve(const FloquetDensity& fd, const Eigen::MatrixXd& rates, const Eigen::MatrixXcd& coherence,
                        std::span<const double> times, PopulationMethod method = PopulationMethod::dense_exponential,
                        bool check_positivity = true);

/// Lab-frame operator sum_{m,n} rho_{m,n}(t) e^{-i(eps_m - eps_n) t} |phi_m(t)><phi_n(t)|.
DenseOperator reconstruct(const DenseOperator& rho_floquet, const FloquetBasis& basis, double t);
DensityMatrix reconstruct_state(const DenseOperator& rho_floquet, const FloquetBasis& basis, double t);

/// Smallest nonzero relaxation rate |Re lambda| of W.
double relaxation_gap(const Eigen::MatrixXd& rates);

struct SteadyStateInfo {
    int clipped_entries = 0;
    double smallest_nonzero_singular = 0.0;
};

/// Normalized null vector of W. Throws NumericalError if the null space is
/// not one-dimensional.
Eigen::VectorXd steady_state(const Eigen::MatrixXd& rates, SteadyStateInfo* info = nullptr);

struct CavityState {
    DensityMatrix rho;
    std::vector<std::string> warnings;
};

/// Stroboscopic long-time cavity state sum_n p_n Tr_x |phi_n(0)><phi_n(0)|.
CavityState stationary_cavity_state(const FloquetBasis& basis, const Eigen::VectorXd& p_ss, const SpaceConfig& space,
                                    const Eigen::MatrixXcd& coherence = {});

/// Emitter-reduced trajectory Tr_c rho(t_i) on the uniform grid t_i = i * dt.
/// For a driven basis dt must be period / phases_per_period; the reduction
/// kernels Tr_c |phi_m(t)><phi_n(t)| are tabulated once per phase.
class ReducedEmitterDynamics {
public:
    ReducedEmitterDynamics(const FloquetBasis& basis, const SpaceConfig& space, const Eigen::MatrixXd& rates,
                           const Eigen::MatrixXcd& coherence, double dt, int phases_per_period);

    double dt() const { return dt_; }

    /// Calls `sink(i, rho_x)` for i = 0..count-1. `rho0` is any Hermitian
    /// operator on the full space (typically a difference of two states).
    template <class Sink>
    void run(const DenseOperator& rho0, std::size_t count, Sink&& sink) const;

    std::vector<DenseOperator> trajectory(const DenseOperator& rho0, std::size_t count) const;

private:
    struct ActivePair {
        Eigen::Index m, n;
        cplx value;      // rho_{m,n}(0)
        cplx exponent;   // Z_{m,n} + i (eps_m - eps_n)
    };

    void accumulate(const Eigen::VectorXd& p, const std::vector<ActivePair>& pairs, double t, int phase,
                    DenseOperator& out) const;
    std::vector<ActivePair> active_pairs(const DenseOperator& rho_f) const;

    const FloquetBasis* basis_;
    Eigen::Index d_ = 0;
    Eigen::Index e_ = 0;
    double dt_ = 0.0;
    int phases_ = 1;
    Eigen::MatrixXd step_;  // exp(W dt)
    Eigen::MatrixXcd coherence_;
    DenseOperator frame0_;  // columns |phi_n(0)>
    // kernel_[phase][(m * d + n) * e * e + a * e + b] = (Tr_c |phi_m><phi_n|)(a, b)
    std::vector<std::vector<cplx>> kernel_;
};

template <class Sink>
void ReducedEmitterDynamics::run(const DenseOperator& rho0, std::size_t count, Sink&& sink) const {
    const DenseOperator rho_f = frame0_.adjoint() * rho0 * frame0_;
    std::vector<ActivePair> pairs = active_pairs(rho_f);
    Eigen::VectorXd p = rho_f.diagonal().real();
    DenseOperator out(e_, e_);
    for (std::size_t i = 0; i < count; ++i) {
        const double t = static_cast<double>(i) * dt_;
        const int phase = static_cast<int>(i % static_cast<std::size_t>(phases_));
        // Drop coherences once they have decayed below exp(-40) for good.
        std::erase_if(pairs, [t](const ActivePair& ap) { return ap.exponent.real() * t > 40.0; });
        accumulate(p, pairs, t, phase, out);
        sink(i, out);
        p = step_ * p;
    }
}

}  // namespace dicke
