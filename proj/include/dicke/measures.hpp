#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dicke/dynamics.hpp"

namespace dicke {

/// Half the trace norm of rho1 - rho2.
double trace_distance(const DenseOperator& rho1, const DenseOperator& rho2);
/// Half the trace norm of a Hermitian operator.
double half_trace_norm(const DenseOperator& delta);

enum class PairKind { canonical, random_pure, random_product };
std::string to_string(PairKind kind);

/// Two emitter states used as initial conditions of the distinguishability test.
struct StatePair {
    DenseOperator rho1;
    DenseOperator rho2;
    PairKind kind = PairKind::canonical;
    std::uint64_t seed = 0;
    bool extrapolated = false;  // canonical pair beyond the closed-form N <= 2 cases
};

/// rho_+/- = |x+/-><x+/-| per emitter, |x+/-> = (|e> +/- |g>) / sqrt(2).
StatePair canonical_pair(int n_emitters);
/// Two independent Haar-random pure states on the emitter space.
StatePair random_pure_pair(int n_emitters, std::uint64_t seed);
/// Two independent products of Haar-random single-emitter pure states.
StatePair random_product_pair(int n_emitters, std::uint64_t seed);

/// Time grid of the non-Markovianity integral.
struct GridSpec {
    int steps_per_period = 32;
    double horizon_factor = 20.0;   // t_max = horizon_factor / gap(W)
    double max_periods = 5000.0;    // cap on t_max in drive periods
};

struct NonMarkovResult {
    double value = 0.0;
    std::vector<double> distances;  // D(t_i), t_i = i * dt
    double dt = 0.0;
    double coarse_value = 0.0;       // same sum on the 2 dt subgrid
    double grid_delta = 0.0;         // |value - coarse_value|
    double tail_fraction = 0.0;      // share of value from the last 10% of the horizon
    bool converged = true;
};

/// Sum of the positive increments of a sampled trace-distance series.
double positive_increment_sum(const std::vector<double>& distances, std::size_t stride = 1);

/// Non-Markovianity of the emitter dynamics for one prepared system: every
/// initial state is (emitter state) (x) (cavity vacuum).
class NonMarkovEvaluator {
public:
    NonMarkovEvaluator(const FloquetBasis& basis, const SpaceConfig& space, const DissipatorData& dissipator,
                       const GridSpec& grid, double omega0);

    NonMarkovResult evaluate(const StatePair& pair) const;

    double dt() const { return dynamics_.dt(); }
    std::size_t grid_points() const { return count_; }
    double horizon() const { return dynamics_.dt() * static_cast<double>(count_ - 1); }
    int n_emitters() const { return space_.n_emitters(); }

private:
    static double grid_dt(const FloquetBasis& basis, const GridSpec& grid, double omega0);

    SpaceConfig space_;
    ReducedEmitterDynamics dynamics_;
    std::size_t count_ = 0;
};

struct SampleRecord {
    PairKind kind;
    std::uint64_t seed;
    double value;
    bool converged;
};

struct MaximizationResult {
    double best = 0.0;
    StatePair best_pair;
    std::vector<SampleRecord> samples;  // canonical first, then random pairs in seed order
};

/// Canonical pair plus `n_samples` Haar-random pairs with seeds seed, seed+1, ...
MaximizationResult maximize_nonmarkovianity(const NonMarkovEvaluator& evaluator, int n_samples, std::uint64_t seed,
                                            PairKind random_kind = PairKind::random_pure);

/// |N_driven - N_undriven| of two maximization results.
double delta_n(const MaximizationResult& driven, const MaximizationResult& undriven);

// --- Husimi function -----------------------------------------------------

struct HusimiGrid {
    double re_min = -5, re_max = 5;
    double im_min = -5, im_max = 5;
    int n_re = 101, n_im = 101;

    double re_at(int i) const { return n_re == 1 ? re_min : re_min + (re_max - re_min) * i / (n_re - 1); }
    double im_at(int j) const { return n_im == 1 ? im_min : im_min + (im_max - im_min) * j / (n_im - 1); }
};

struct HusimiField {
    HusimiGrid grid;
    Eigen::MatrixXd q;              // q(i, j) at (re_at(i), im_at(j))
    Eigen::Matrix<bool, Eigen::Dynamic, Eigen::Dynamic> trunc_ok;

    /// (1/pi) * Riemann sum of Q over the grid.
    double normalization() const;
};

/// Truncated coherent-state amplitudes e^{-|alpha|^2/2} alpha^n / sqrt(n!).
Eigen::VectorXcd coherent_vector(cplx alpha, int photon_cutoff);
double husimi_at(const DenseOperator& rho_cavity, cplx alpha);
HusimiField husimi(const DenseOperator& rho_cavity, const HusimiGrid& grid);

struct Mode {
    double re;
    double im;
    double value;
};

/// Local maxima above 5% of the global maximum, neighbours within one cell merged.
std::vector<Mode> detect_modes(const HusimiField& field);

}  // namespace dicke
