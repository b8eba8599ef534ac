#include "dicke/semiclassical.hpp"

#include <cmath>
#include <numbers>
#include <algorithm>
#include <numeric>

namespace dicke::semiclassical {

void Params::validate() const {
    if (n_emitters < 1) throw InvalidArgument("n_emitters must be >= 1");
    if (!(kappa > 0)) throw InvalidArgument("kappa must be positive");
    if (!(g >= 0)) throw InvalidArgument("g must be >= 0");
    if (!(drive_amplitude >= 0)) throw InvalidArgument("drive_amplitude must be >= 0");
}

double State::pseudospin_length(std::size_t j) const { return 4.0 * std::norm(beta.at(j)) + zeta.at(j) * zeta.at(j); }

cplx State::beta_sum() const { return std::accumulate(beta.begin(), beta.end(), cplx{}); }

double State::zeta_sum() const { return std::accumulate(zeta.begin(), zeta.end(), 0.0); }

double State::total_pseudospin() const {
    const double z = zeta_sum();
    return 4.0 * std::norm(beta_sum()) + z * z;
}

State rhs(const State& s, const Params& p) {
    State d;
    d.beta.resize(s.beta.size());
    d.zeta.resize(s.zeta.size());
    // The detuning enters as a rotation (i * detuning), damping as kappa.
    d.alpha = -(p.kappa + kI * p.detuning_cavity) * s.alpha - kI * p.g * s.beta_sum() - kI * (0.5 * p.drive_amplitude);
    for (std::size_t j = 0; j < s.beta.size(); ++j) {
        d.beta[j] = -kI * p.detuning_emitter * s.beta[j] + kI * p.g * s.alpha * s.zeta[j];
        const cplx flow = std::conj(s.alpha) * s.beta[j] - s.alpha * std::conj(s.beta[j]);
        d.zeta[j] = (2.0 * kI * p.g * flow).real();
    }
    return d;
}

namespace {

State axpy(const State& x, double h, const State& k) {
    State out = x;
    out.alpha += h * k.alpha;
    for (std::size_t j = 0; j < x.beta.size(); ++j) {
        out.beta[j] += h * k.beta[j];
        out.zeta[j] += h * k.zeta[j];
    }
    return out;
}

State rk4_step(const State& s, const Params& p, double h) {
    const State k1 = rhs(s, p);
    const State k2 = rhs(axpy(s, 0.5 * h, k1), p);
    const State k3 = rhs(axpy(s, 0.5 * h, k2), p);
    const State k4 = rhs(axpy(s, h, k3), p);
    State out = s;
    out.alpha += h / 6.0 * (k1.alpha + 2.0 * k2.alpha + 2.0 * k3.alpha + k4.alpha);
    for (std::size_t j = 0; j < s.beta.size(); ++j) {
        out.beta[j] += h / 6.0 * (k1.beta[j] + 2.0 * k2.beta[j] + 2.0 * k3.beta[j] + k4.beta[j]);
        out.zeta[j] += h / 6.0 * (k1.zeta[j] + 2.0 * k2.zeta[j] + 2.0 * k3.zeta[j] + k4.zeta[j]);
    }
    return out;
}

}  // namespace

Trajectory integrate(const State& s0, const Params& p, double t_end, double dt, int sample_every) {
    p.validate();
    if (s0.beta.size() != static_cast<std::size_t>(p.n_emitters) || s0.zeta.size() != s0.beta.size())
        throw InvalidArgument("integrate: state does not match n_emitters");
    if (!(dt > 0) || !(t_end >= 0)) throw InvalidArgument("integrate: need dt > 0 and t_end >= 0");
    const double rate = std::max({p.kappa, p.g, p.drive_amplitude});
    if (dt > 0.05 / rate) throw InvalidArgument("integrate: dt must be <= 0.05 / max(kappa, g, Omega)");
    if (sample_every < 1) throw InvalidArgument("integrate: sample_every must be >= 1");

    const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));
    const double h = steps > 0 ? t_end / static_cast<double>(steps) : 0.0;
    std::vector<double> lengths0(s0.beta.size());
    for (std::size_t j = 0; j < lengths0.size(); ++j) lengths0[j] = s0.pseudospin_length(j);
    const double c0 = s0.total_pseudospin();

    Trajectory traj;
    traj.samples.push_back({0.0, s0});
    State s = s0;
    for (long i = 1; i <= steps; ++i) {
        s = rk4_step(s, p, h);
        for (std::size_t j = 0; j < lengths0.size(); ++j)
            traj.max_length_drift = std::max(traj.max_length_drift, std::abs(s.pseudospin_length(j) - lengths0[j]));
        traj.max_total_drift = std::max(traj.max_total_drift, std::abs(s.total_pseudospin() - c0));
        if (traj.max_length_drift > 1e-6 || traj.max_total_drift > 1e-6)
            throw ConservationError("integrate: conserved pseudospin drifted by " +
                                    std::to_string(std::max(traj.max_length_drift, traj.max_total_drift)) +
                                    " at t = " + std::to_string(i * h) + "; use a smaller dt");
        if (i % sample_every == 0 || i == steps) traj.samples.push_back({i * h, s});
    }
    return traj;
}

std::vector<double> allowed_total_pseudospins(int n_emitters) {
    std::vector<double> out;
    for (int k = n_emitters; k >= 0; k -= 2) out.push_back(static_cast<double>(k) * k);
    return out;
}

Branch steady_branch(double total_pseudospin, const Params& p) {
    p.validate();
    const auto allowed = allowed_total_pseudospins(p.n_emitters);
    if (std::find(allowed.begin(), allowed.end(), total_pseudospin) == allowed.end())
        throw InvalidArgument("steady_branch: C = " + std::to_string(total_pseudospin) + " is not allowed for N = " +
                              std::to_string(p.n_emitters));
    Branch b;
    if (p.g == 0.0) {
        b.bimodal = p.drive_amplitude > 0;
        b.zeta_sum = b.bimodal ? 0.0 : std::sqrt(total_pseudospin);
        return b;
    }
    const double ratio = p.drive_amplitude / p.g;
    if (ratio * ratio > total_pseudospin || (total_pseudospin == 0.0 && p.drive_amplitude > 0)) {
        b.bimodal = true;
        return b;
    }
    b.beta_sum = -p.drive_amplitude / (2.0 * p.g);
    b.zeta_sum = std::sqrt(total_pseudospin - ratio * ratio);
    return b;
}

std::optional<State> branch_state(double total_pseudospin, const Params& p) {
    const Branch b = steady_branch(total_pseudospin, p);
    if (b.bimodal) return std::nullopt;
    const int n = p.n_emitters;
    // Total pseudospin vector S = (2 Re sum beta, 2 Im sum beta, sum zeta).
    const Eigen::Vector3d total(2.0 * b.beta_sum.real(), 2.0 * b.beta_sum.imag(), b.zeta_sum);
    const double len = total.norm();
    if (n == 1 && std::abs(len - 1.0) > 1e-12) return std::nullopt;
    if (len > n + 1e-12) return std::nullopt;

    State s;
    s.beta.resize(static_cast<std::size_t>(n));
    s.zeta.resize(static_cast<std::size_t>(n));
    Eigen::Vector3d axis = len > 0 ? Eigen::Vector3d(total / len) : Eigen::Vector3d::UnitZ();
    Eigen::Vector3d e1 = axis.unitOrthogonal();
    Eigen::Vector3d e2 = axis.cross(e1);
    const double along = len / n;
    const double radial = std::sqrt(std::max(0.0, 1.0 - along * along));
    for (int j = 0; j < n; ++j) {
        const double phi = 2.0 * std::numbers::pi * j / n;
        const Eigen::Vector3d v = along * axis + (n > 1 ? radial : 0.0) * (std::cos(phi) * e1 + std::sin(phi) * e2);
        s.beta[static_cast<std::size_t>(j)] = {0.5 * v.x(), 0.5 * v.y()};
        s.zeta[static_cast<std::size_t>(j)] = v.z();
    }
    // Exact sums (the ring construction cancels only up to round-off).
    const cplx beta_err = b.beta_sum - s.beta_sum();
    const double zeta_err = b.zeta_sum - s.zeta_sum();
    s.beta[0] += beta_err;
    s.zeta[0] += zeta_err;
    return s;
}

double critical_amplitude(double total_pseudospin, double g) {
    if (total_pseudospin < 0) throw InvalidArgument("critical_amplitude: C must be >= 0");
    return g * std::sqrt(total_pseudospin);
}

cplx decoupled_cavity_amplitude(cplx alpha0, const Params& p, double t) {
    const cplx stationary = -kI * p.drive_amplitude / (2.0 * p.kappa);
    return stationary + (alpha0 - stationary) * std::exp(-p.kappa * t);
}

}  // namespace dicke::semiclassical
