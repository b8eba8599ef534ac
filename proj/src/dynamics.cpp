#include "dicke/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <unsupported/Eigen/MatrixFunctions>

namespace dicke {

FloquetDensity project_initial(const DenseOperator& rho0, const FloquetBasis& basis) {
    if (rho0.rows() != basis.dim() || rho0.cols() != basis.dim())
        throw InvalidArgument("project_initial: state and basis dimensions differ");
    const DenseOperator frame = basis.states_at(0.0);
    DenseOperator r = frame.adjoint() * rho0 * frame;
    return {0.5 * (r + r.adjoint())};
}

FloquetDensity project_initial(const DensityMatrix& rho0, const FloquetBasis& basis) {
    return project_initial(rho0.matrix(), basis);
}

FloquetEvolution::FloquetEvolution(FloquetDensity initial, Eigen::MatrixXcd coherence, std::vector<double> times,
                                   std::vector<Eigen::VectorXd> populations)
    : initial_(std::move(initial)),
      coherence_(std::move(coherence)),
      times_(std::move(times)),
      populations_(std::move(populations)) {}

DenseOperator FloquetEvolution::rho_at(std::size_t i) const {
    const double t = times_.at(i);
    DenseOperator r = initial_.rho;
    for (Eigen::Index m = 0; m < r.rows(); ++m)
        for (Eigen::Index n = 0; n < r.cols(); ++n)
            if (m != n) r(m, n) *= std::exp(-coherence_(m, n) * t);
    r.diagonal() = populations_[i].cast<cplx>();
    return r;
}

namespace {

// Two-stage Gauss collocation for a linear system: (2,2) Pade stability function.
std::vector<Eigen::VectorXd> gauss_populations(const Eigen::MatrixXd& w, const Eigen::VectorXd& p0,
                                               std::span<const double> times) {
    const double norm = std::max(w.cwiseAbs().colwise().sum().maxCoeff(), 1e-300);
    const double h_max = 0.05 / norm;
    const Eigen::Index d = w.rows();
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(d, d);
    std::vector<Eigen::VectorXd> out;
    out.reserve(times.size());
    Eigen::VectorXd p = p0;
    double t_prev = 0.0;
    for (double t : times) {
        const double span = t - t_prev;
        if (span > 0) {
            const auto substeps = static_cast<long>(std::ceil(span / h_max));
            const double h = span / static_cast<double>(substeps);
            const Eigen::MatrixXd w2 = (h * h / 12.0) * (w * w);
            const Eigen::PartialPivLU<Eigen::MatrixXd> lhs(id - 0.5 * h * w + w2);
            const Eigen::MatrixXd rhs = id + 0.5 * h * w + w2;
            for (long k = 0; k < substeps; ++k) p = lhs.solve(rhs * p);
        }
        out.push_back(p);
        t_prev = t;
    }
    return out;
}

}  // namespace

FloquetEvolution evolve(const FloquetDensity& fd, const Eigen::MatrixXd& rates, const Eigen::MatrixXcd& coherence,
                        std::span<const double> times, PopulationMethod method, bool check_positivity) {
    if (times.empty() || times.front() != 0.0) throw InvalidArgument("evolve: times must start at 0");
    if (!std::is_sorted(times.begin(), times.end())) throw InvalidArgument("evolve: times must be ascending");
    if (rates.rows() != fd.rho.rows() || coherence.rows() != fd.rho.rows())
        throw InvalidArgument("evolve: rate tables and density dimensions differ");
    const Eigen::VectorXd p0 = fd.rho.diagonal().real();
    std::vector<Eigen::VectorXd> pops;
    if (method == PopulationMethod::dense_exponential) {
        pops.reserve(times.size());
        for (double t : times) pops.push_back(t == 0.0 ? p0 : Eigen::VectorXd((rates * t).exp() * p0));
    } else {
        pops = gauss_populations(rates, p0, times);
    }
    if (check_positivity)
        for (std::size_t i = 0; i < pops.size(); ++i)
            if (pops[i].minCoeff() < -1e-7)
                throw NumericalError("evolve: population " + std::to_string(pops[i].minCoeff()) + " at t = " +
                                     std::to_string(times[i]) + " (inconsistent rate matrix)");
    return {fd, coherence, std::vector<double>(times.begin(), times.end()), std::move(pops)};
}

DenseOperator reconstruct(const DenseOperator& rho_floquet, const FloquetBasis& basis, double t) {
    const DenseOperator phi = basis.states_at(t);
    const Eigen::VectorXcd phase = (-kI * t * basis.energies.cast<cplx>()).array().exp();
    const DenseOperator psi = phi * phase.asDiagonal();
    DenseOperator rho = psi * rho_floquet * psi.adjoint();
    return 0.5 * (rho + rho.adjoint());
}

DensityMatrix reconstruct_state(const DenseOperator& rho_floquet, const FloquetBasis& basis, double t) {
    return DensityMatrix(reconstruct(rho_floquet, basis, t), 1e-8);
}

double relaxation_gap(const Eigen::MatrixXd& rates) {
    Eigen::EigenSolver<Eigen::MatrixXd> es(rates, false);
    std::vector<double> re;
    re.reserve(static_cast<std::size_t>(rates.rows()));
    for (Eigen::Index i = 0; i < rates.rows(); ++i) re.push_back(std::abs(es.eigenvalues()(i).real()));
    std::sort(re.begin(), re.end());
    return re.size() > 1 ? re[1] : 0.0;
}

Eigen::VectorXd steady_state(const Eigen::MatrixXd& rates, SteadyStateInfo* info) {
    const Eigen::Index d = rates.rows();
    if (d == 1) return Eigen::VectorXd::Ones(1);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(rates, Eigen::ComputeFullV);
    const Eigen::VectorXd& sv = svd.singularValues();
    const double tol = 1e-12 * sv(0);
    if (sv(d - 2) <= tol) {
        std::string zero_modes;
        for (Eigen::Index i = 0; i < d; ++i)
            if (sv(i) <= tol) zero_modes += " " + std::to_string(i) + ":" + std::to_string(sv(i));
        throw NumericalError("steady_state: null space of W is not one-dimensional; zero modes (index:sigma)" +
                             zero_modes);
    }
    Eigen::VectorXd p = svd.matrixV().col(d - 1);
    p /= p.sum();
    int clipped = 0;
    for (Eigen::Index i = 0; i < d; ++i) {
        if (p(i) < -1e-8) throw NumericalError("steady_state: population " + std::to_string(p(i)) + " is negative");
        if (p(i) < 0) {
            p(i) = 0;
            ++clipped;
        }
    }
    p /= p.sum();
    if (info != nullptr) {
        info->clipped_entries = clipped;
        info->smallest_nonzero_singular = sv(d - 2);
    }
    return p;
}

CavityState stationary_cavity_state(const FloquetBasis& basis, const Eigen::VectorXd& p_ss, const SpaceConfig& space,
                                    const Eigen::MatrixXcd& coherence) {
    const DenseOperator phi = basis.states_at(0.0);
    const DenseOperator rho = phi * p_ss.cast<cplx>().asDiagonal() * phi.adjoint();
    CavityState out{DensityMatrix(reduce_to_cavity(0.5 * (rho + rho.adjoint()), space)), {}};
    for (Eigen::Index m = 0; m < coherence.rows(); ++m)
        for (Eigen::Index n = 0; n < coherence.cols(); ++n)
            if (m != n && coherence(m, n).real() <= 0.0) {
                out.warnings.push_back("Re Z(" + std::to_string(m) + "," + std::to_string(n) +
                                       ") <= 0: coherences need not decay");
                return out;
            }
    return out;
}

ReducedEmitterDynamics::ReducedEmitterDynamics(const FloquetBasis& basis, const SpaceConfig& space,
                                               const Eigen::MatrixXd& rates, const Eigen::MatrixXcd& coherence,
                                               double dt, int phases_per_period)
    : basis_(&basis),
      d_(basis.size()),
      e_(space.emitter_dim()),
      dt_(dt),
      phases_(basis.driven ? phases_per_period : 1),
      coherence_(coherence) {
    if (basis.dim() != space.dim()) throw InvalidArgument("ReducedEmitterDynamics: basis and space differ");
    if (!(dt > 0)) throw InvalidArgument("ReducedEmitterDynamics: dt must be positive");
    if (basis.driven && std::abs(dt * phases_per_period - basis.period()) > 1e-12 * basis.period())
        throw InvalidArgument("ReducedEmitterDynamics: dt * phases_per_period must equal the drive period");
    step_ = (rates * dt).exp();
    frame0_ = basis.states_at(0.0);

    const Eigen::Index c_dim = space.cavity_dim();
    kernel_.resize(static_cast<std::size_t>(phases_));
    for (int j = 0; j < phases_; ++j) {
        const DenseOperator phi = basis.states_at(j * dt);
        DenseOperator g(d_ * e_, c_dim);
        for (Eigen::Index m = 0; m < d_; ++m)
            for (Eigen::Index a = 0; a < e_; ++a)
                for (Eigen::Index c = 0; c < c_dim; ++c) g(m * e_ + a, c) = phi(c * e_ + a, m);
        const DenseOperator t = g * g.adjoint();
        auto& k = kernel_[static_cast<std::size_t>(j)];
        k.resize(static_cast<std::size_t>(d_ * d_ * e_ * e_));
        for (Eigen::Index m = 0; m < d_; ++m)
            for (Eigen::Index n = 0; n < d_; ++n)
                for (Eigen::Index a = 0; a < e_; ++a)
                    for (Eigen::Index b = 0; b < e_; ++b)
                        k[static_cast<std::size_t>(((m * d_ + n) * e_ + a) * e_ + b)] = t(m * e_ + a, n * e_ + b);
    }
}

std::vector<ReducedEmitterDynamics::ActivePair> ReducedEmitterDynamics::active_pairs(const DenseOperator& rho_f) const {
    const double scale = rho_f.cwiseAbs().maxCoeff();
    std::vector<ActivePair> pairs;
    for (Eigen::Index m = 0; m < d_; ++m)
        for (Eigen::Index n = m + 1; n < d_; ++n) {
            const cplx v = rho_f(m, n);
            if (std::abs(v) <= 1e-15 * scale) continue;
            const cplx exponent = coherence_(m, n) + kI * (basis_->energies(m) - basis_->energies(n));
            pairs.push_back({m, n, v, exponent});
        }
    return pairs;
}

void ReducedEmitterDynamics::accumulate(const Eigen::VectorXd& p, const std::vector<ActivePair>& pairs, double t,
                                        int phase, DenseOperator& out) const {
    const std::vector<cplx>& k = kernel_[static_cast<std::size_t>(phase)];
    const Eigen::Index e2 = e_ * e_;
    std::vector<cplx> s(static_cast<std::size_t>(e2), cplx{});
    for (Eigen::Index m = 0; m < d_; ++m) {
        const double w = 0.5 * p(m);
        if (w == 0.0) continue;
        const cplx* km = &k[static_cast<std::size_t>((m * d_ + m) * e2)];
        for (Eigen::Index q = 0; q < e2; ++q) s[static_cast<std::size_t>(q)] += w * km[q];
    }
    for (const auto& ap : pairs) {
        const cplx r = ap.value * std::exp(-ap.exponent * t);
        const cplx* kmn = &k[static_cast<std::size_t>((ap.m * d_ + ap.n) * e2)];
        for (Eigen::Index q = 0; q < e2; ++q) s[static_cast<std::size_t>(q)] += r * kmn[q];
    }
    for (Eigen::Index a = 0; a < e_; ++a)
        for (Eigen::Index b = 0; b < e_; ++b) out(a, b) = s[static_cast<std::size_t>(a * e_ + b)];
    out = (out + out.adjoint()).eval();
}

std::vector<DenseOperator> ReducedEmitterDynamics::trajectory(const DenseOperator& rho0, std::size_t count) const {
    std::vector<DenseOperator> out;
    out.reserve(count);
    run(rho0, count, [&](std::size_t, const DenseOperator& rho_x) { out.push_back(rho_x); });
    return out;
}

}  // namespace dicke
