#include "dicke/floquet.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include <unsupported/Eigen/FFT>

namespace dicke {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

double unitarity_defect(const DenseOperator& u) {
    return (u.adjoint() * u - DenseOperator::Identity(u.rows(), u.cols())).cwiseAbs().maxCoeff();
}

// Makes the largest-magnitude entry of every column of the state table real
// and positive, applying the same phase to every Fourier coefficient.
void fix_gauge(std::vector<DenseOperator>& coeffs, const DenseOperator& reference) {
    for (Eigen::Index n = 0; n < reference.cols(); ++n) {
        Eigen::Index row = 0;
        reference.col(n).cwiseAbs().maxCoeff(&row);
        const cplx v = reference(row, n);
        if (std::abs(v) == 0.0) continue;
        const cplx phase = std::conj(v) / std::abs(v);
        for (auto& c : coeffs) c.col(n) *= phase;
    }
}

std::vector<std::vector<Eigen::Index>> find_clusters(const Eigen::VectorXd& sorted_energies, double tol) {
    std::vector<std::vector<Eigen::Index>> clusters;
    std::vector<Eigen::Index> current{0};
    for (Eigen::Index n = 1; n < sorted_energies.size(); ++n) {
        if (sorted_energies(n) - sorted_energies(n - 1) < tol) {
            current.push_back(n);
        } else {
            if (current.size() > 1) clusters.push_back(current);
            current = {n};
        }
    }
    if (current.size() > 1) clusters.push_back(current);
    return clusters;
}

// Rotates the columns of each cluster so that the cluster block of `metric`
// becomes diagonal (ascending). `metric(cols)` returns that Hermitian block.
template <class Metric>
void rotate_clusters(std::vector<DenseOperator>& coeffs, const std::vector<std::vector<Eigen::Index>>& clusters,
                     Metric metric) {
    for (const auto& cluster : clusters) {
        const DenseOperator block = metric(cluster);
        Eigen::SelfAdjointEigenSolver<DenseOperator> es(0.5 * (block + block.adjoint()));
        const DenseOperator& rot = es.eigenvectors();
        const auto s = static_cast<Eigen::Index>(cluster.size());
        for (auto& c : coeffs) {
            DenseOperator old(c.rows(), s);
            for (Eigen::Index k = 0; k < s; ++k) old.col(k) = c.col(cluster[static_cast<std::size_t>(k)]);
            const DenseOperator rotated = old * rot;
            for (Eigen::Index k = 0; k < s; ++k) c.col(cluster[static_cast<std::size_t>(k)]) = rotated.col(k);
        }
    }
}

double label_weight(const DenseOperator& label) {
    if (label.size() == 0) return 0.0;
    return 1e-3 / std::max(1.0, label.cwiseAbs().maxCoeff());
}

}  // namespace

void FloquetNumerics::validate() const {
    if (n_steps < 32 || !std::has_single_bit(static_cast<unsigned>(n_steps)))
        throw InvalidArgument("n_steps must be a power of two >= 32");
    if (magnus_order != 2 && magnus_order != 4) throw InvalidArgument("magnus_order must be 2 or 4");
    if (nu_max < 0) throw InvalidArgument("nu_max must be >= 0");
    if (n_steps < 2 * (2 * nu_max + 1)) throw InvalidArgument("n_steps must be >= 2 * (2 * nu_max + 1)");
    if (!(degeneracy_tol > 0)) throw InvalidArgument("degeneracy_tol must be positive");
}

double FloquetBasis::period() const { return kTwoPi / omega_d; }

DenseOperator FloquetBasis::states_at(double t) const {
    if (!driven) return fourier.front();
    DenseOperator out = DenseOperator::Zero(dim(), size());
    for (int nu = -nu_max; nu <= nu_max; ++nu)
        out += std::exp(-kI * (static_cast<double>(nu) * omega_d * t)) * coefficients(nu);
    return out;
}

Eigen::VectorXd FloquetBasis::mean_energies() const {
    Eigen::VectorXd e = energies;
    if (!driven) return e;
    for (int nu = -nu_max; nu <= nu_max; ++nu)
        e += (nu * omega_d) * coefficients(nu).colwise().squaredNorm().transpose();
    return e;
}

Eigen::VectorXd FloquetBasis::fourier_norms() const {
    Eigen::VectorXd w = Eigen::VectorXd::Zero(size());
    for (const auto& c : fourier) w += c.colwise().squaredNorm().transpose();
    return w;
}

double fold_into_zone(double energy, double omega_d) {
    double r = energy - omega_d * std::floor(energy / omega_d + 0.5);
    if (r <= -0.5 * omega_d) r += omega_d;
    return r;
}

DenseOperator unitary_step(const DenseOperator& h, double dt) {
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(h);
    const Eigen::VectorXcd phases = (-kI * dt * es.eigenvalues().cast<cplx>()).array().exp();
    return es.eigenvectors() * phases.asDiagonal() * es.eigenvectors().adjoint();
}

PeriodPropagators propagate_period(const DenseOperator& h_dicke, const DenseOperator& drive_factor, double omega_d,
                                   int n_steps, int magnus_order, double t0) {
    if (n_steps < 32 || !std::has_single_bit(static_cast<unsigned>(n_steps)))
        throw InvalidArgument("n_steps must be a power of two >= 32");
    if (magnus_order != 2 && magnus_order != 4) throw InvalidArgument("magnus_order must be 2 or 4");
    if (!(omega_d > 0)) throw InvalidArgument("omega_d must be positive");
    if (h_dicke.rows() != drive_factor.rows() || h_dicke.cols() != drive_factor.cols())
        throw InvalidArgument("H_D and drive factor dimensions differ");

    PeriodPropagators out;
    out.omega_d = omega_d;
    out.t0 = t0;
    out.dt = kTwoPi / omega_d / n_steps;
    out.u.reserve(static_cast<std::size_t>(n_steps) + 1);
    out.u.push_back(DenseOperator::Identity(h_dicke.rows(), h_dicke.cols()));

    const double h = out.dt;
    const bool static_drive = drive_factor.cwiseAbs().maxCoeff() == 0.0;
    const DenseOperator static_step = static_drive ? unitary_step(h_dicke, h) : DenseOperator{};

    // Commutator-free Magnus, fourth order: Gauss nodes c1,c2 and weights a1,a2.
    const double s3 = std::sqrt(3.0);
    const double c1 = 0.5 - s3 / 6.0, c2 = 0.5 + s3 / 6.0;
    const double a1 = (3.0 - 2.0 * s3) / 12.0, a2 = (3.0 + 2.0 * s3) / 12.0;

    for (int i = 0; i < n_steps; ++i) {
        const double t = t0 + i * h;
        DenseOperator step;
        if (static_drive) {
            step = static_step;
        } else if (magnus_order == 2) {
            step = unitary_step(h_dicke + std::cos(omega_d * (t + 0.5 * h)) * drive_factor, h);
        } else {
            const double f1 = std::cos(omega_d * (t + c1 * h));
            const double f2 = std::cos(omega_d * (t + c2 * h));
            const DenseOperator first = unitary_step(0.5 * h_dicke + (a2 * f1 + a1 * f2) * drive_factor, h);
            const DenseOperator second = unitary_step(0.5 * h_dicke + (a1 * f1 + a2 * f2) * drive_factor, h);
            step = second * first;
        }
        out.u.push_back(step * out.u.back());
        if (!out.u.back().allFinite())
            throw NumericalError("propagate_period: non-finite propagator at step " + std::to_string(i + 1) +
                                 " (t = " + std::to_string(t + h) + ")");
    }
    const double defect = unitarity_defect(out.u.back());
    if (defect > 1e-9)
        throw NumericalError("propagate_period: one-period propagator not unitary, max|U^dag U - 1| = " +
                             std::to_string(defect));
    return out;
}

std::vector<DenseOperator> fourier_coefficients(std::span<const DenseOperator> samples, int nu_max) {
    const auto ns = static_cast<int>(samples.size());
    if (ns < 2 * nu_max + 1) throw InvalidArgument("fourier_coefficients: too few samples for nu_max");
    const Eigen::Index rows = samples.front().rows(), cols = samples.front().cols();
    std::vector<DenseOperator> out(static_cast<std::size_t>(2 * nu_max + 1), DenseOperator(rows, cols));
    Eigen::FFT<double> fft;
    std::vector<cplx> in(static_cast<std::size_t>(ns)), res;
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) {
            for (int j = 0; j < ns; ++j) in[static_cast<std::size_t>(j)] = samples[static_cast<std::size_t>(j)](r, c);
            fft.inv(res, in);  // (1/Ns) sum_j x_j exp(+2 pi i k j / Ns)
            for (int nu = -nu_max; nu <= nu_max; ++nu)
                out[static_cast<std::size_t>(nu + nu_max)](r, c) = res[static_cast<std::size_t>((nu + ns) % ns)];
        }
    return out;
}

std::vector<DenseOperator> synthesize_samples(std::span<const DenseOperator> coeffs, int n_samples) {
    const int nu_max = (static_cast<int>(coeffs.size()) - 1) / 2;
    if (n_samples < 2 * nu_max + 1) throw InvalidArgument("synthesize_samples: too few samples for nu_max");
    const Eigen::Index rows = coeffs.front().rows(), cols = coeffs.front().cols();
    std::vector<DenseOperator> out(static_cast<std::size_t>(n_samples), DenseOperator(rows, cols));
    Eigen::FFT<double> fft;
    std::vector<cplx> in(static_cast<std::size_t>(n_samples)), res;
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index r = 0; r < rows; ++r) {
            std::fill(in.begin(), in.end(), cplx{});
            for (int nu = -nu_max; nu <= nu_max; ++nu)
                in[static_cast<std::size_t>((nu + n_samples) % n_samples)] = coeffs[static_cast<std::size_t>(nu + nu_max)](r, c);
            fft.fwd(res, in);  // sum_k X_k exp(-2 pi i k j / Ns)
            for (int j = 0; j < n_samples; ++j) out[static_cast<std::size_t>(j)](r, c) = res[static_cast<std::size_t>(j)];
        }
    return out;
}

FloquetBasis floquet_states(const PeriodPropagators& props, int nu_max, double degeneracy_tol,
                            const DenseOperator& label_operator) {
    const int ns = props.n_steps();
    if (ns < 2 * (2 * nu_max + 1)) throw InvalidArgument("floquet_states: n_steps must be >= 2 * (2 * nu_max + 1)");
    const double omega = props.omega_d;
    const double period = kTwoPi / omega;
    const DenseOperator& u_period = props.one_period();
    const Eigen::Index d = u_period.rows();

    Eigen::ComplexSchur<DenseOperator> schur(u_period);
    const DenseOperator& tri = schur.matrixT();
    const DenseOperator& vecs = schur.matrixU();

    Eigen::VectorXd eps(d);
    for (Eigen::Index n = 0; n < d; ++n) {
        const cplx lambda = tri(n, n);
        if (std::abs(std::abs(lambda) - 1.0) > 1e-6)
            throw NumericalError("floquet_states: |lambda| deviates from 1 by " +
                                 std::to_string(std::abs(std::abs(lambda) - 1.0)) + " (propagator not unitary enough)");
        eps(n) = fold_into_zone(-std::arg(lambda) / period, omega);
    }

    std::vector<Eigen::Index> order(static_cast<std::size_t>(d));
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(), [&](Eigen::Index a, Eigen::Index b) { return eps(a) < eps(b); });

    FloquetBasis basis;
    basis.omega_d = omega;
    basis.driven = true;
    basis.nu_max = nu_max;
    basis.energies.resize(d);
    DenseOperator v0(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        basis.energies(k) = eps(order[static_cast<std::size_t>(k)]);
        v0.col(k) = vecs.col(order[static_cast<std::size_t>(k)]);
    }

    // |phi_n(t_j)> = exp(i eps_n (t_j - t0)) U(t_j, t0) |v_n>
    std::vector<DenseOperator> samples;
    samples.reserve(static_cast<std::size_t>(ns));
    for (int j = 0; j < ns; ++j) {
        const double tau = j * props.dt;
        const Eigen::VectorXcd phase = (kI * tau * basis.energies.cast<cplx>()).array().exp();
        samples.push_back(props.u[static_cast<std::size_t>(j)] * v0 * phase.asDiagonal());
    }
    basis.fourier = fourier_coefficients(samples, nu_max);
    if (props.t0 != 0.0)
        for (int nu = -nu_max; nu <= nu_max; ++nu)
            basis.fourier[static_cast<std::size_t>(nu + nu_max)] *= std::exp(kI * (nu * omega * props.t0));

    basis.degenerate_clusters = find_clusters(basis.energies, degeneracy_tol);
    if (d > 1 && basis.energies(d - 1) - basis.energies(0) > omega - degeneracy_tol) basis.unresolved_degeneracy = true;

    const double weight = label_weight(label_operator);
    rotate_clusters(basis.fourier, basis.degenerate_clusters, [&](const std::vector<Eigen::Index>& cluster) {
        const auto s = static_cast<Eigen::Index>(cluster.size());
        DenseOperator block = DenseOperator::Zero(s, s);
        for (int nu = -nu_max; nu <= nu_max; ++nu) {
            const DenseOperator& c = basis.coefficients(nu);
            DenseOperator sub(d, s);
            for (Eigen::Index k = 0; k < s; ++k) sub.col(k) = c.col(cluster[static_cast<std::size_t>(k)]);
            block += (nu * omega) * (sub.adjoint() * sub);
            if (weight > 0) block += weight * (sub.adjoint() * label_operator * sub);
        }
        return block;
    });
    fix_gauge(basis.fourier, basis.states_at(0.0));
    return basis;
}

FloquetBasis static_basis(const DenseOperator& h_dicke, double omega_d, double degeneracy_tol,
                          const DenseOperator& label_operator) {
    if (!is_hermitian(h_dicke, 1e-12)) throw InvalidArgument("static_basis requires a Hermitian Hamiltonian");
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(h_dicke);
    FloquetBasis basis;
    basis.omega_d = omega_d;
    basis.driven = false;
    basis.nu_max = 0;
    basis.energies = es.eigenvalues();
    basis.fourier = {es.eigenvectors()};
    basis.degenerate_clusters = find_clusters(basis.energies, degeneracy_tol);
    if (label_operator.size() != 0) {
        rotate_clusters(basis.fourier, basis.degenerate_clusters, [&](const std::vector<Eigen::Index>& cluster) {
            const auto s = static_cast<Eigen::Index>(cluster.size());
            DenseOperator sub(h_dicke.rows(), s);
            for (Eigen::Index k = 0; k < s; ++k) sub.col(k) = basis.fourier[0].col(cluster[static_cast<std::size_t>(k)]);
            return DenseOperator(sub.adjoint() * label_operator * sub);
        });
    }
    fix_gauge(basis.fourier, basis.fourier[0]);
    return basis;
}

FloquetBasis build_floquet_basis(const ModelParams& p, const SpaceConfig& space, const FloquetNumerics& num,
                                 bool force_driven) {
    p.validate();
    num.validate();
    const DenseOperator h = build_dicke_hamiltonian(p, space);
    const DenseOperator label = build_emitter_label_operator(space);
    const double tol = num.degeneracy_tol * p.omega0;
    if (p.drive_amplitude == 0.0 && !force_driven) return static_basis(h, p.omega_d, tol, label);
    const PeriodPropagators props =
        propagate_period(h, build_drive_operator(p, space), p.omega_d, num.n_steps, num.magnus_order);
    return floquet_states(props, num.nu_max, tol, label);
}

}  // namespace dicke
