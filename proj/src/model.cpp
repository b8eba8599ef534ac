#include "dicke/model.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace dicke {

ModelParams ModelParams::resonant(int n_emitters, double g, double drive_amplitude, double omega0) {
    ModelParams p;
    p.n_emitters = n_emitters;
    p.omega0 = omega0;
    p.omega_c = omega0;
    p.omega_x = omega0;
    p.omega_d = omega0;
    p.g = g;
    p.drive_amplitude = drive_amplitude;
    return p;
}

void ModelParams::validate() const {
    if (n_emitters < 1) throw InvalidArgument("n_emitters must be >= 1");
    if (!(omega0 > 0) || !(omega_c > 0) || !(omega_x > 0) || !(omega_d > 0))
        throw InvalidArgument("all frequencies must be positive");
    if (!(g >= 0)) throw InvalidArgument("g must be >= 0");
    if (!(drive_amplitude >= 0)) throw InvalidArgument("drive_amplitude must be >= 0");
}

double ModelParams::drive_period() const { return 2.0 * std::numbers::pi / omega_d; }

SpaceConfig::SpaceConfig(int photon_cutoff, int n_emitters)
    : photon_cutoff_(photon_cutoff), n_emitters_(n_emitters) {
    if (photon_cutoff < 1) throw InvalidArgument("photon_cutoff must be >= 1");
    if (n_emitters < 1 || n_emitters > 16) throw InvalidArgument("n_emitters must be in [1, 16]");
}

DensityMatrix::DensityMatrix(DenseOperator rho, double tolerance) : rho_(std::move(rho)) {
    if (rho_.rows() != rho_.cols() || rho_.rows() == 0)
        throw InvalidArgument("density matrix must be square and non-empty");
    if (!rho_.allFinite()) throw InvalidArgument("density matrix has non-finite entries");
    const double herm = (rho_ - rho_.adjoint()).cwiseAbs().maxCoeff();
    if (herm > tolerance) throw InvalidArgument("density matrix is not Hermitian");
    rho_ = 0.5 * (rho_ + rho_.adjoint()).eval();
    const double tr = rho_.trace().real();
    if (std::abs(tr - 1.0) > tolerance) throw InvalidArgument("density matrix trace is not 1");
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(rho_, Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() < -tolerance)
        throw InvalidArgument("density matrix has a negative eigenvalue");
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& psi) {
    const double norm = psi.norm();
    if (!(norm > 0)) throw InvalidArgument("cannot build a pure state from a zero vector");
    const Eigen::VectorXcd v = psi / norm;
    return DensityMatrix(v * v.adjoint());
}

double DensityMatrix::purity() const { return (rho_ * rho_).trace().real(); }

DenseOperator build_annihilation(const SpaceConfig& space) {
    const Eigen::Index d = space.dim();
    DenseOperator a = DenseOperator::Zero(d, d);
    const auto E = static_cast<unsigned>(space.emitter_dim());
    for (int n = 1; n <= space.photon_cutoff(); ++n)
        for (unsigned b = 0; b < E; ++b)
            a(space.index(n - 1, b), space.index(n, b)) = std::sqrt(static_cast<double>(n));
    return a;
}

DenseOperator build_emitter_lowering(int j, const SpaceConfig& space) {
    if (j < 1 || j > space.n_emitters())
        throw InvalidArgument("emitter index " + std::to_string(j) + " out of range [1, " +
                              std::to_string(space.n_emitters()) + "]");
    const Eigen::Index d = space.dim();
    DenseOperator s = DenseOperator::Zero(d, d);
    const unsigned mask = space.emitter_mask(j);
    const auto E = static_cast<unsigned>(space.emitter_dim());
    for (int n = 0; n <= space.photon_cutoff(); ++n)
        for (unsigned b = 0; b < E; ++b)
            if (b & mask) s(space.index(n, b & ~mask), space.index(n, b)) = 1.0;
    return s;
}

DenseOperator build_dicke_hamiltonian(const ModelParams& p, const SpaceConfig& space) {
    p.validate();
    if (p.n_emitters != space.n_emitters())
        throw InvalidArgument("ModelParams and SpaceConfig disagree on n_emitters");
    const DenseOperator a = build_annihilation(space);
    const DenseOperator x = a + a.adjoint();
    DenseOperator h = p.omega_c * (a.adjoint() * a);
    for (int j = 1; j <= space.n_emitters(); ++j) {
        const DenseOperator sm = build_emitter_lowering(j, space);
        h += p.omega_x * (sm.adjoint() * sm);
        h += p.g * (x * (sm + sm.adjoint()));
    }
    return h;
}

DenseOperator build_drive_operator(const ModelParams& p, const SpaceConfig& space) {
    if (!(p.drive_amplitude >= 0)) throw InvalidArgument("drive_amplitude must be >= 0");
    const DenseOperator a = build_annihilation(space);
    return p.drive_amplitude * (a + a.adjoint());
}

std::vector<DenseOperator> build_coupling_channels(const SpaceConfig& space) {
    std::vector<DenseOperator> channels;
    channels.reserve(static_cast<std::size_t>(space.n_emitters()) + 1);
    const DenseOperator a = build_annihilation(space);
    channels.push_back(-kI * (a - a.adjoint()));
    for (int j = 1; j <= space.n_emitters(); ++j) {
        const DenseOperator sm = build_emitter_lowering(j, space);
        channels.push_back(-kI * (sm - sm.adjoint()));
    }
    return channels;
}

DenseOperator build_emitter_label_operator(const SpaceConfig& space) {
    const Eigen::Index d = space.dim();
    DenseOperator l = DenseOperator::Zero(d, d);
    for (int j = 1; j <= space.n_emitters(); ++j) {
        const DenseOperator sm = build_emitter_lowering(j, space);
        l += std::ldexp(1.0, j - 1) * (sm.adjoint() * sm);
    }
    return l;
}

bool is_hermitian(const DenseOperator& a, double rel_tol) {
    if (a.rows() != a.cols()) return false;
    const double scale = std::max(a.cwiseAbs().maxCoeff(), 1e-300);
    return (a - a.adjoint()).cwiseAbs().maxCoeff() <= rel_tol * scale;
}

Eigen::VectorXd spectrum(const DenseOperator& h) {
    if (!is_hermitian(h, 1e-12)) throw InvalidArgument("spectrum() requires a Hermitian matrix");
    Eigen::SelfAdjointEigenSolver<DenseOperator> es(h, Eigen::EigenvaluesOnly);
    return es.eigenvalues();
}

DenseOperator reduce_to_emitters(const DenseOperator& op, const SpaceConfig& space) {
    if (op.rows() != space.dim() || op.cols() != space.dim())
        throw InvalidArgument("partial trace: operator dimension does not match the space");
    const Eigen::Index E = space.emitter_dim();
    DenseOperator out = DenseOperator::Zero(E, E);
    for (Eigen::Index n = 0; n < space.cavity_dim(); ++n) out += op.block(n * E, n * E, E, E);
    return out;
}

DenseOperator reduce_to_cavity(const DenseOperator& op, const SpaceConfig& space) {
    if (op.rows() != space.dim() || op.cols() != space.dim())
        throw InvalidArgument("partial trace: operator dimension does not match the space");
    const Eigen::Index E = space.emitter_dim();
    const Eigen::Index C = space.cavity_dim();
    DenseOperator out(C, C);
    for (Eigen::Index n = 0; n < C; ++n)
        for (Eigen::Index m = 0; m < C; ++m) out(n, m) = op.block(n * E, m * E, E, E).trace();
    return out;
}

DensityMatrix partial_trace_cavity(const DenseOperator& rho, const SpaceConfig& space) {
    return DensityMatrix(reduce_to_emitters(rho, space));
}

DensityMatrix partial_trace_emitters(const DenseOperator& rho, const SpaceConfig& space) {
    return DensityMatrix(reduce_to_cavity(rho, space));
}

DenseOperator embed_product(const DenseOperator& rho_cavity, const DenseOperator& rho_emitters) {
    const Eigen::Index C = rho_cavity.rows();
    const Eigen::Index E = rho_emitters.rows();
    DenseOperator out(C * E, C * E);
    for (Eigen::Index n = 0; n < C; ++n)
        for (Eigen::Index m = 0; m < C; ++m) out.block(n * E, m * E, E, E) = rho_cavity(n, m) * rho_emitters;
    return out;
}

}  // namespace dicke
