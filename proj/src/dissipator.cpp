#include "dicke/dissipator.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>

namespace dicke {

void SpectralModel::validate() const {
    if (!(gamma > 0)) throw InvalidArgument("gamma must be positive");
    if (!(omega0 > 0)) throw InvalidArgument("omega0 must be positive");
    if (!(temperature >= 0)) throw InvalidArgument("temperature must be >= 0");
    if (lamb_shift) {
        if (!(lamb_cutoff > 0)) throw InvalidArgument("lamb_cutoff must be positive");
        if (quadrature_cells < 16) throw InvalidArgument("quadrature_cells must be >= 16");
    }
}

double gamma_fn(double omega, const SpectralModel& s) {
    if (!(omega > 0)) throw InvalidArgument("gamma_fn requires omega > 0");
    return s.gamma * omega / s.omega0;
}

double thermal_occupation(double omega, double temperature) {
    if (temperature <= 0.0) return 0.0;
    return 1.0 / std::expm1(omega / temperature);
}

double chi(double omega, const SpectralModel& s) {
    if (omega > 0) return gamma_fn(omega, s) * (thermal_occupation(omega, s.temperature) + 1.0);
    if (omega < 0) return gamma_fn(-omega, s) * thermal_occupation(-omega, s.temperature);
    return s.gamma * s.temperature / s.omega0;
}

double principal_value_shift(double omega, const SpectralModel& s) {
    const double cut = s.lamb_cutoff;
    const double h = s.cell_width();
    if (std::abs(omega) >= cut - h)
        throw InvalidArgument("principal_value_shift: |omega| = " + std::to_string(std::abs(omega)) +
                              " is within one quadrature cell of the cutoff " + std::to_string(cut));
    auto f = [&](double w) { return s.gamma * w / s.omega0; };

    // 4-point Gauss-Legendre on every cell.
    static constexpr std::array<double, 4> nodes{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                                 0.8611363115940526};
    static constexpr std::array<double, 4> weights{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                                   0.3478548451374538};
    const double f_pole = omega > 0 ? f(omega) : 0.0;
    const double slope = s.gamma / s.omega0;
    double integral = 0.0;
    for (int c = 0; c < s.quadrature_cells; ++c) {
        const double mid = (c + 0.5) * h;
        for (std::size_t q = 0; q < nodes.size(); ++q) {
            const double w = mid + 0.5 * h * nodes[q];
            const double denom = omega - w;
            const double integrand = denom == 0.0 ? -slope : (f(w) - f_pole) / denom;
            integral += 0.5 * h * weights[q] * integrand;
        }
    }
    if (omega > 0) integral += f_pole * std::log(omega / (cut - omega));
    return integral / std::numbers::pi;
}

double xi(double omega, const SpectralModel& s) {
    if (!s.lamb_shift || omega == 0.0) return 0.0;
    if (omega > 0) return principal_value_shift(omega, s) * (thermal_occupation(omega, s.temperature) + 1.0);
    const double n = thermal_occupation(-omega, s.temperature);
    if (n == 0.0) return 0.0;
    return principal_value_shift(-omega, s) * n;
}

TransitionTable transition_elements(const FloquetBasis& basis, const DenseOperator& x) {
    if (x.rows() != basis.dim() || x.cols() != basis.dim())
        throw InvalidArgument("transition_elements: operator and basis dimensions differ");
    TransitionTable table;
    if (!basis.driven) {
        table.nu_max = 0;
        table.elements = {basis.fourier.front().adjoint() * x * basis.fourier.front()};
        return table;
    }
    // <phi_m(t)| X |phi_n(t)> has Fourier content in [-2 nu_max, 2 nu_max];
    // sampling at >= 4 nu_max + 1 points makes the transform exact.
    const int nu_out = 2 * basis.nu_max;
    const int ns = static_cast<int>(std::bit_ceil(static_cast<unsigned>(2 * nu_out + 1)));
    const std::vector<DenseOperator> states = synthesize_samples(basis.fourier, ns);
    std::vector<DenseOperator> products;
    products.reserve(states.size());
    for (const auto& phi : states) products.push_back(phi.adjoint() * x * phi);
    table.nu_max = nu_out;
    table.elements = fourier_coefficients(products, nu_out);
    return table;
}

Eigen::MatrixXd rate_matrix(const FloquetBasis& basis, const TransitionTable& table, const SpectralModel& s,
                            RateDiagnostics* diag) {
    const Eigen::Index d = basis.size();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    double total = 0.0, tail = 0.0;
    for (int nu = -table.nu_max; nu <= table.nu_max; ++nu) {
        const DenseOperator& x = table.at(nu);
        const bool in_tail = basis.driven && std::abs(nu) >= basis.nu_max;
        for (Eigen::Index k = 0; k < d; ++k)
            for (Eigen::Index n = 0; n < d; ++n) {
                if (n == k) continue;
                const double weight = std::norm(x(n, k));
                if (weight == 0.0) continue;
                // k -> n, emitted energy omega_{k,n,nu}
                const double rate = chi(transition_frequency(basis, k, n, nu), s) * weight;
                w(n, k) += rate;
                total += rate;
                if (in_tail) tail += rate;
            }
    }
    for (Eigen::Index k = 0; k < d; ++k) {
        double out = 0.0;
        for (Eigen::Index n = 0; n < d; ++n)
            if (n != k) out += w(n, k);
        w(k, k) = -out;
    }
    if (diag != nullptr) {
        diag->tail_fraction = total > 0 ? tail / total : 0.0;
        diag->tail_warning = diag->tail_fraction > 1e-6;
    }
    return w;
}

Eigen::MatrixXd rate_matrix(const FloquetBasis& basis, const std::vector<TransitionTable>& tables,
                            const SpectralModel& s, RateDiagnostics* diag) {
    const Eigen::Index d = basis.size();
    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(d, d);
    RateDiagnostics worst;
    for (const auto& table : tables) {
        RateDiagnostics one;
        w += rate_matrix(basis, table, s, &one);
        if (one.tail_fraction > worst.tail_fraction) worst = one;
    }
    if (diag != nullptr) *diag = worst;
    return w;
}

Eigen::MatrixXcd coherence_coeffs(const FloquetBasis& basis, const std::vector<TransitionTable>& tables,
                                  const SpectralModel& s) {
    const Eigen::Index d = basis.size();
    // total_out(m) = sum_{k,nu} [chi + i xi](omega_{m,k,nu}) |X_{k,m,nu}|^2
    Eigen::VectorXcd total_out = Eigen::VectorXcd::Zero(d);
    Eigen::MatrixXcd cross = Eigen::MatrixXcd::Zero(d, d);
    double max_weight = 0.0;
    for (const auto& table : tables)
        for (const auto& x : table.elements) max_weight = std::max(max_weight, x.cwiseAbs2().maxCoeff());
    const double xi_floor = 1e-14 * max_weight;

    for (const auto& table : tables) {
        for (int nu = -table.nu_max; nu <= table.nu_max; ++nu) {
            const DenseOperator& x = table.at(nu);
            for (Eigen::Index m = 0; m < d; ++m)
                for (Eigen::Index k = 0; k < d; ++k) {
                    const double weight = std::norm(x(k, m));
                    if (weight == 0.0) continue;
                    const double freq = transition_frequency(basis, m, k, nu);
                    double shift = 0.0;
                    if (s.lamb_shift && weight > xi_floor) shift = xi(freq, s);
                    total_out(m) += cplx(chi(freq, s), shift) * weight;
                }
            const double c0 = chi(nu * basis.omega_d, s);
            if (c0 == 0.0) continue;
            const Eigen::VectorXcd diag = x.diagonal();
            cross += c0 * (diag * diag.adjoint());
        }
    }
    Eigen::MatrixXcd z(d, d);
    for (Eigen::Index m = 0; m < d; ++m)
        for (Eigen::Index n = 0; n < d; ++n)
            z(m, n) = m == n ? cplx{} : 0.5 * (total_out(m) + std::conj(total_out(n))) - cross(m, n);
    return z;
}

DissipatorData assemble_dissipator(const FloquetBasis& basis, const std::vector<DenseOperator>& channels,
                                   const SpectralModel& s) {
    s.validate();
    DissipatorData out;
    out.tables.reserve(channels.size());
    for (const auto& x : channels) out.tables.push_back(transition_elements(basis, x));
    out.rates = rate_matrix(basis, out.tables, s, &out.diagnostics);
    out.coherence = coherence_coeffs(basis, out.tables, s);
    if (out.diagnostics.tail_warning)
        out.warnings.push_back("Fourier tail carries " + std::to_string(out.diagnostics.tail_fraction) +
                               " of the total rate; increase nu_max");
    if (basis.has_degeneracy())
        out.warnings.push_back("degenerate quasienergies present; secular rates applied in the rotated basis");
    double min_re = 0.0, max_re = 0.0;
    for (Eigen::Index m = 0; m < out.coherence.rows(); ++m)
        for (Eigen::Index n = 0; n < out.coherence.cols(); ++n) {
            if (m == n) continue;
            min_re = std::min(min_re, out.coherence(m, n).real());
            max_re = std::max(max_re, out.coherence(m, n).real());
        }
    if (min_re < -1e-10 * max_re) out.warnings.push_back("negative coherence decay rate Re Z = " + std::to_string(min_re));
    return out;
}

}  // namespace dicke
