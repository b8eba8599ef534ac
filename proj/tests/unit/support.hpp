#pragma once

#include <random>

#include "dicke/model.hpp"

namespace testing {

inline Eigen::MatrixXcd gaussian_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
    std::normal_distribution<double> n(0.0, 1.0);
    Eigen::MatrixXcd m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i) {
            const double re = n(rng);
            m(i, j) = {re, n(rng)};
        }
    return m;
}

inline Eigen::MatrixXcd random_density(Eigen::Index dim, std::mt19937_64& rng) {
    const Eigen::MatrixXcd g = gaussian_matrix(dim, dim, rng);
    Eigen::MatrixXcd rho = g * g.adjoint();
    rho /= rho.trace();
    return 0.5 * (rho + rho.adjoint());
}

inline Eigen::MatrixXcd random_pure(Eigen::Index dim, std::mt19937_64& rng) {
    Eigen::VectorXcd v = gaussian_matrix(dim, 1, rng).col(0);
    v.normalize();
    return v * v.adjoint();
}

inline Eigen::MatrixXcd random_unitary(Eigen::Index dim, std::mt19937_64& rng) {
    Eigen::HouseholderQR<Eigen::MatrixXcd> qr(gaussian_matrix(dim, dim, rng));
    return qr.householderQ();
}

inline Eigen::MatrixXcd random_hermitian(Eigen::Index dim, std::mt19937_64& rng) {
    const Eigen::MatrixXcd g = gaussian_matrix(dim, dim, rng);
    return 0.5 * (g + g.adjoint());
}

inline double max_abs(const Eigen::MatrixXcd& m) { return m.size() == 0 ? 0.0 : m.cwiseAbs().maxCoeff(); }

}  // namespace testing
