// Deterministic random inputs for the property tests.

#pragma once

#include <random>
#include <vector>

#include "qgeo/qgeo.hpp"

namespace qgeo::testing {

using Rng = std::mt19937_64;

inline Matrix random_matrix(int rows, int cols, Rng& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Matrix m(rows, cols);
    for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) m(r, c) = Complex(gauss(rng), gauss(rng));
    return m;
}

inline Matrix random_hermitian(int n, Rng& rng) { return hermitize(random_matrix(n, n, rng)); }

inline Matrix random_unitary(int n, Rng& rng) {
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
    Matrix q = qr.householderQ();
    const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
    for (int k = 0; k < n; ++k) {
        const Complex d = r(k, k);
        if (std::abs(d) > 0.0) q.col(k) *= d / std::abs(d);
    }
    return q;
}

inline DensityOperator random_state(int n, Rng& rng, double rank_tol = kDefaultRankTol) {
    const Matrix a = random_matrix(n, n, rng);
    Matrix rho = a * a.adjoint();
    rho /= rho.trace().real();
    return DensityOperator(rho, rank_tol);
}

// State with exactly the given spectrum (entries summing to 1, descending not
// required), conjugated by a random unitary.
inline DensityOperator random_state_with_spectrum(const std::vector<double>& spectrum, Rng& rng,
                                                  double rank_tol = kDefaultRankTol) {
    const int n = static_cast<int>(spectrum.size());
    const Matrix u = random_unitary(n, rng);
    RealVector d(n);
    for (int k = 0; k < n; ++k) d(k) = spectrum[k];
    return DensityOperator(hermitize(u * d.asDiagonal() * u.adjoint()), rank_tol);
}

// Traceless Hermitian matrix; a tangent at any full-rank state.
inline Matrix random_traceless_hermitian(int n, Rng& rng) {
    Matrix m = random_hermitian(n, rng);
    m -= (m.trace() / static_cast<double>(n)) * Matrix::Identity(n, n);
    return m;
}

// Proper tangent to the fixed-rank manifold at rho, generated through the
// group action by a random K.
inline TangentVector random_tangent(const DensityOperator& rho, Rng& rng) {
    return tangent_from_generator(random_matrix(rho.dim(), rho.dim(), rng), rho);
}

inline NonHermitianGenerator random_generator(int n, Rng& rng) {
    return NonHermitianGenerator(random_hermitian(n, rng), random_hermitian(n, rng));
}

inline double max_abs_diff(const Matrix& a, const Matrix& b) { return max_abs(a - b); }

}  // namespace qgeo::testing
