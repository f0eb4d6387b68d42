// Shortcut-to-adiabaticity synthesis: the non-Hermitian generator that drives
// the Gibbs curve rho(t) = exp(-beta H0(t))/Z(t) exactly, combining the
// counterdiabatic Hamiltonian with a commuting decay part.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "qgeo/dynamics.hpp"

namespace qgeo {

// H0(t) with an optional analytic derivative; without one, dH0/dt is taken by
// centered finite differences with step 1e-6.
struct HamiltonianSchedule {
    std::function<Matrix(double)> value;
    std::function<Matrix(double)> derivative;
};

inline DensityOperator gibbs_state(const Matrix& h0, double beta,
                                   double rank_tol = kDefaultRankTol) {
    if (beta <= 0.0) throw NumericsError("gibbs_state", "beta must be positive");
    const EigenSystem es = hermitian_eigensystem(h0);
    const double e_min = es.values.minCoeff();
    RealVector weights(es.values.size());
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        weights(k) = std::exp(-beta * (es.values(k) - e_min));
    weights /= weights.sum();
    return DensityOperator(
        hermitize(es.vectors * weights.asDiagonal() * es.vectors.adjoint()), rank_tol);
}

// K(t) = (H0 + H1) - i Gamma at time t. H1 is the counterdiabatic term built
// from first-order eigenvector derivatives; Gamma is diagonal in the H0(t)
// eigenbasis (so it commutes with the Gibbs state) and floor-shifted to be
// PSD. Requires a nondegenerate spectrum at t.
inline NonHermitianGenerator sta_generator(const HamiltonianSchedule& h0, double beta, double t,
                                           double cluster_tol = kDefaultClusterTol) {
    if (!h0.value) throw NumericsError("sta_generator", "schedule has no value sampler");
    if (beta <= 0.0) throw NumericsError("sta_generator", "beta must be positive");

    const Matrix h = hermitize(h0.value(t));
    const Matrix hdot = [&] {
        if (h0.derivative) return hermitize(h0.derivative(t));
        const double fd = 1e-6;
        return hermitize((h0.value(t + fd) - h0.value(t - fd)) / (2.0 * fd));
    }();

    const EigenSystem es = hermitian_eigensystem(h);
    const Eigen::Index n = es.values.size();
    for (Eigen::Index j = 0; j + 1 < n; ++j)
        if (std::abs(es.values(j) - es.values(j + 1)) <= cluster_tol)
            throw NumericsError("sta_generator",
                                "degenerate spectrum at t=" + std::to_string(t));

    const Matrix hdot_eig = es.vectors.adjoint() * hdot * es.vectors;

    // Counterdiabatic term, gauge <E_k|dE_k/dt> = 0.
    Matrix h1_eig = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k)
            if (j != k)
                h1_eig(j, k) =
                    Complex(0.0, 1.0) * hdot_eig(j, k) / (es.values(k) - es.values(j));
    const Matrix h1 = hermitize(es.vectors * h1_eig * es.vectors.adjoint());

    const double e_min = es.values.minCoeff();
    RealVector populations(n);
    for (Eigen::Index k = 0; k < n; ++k)
        populations(k) = std::exp(-beta * (es.values(k) - e_min));
    populations /= populations.sum();

    double dlog_z = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
        dlog_z -= beta * hdot_eig(k, k).real() * populations(k);

    RealVector gamma_diag(n);
    for (Eigen::Index k = 0; k < n; ++k)
        gamma_diag(k) = 0.5 * beta * hdot_eig(k, k).real() + 0.5 * dlog_z;
    const Matrix gamma_raw =
        hermitize(es.vectors * gamma_diag.asDiagonal() * es.vectors.adjoint());

    return NonHermitianGenerator(h + h1, shift_gamma_floor(gamma_raw));
}

inline GeneratorSchedule sta_schedule(HamiltonianSchedule h0, double beta, double t0, double t1,
                                      double cluster_tol = kDefaultClusterTol) {
    return GeneratorSchedule{
        [h0 = std::move(h0), beta, cluster_tol](double t) {
            return sta_generator(h0, beta, t, cluster_tol);
        },
        t0, t1};
}

}  // namespace qgeo
