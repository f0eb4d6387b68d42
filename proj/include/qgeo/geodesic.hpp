// Shortest Bures geodesics through purification space: the transport operator
// M, the arc W(tau), the evolution operator G_g(tau) and its generator
// K_g(tau), the two-eigenvalue test for time-independent shortest-form
// generators, and the qubit ellipse invariant.

#pragma once

#include <cmath>
#include <utility>
#include <vector>

#include <Eigen/Eigenvalues>

#include "qgeo/dynamics.hpp"
#include "qgeo/purification.hpp"

namespace qgeo {

// Maps the initial purification onto the final one, M W1 = W2. On the
// complement of supp(W1) the freedom is fixed as in the full derivation:
// adjoint corner block plus +i R with R = r_scale (1 - Pi1), which keeps the
// spectrum of M away from the closed negative real axis and G_g invertible.
inline Matrix transport_operator(const Purification& w1, const Purification& w2,
                                 double r_scale) {
    if (w1.dim() != w2.dim() || w1.rank() != w2.rank())
        throw NumericsError("transport_operator", "purification shapes differ");
    if (r_scale <= 0.0) throw NumericsError("transport_operator", "R_scale must be positive");
    const Eigen::Index n = w1.dim();
    const Matrix w1_pinv = pseudo_inverse(w1.matrix(), w1.rank_tol());
    const Matrix t = w2.matrix() * w1_pinv;
    const Matrix co_support = Matrix::Identity(n, n) - w1.matrix() * w1_pinv;
    const Matrix m = t + t.adjoint() * co_support + Complex(0.0, r_scale) * co_support;
    if (max_abs(m * w1.matrix() - w2.matrix()) > 1e-10 * std::max(1.0, max_abs(w2.matrix())))
        throw NumericsError("transport_operator", "M W1 = W2 violated beyond tolerance");
    return m;
}

// Aligned endpoint purifications, Bures angle and transport operator of the
// shortest geodesic between two same-rank states.
struct GeodesicPlan {
    Purification W1;
    Purification W2;
    double theta;
    Matrix M;
    double R_scale;
};

inline GeodesicPlan make_geodesic_plan(const DensityOperator& rho1, const DensityOperator& rho2,
                                       double r_scale = 1.0) {
    if (rho1.dim() != rho2.dim())
        throw NumericsError("make_geodesic_plan", "dimension mismatch");
    if (rho1.rank() != rho2.rank())
        throw NumericsError("make_geodesic_plan",
                            "states live on different fixed-rank manifolds");
    Purification w1 = purify(rho1);
    AlignmentResult ar = align(w1, purify(rho2));
    const double overlap = real_inner(w1.matrix(), ar.aligned.matrix());
    if (overlap >= 1.0 - 1e-12)
        throw NumericsError("make_geodesic_plan",
                            "theta = 0: endpoint states coincide; no plan needed");
    const double theta = std::acos(std::clamp(overlap, -1.0, 1.0));
    Matrix m = transport_operator(w1, ar.aligned, r_scale);

    // App-level invertibility guarantee: no eigenvalue of M on the closed
    // negative real axis.
    Eigen::ComplexEigenSolver<Matrix> solver(m);
    if (solver.info() != Eigen::Success)
        throw NumericsError("make_geodesic_plan", "eigensolver failed on M");
    const double scale = std::max(1.0, solver.eigenvalues().cwiseAbs().maxCoeff());
    for (Eigen::Index k = 0; k < solver.eigenvalues().size(); ++k) {
        const Complex mu = solver.eigenvalues()(k);
        if (std::abs(mu.imag()) <= 1e-12 * scale && mu.real() <= 1e-12 * scale)
            throw NumericsError("make_geodesic_plan",
                                "M has a real-negative or zero eigenvalue");
    }
    return GeodesicPlan{std::move(w1), std::move(ar.aligned), theta, std::move(m), r_scale};
}

struct GeodesicPoint {
    Purification W;
    DensityOperator rho;
};

// W(tau) = (sin(theta - tau) W1 + sin(tau) W2) / sin(theta), unit speed.
inline GeodesicPoint geodesic_path(const GeodesicPlan& plan, double tau) {
    if (tau < -1e-12 || tau > plan.theta + 1e-12)
        throw NumericsError("geodesic_path", "tau outside [0, theta]");
    const double s = std::sin(plan.theta);
    Matrix w = (std::sin(plan.theta - tau) * plan.W1.matrix() +
                std::sin(tau) * plan.W2.matrix()) /
               s;
    Purification p(std::move(w), plan.W1.rank_tol());
    DensityOperator rho = p.project();
    return GeodesicPoint{std::move(p), std::move(rho)};
}

// G_g(tau) = (sin(theta - tau) 1 + sin(tau) M) / sin(theta).
inline Matrix geodesic_operator(const GeodesicPlan& plan, double tau) {
    const Eigen::Index n = plan.W1.dim();
    return (std::sin(plan.theta - tau) * Matrix::Identity(n, n) + std::sin(tau) * plan.M) /
           std::sin(plan.theta);
}

// K_g(tau) = i (dG_g/dtau) G_g^{-1}; anti-Hermitian for full-rank endpoints.
inline Matrix geodesic_generator(const GeodesicPlan& plan, double tau) {
    if (tau < -1e-12 || tau > plan.theta + 1e-12)
        throw NumericsError("geodesic_generator", "tau outside [0, theta]");
    const Eigen::Index n = plan.W1.dim();
    const Matrix g = geodesic_operator(plan, tau);
    const RealVector sv = singular_values(g);
    if (sv(sv.size() - 1) <= 1e-12 * std::max(1.0, sv(0)))
        throw NumericsError("geodesic_generator",
                            "G_g(tau) singular beyond tolerance at the boundary");
    const Matrix g_prime = (-std::cos(plan.theta - tau) * Matrix::Identity(n, n) +
                            std::cos(tau) * plan.M) /
                           std::sin(plan.theta);
    return Complex(0.0, 1.0) * g_prime * g.partialPivLu().solve(Matrix::Identity(n, n));
}

// K_g(t) as a schedule over [0, theta] for the master-equation integrator.
// With floor_shift_gamma the anti-Hermitian part is shifted to smallest
// eigenvalue zero at each time, which changes norms but not the normalized
// trajectory.
inline GeneratorSchedule geodesic_schedule(const GeodesicPlan& plan,
                                           bool floor_shift_gamma = false) {
    return GeneratorSchedule{
        [plan, floor_shift_gamma](double t) {
            NonHermitianGenerator gen =
                NonHermitianGenerator::from_K(geodesic_generator(plan, t));
            if (floor_shift_gamma)
                gen = NonHermitianGenerator(gen.H(), shift_gamma_floor(gen.Gamma()));
            return gen;
        },
        0.0, plan.theta};
}

enum class ShortestFormVerdict { exists_shortest_form, fails };

struct TimeIndependenceCheck {
    ShortestFormVerdict verdict;
    int distinct_eigenvalues;
};

// Tests whether K admits a shift c 1 and a real rescaling bringing it to a
// generator with (K')^2 = -1 and spectrum {i, -i}: exactly two distinct
// eigenvalues whose difference is purely imaginary, with quadratic minimal
// polynomial. Affine maps preserve the distinct-eigenvalue count, so more
// than two distinct values can never be repaired.
inline TimeIndependenceCheck time_independent_check(const Matrix& k, double tol = 1e-9) {
    if (k.rows() != k.cols())
        throw NumericsError("time_independent_check", "K must be square");
    Eigen::ComplexEigenSolver<Matrix> solver(k);
    if (solver.info() != Eigen::Success)
        throw NumericsError("time_independent_check", "eigensolver failed");
    const double scale = std::max(1.0, max_abs(k));

    std::vector<Complex> distinct;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const Complex mu = solver.eigenvalues()(i);
        bool found = false;
        for (const Complex& d : distinct)
            if (std::abs(mu - d) <= tol * scale) {
                found = true;
                break;
            }
        if (!found) distinct.push_back(mu);
    }
    const int count = static_cast<int>(distinct.size());
    if (count != 2) return TimeIndependenceCheck{ShortestFormVerdict::fails, count};

    const Complex shift = 0.5 * (distinct[0] + distinct[1]);
    const Complex half_gap = 0.5 * (distinct[0] - distinct[1]);
    const Matrix shifted = k - shift * Matrix::Identity(k.rows(), k.cols());
    const Matrix quad_residual =
        shifted * shifted - (half_gap * half_gap) * Matrix::Identity(k.rows(), k.cols());
    const bool quadratic = max_abs(quad_residual) <= tol * scale * scale;
    const bool imaginary_pair = std::abs(half_gap.real()) <= tol * std::max(1.0, std::abs(half_gap));
    return TimeIndependenceCheck{quadratic && imaginary_pair
                                     ? ShortestFormVerdict::exists_shortest_form
                                     : ShortestFormVerdict::fails,
                                 count};
}

// Bloch frame for the ellipse invariant; axes must be Hermitian 2x2.
struct BlochFrame {
    Matrix x_axis;
    Matrix z_axis;

    static BlochFrame standard() {
        Matrix sx(2, 2), sz(2, 2);
        sx << 0, 1, 1, 0;
        sz << 1, 0, 0, -1;
        return BlochFrame{sx, sz};
    }
};

// a = x^2 / (1 - z^2) with Bloch coordinates from Pauli expectations in the
// supplied frame; constant along any K = i sigma_z flow in that frame.
inline double qubit_ellipse_invariant(const DensityOperator& rho,
                                      const BlochFrame& frame = BlochFrame::standard()) {
    if (rho.dim() != 2)
        throw NumericsError("qubit_ellipse_invariant", "state is not a qubit");
    if (!is_hermitian(frame.x_axis) || !is_hermitian(frame.z_axis) ||
        frame.x_axis.rows() != 2 || frame.z_axis.rows() != 2)
        throw NumericsError("qubit_ellipse_invariant", "frame axes must be Hermitian 2x2");
    const double x = real_inner(frame.x_axis, rho.matrix());
    const double z = real_inner(frame.z_axis, rho.matrix());
    if (1.0 - z * z <= 1e-12)
        throw NumericsError("qubit_ellipse_invariant",
                            "singular frame: state at a pole (|z| = 1)");
    return x * x / (1.0 - z * z);
}

}  // namespace qgeo
