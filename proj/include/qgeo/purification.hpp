// Minimal purifications W (n x r, Tr(W W^dag) = 1, W^dag W invertible), fiber
// alignment via polar factorization, and the vertical/horizontal splitting of
// purified velocities.

#pragma once

#include <cmath>
#include <utility>

#include "qgeo/geometry.hpp"

namespace qgeo {

class Purification {
public:
    explicit Purification(Matrix w, double rank_tol = kDefaultRankTol)
        : rank_tol_(rank_tol) {
        if (w.rows() < w.cols() || w.cols() == 0)
            throw NumericsError("Purification", "W must be n x r with n >= r >= 1");
        if (rank_tol <= 0.0)
            throw NumericsError("Purification", "rank_tol must be positive");
        if (std::abs((w.adjoint() * w).trace().real() - 1.0) > kTraceTol)
            throw NumericsError("Purification", "Tr(W^dag W) differs from 1 beyond tolerance");
        const RealVector sv = singular_values(w);
        if (sv(sv.size() - 1) <= rank_tol)
            throw NumericsError("Purification",
                                "W^dag W not invertible: singular value at or below rank_tol");
        w_ = std::move(w);
    }

    const Matrix& matrix() const { return w_; }
    int dim() const { return static_cast<int>(w_.rows()); }
    int rank() const { return static_cast<int>(w_.cols()); }
    double rank_tol() const { return rank_tol_; }

    // The state this purification sits over: rho = W W^dag.
    DensityOperator project() const {
        return DensityOperator(hermitize(w_ * w_.adjoint()), rank_tol_);
    }

private:
    Matrix w_;
    double rank_tol_ = kDefaultRankTol;
};

// Minimal purification with columns sqrt(lambda_k) |lambda_k> in descending
// eigenvalue order; deterministic through the eigenvector phase convention.
inline Purification purify(const DensityOperator& rho) {
    const EigenSystem& es = rho.eigensystem();
    const int r = rho.rank();
    Matrix w(rho.dim(), r);
    for (int k = 0; k < r; ++k)
        w.col(k) = std::sqrt(es.values(k)) * es.vectors.col(k);
    w /= std::sqrt((w.adjoint() * w).trace().real());
    return Purification(std::move(w), rho.rank_tol());
}

struct AlignmentResult {
    Purification aligned;
    // Set when the overlap W1^dag W2 is rank deficient and the polar unitary
    // was fixed by the deterministic completion.
    bool overlap_rank_deficient;
};

// Gauge W2_raw -> W2_raw U^dag with W1^dag W2_raw = P U the polar
// factorization, so that W1^dag W2 >= 0 and the purification pair realizes
// the Bures angle.
inline AlignmentResult align(const Purification& w1, const Purification& w2_raw,
                             double overlap_tol = 1e-12) {
    if (w1.dim() != w2_raw.dim() || w1.rank() != w2_raw.rank())
        throw NumericsError("align", "purification shapes differ");
    const Matrix overlap = w1.matrix().adjoint() * w2_raw.matrix();
    const PolarFactors pf = polar_decompose(overlap);
    const RealVector sv = singular_values(overlap);
    const bool deficient = sv(sv.size() - 1) <= overlap_tol;

    Purification aligned(w2_raw.matrix() * pf.unitary_part.adjoint(), w2_raw.rank_tol());
    const EigenSystem check =
        hermitian_eigensystem(hermitize(w1.matrix().adjoint() * aligned.matrix()));
    if (check.values(check.values.size() - 1) < -1e-10)
        throw NumericsError("align", "aligned overlap not positive semidefinite");
    return AlignmentResult{std::move(aligned), deficient};
}

// Wdot = W A (A anti-Hermitian) plus L W (L Hermitian, Tr(L rho) = 0); the
// two parts are orthogonal in the real-trace metric.
struct SplitTangent {
    Matrix vertical;
    Matrix horizontal;
};

inline SplitTangent split_tangent(const Matrix& wdot, const Purification& w) {
    if (wdot.rows() != w.dim() || wdot.cols() != w.rank())
        throw NumericsError("split_tangent", "Wdot shape differs from W");
    if (std::abs(real_inner(w.matrix(), wdot)) > 1e-8)
        throw NumericsError("split_tangent",
                            "not tangent to the unit sphere: Re Tr(W^dag Wdot) != 0");

    const Matrix rho = hermitize(w.matrix() * w.matrix().adjoint());
    const EigenSystem es = hermitian_eigensystem(rho);
    const Matrix rho_dot = wdot * w.matrix().adjoint() + w.matrix() * wdot.adjoint();
    const Matrix l = detail::sld_from_eigensystem(es, rho_dot, w.rank_tol());

    SplitTangent out;
    out.horizontal = l * w.matrix();
    out.vertical = wdot - out.horizontal;

    // The vertical part must be W A with A anti-Hermitian.
    const Matrix a = pseudo_inverse(w.matrix(), w.rank_tol()) * out.vertical;
    const double scale = std::max(1.0, max_abs(wdot));
    if (max_abs(w.matrix() * a - out.vertical) > 1e-8 * scale ||
        max_abs(a + a.adjoint()) > 2e-9 * scale)
        throw NumericsError("split_tangent", "not a purification tangent");
    return out;
}

struct LiftedVelocity {
    Matrix wdot;    // -i H W - (Gamma - <Gamma>) W
    Matrix wdot_h;  // horizontal part (L - (Gamma - <Gamma>)) W
};

// Lift of the master-equation velocity to the purification space and its
// horizontal part; both project to the same state tangent.
inline LiftedVelocity lift_generator(const NonHermitianGenerator& gen, const Purification& w) {
    if (gen.dim() != w.dim()) throw NumericsError("lift_generator", "dimension mismatch");
    const DensityOperator rho = w.project();
    const Matrix centered =
        gen.Gamma() - real_inner(gen.Gamma(), rho.matrix()) * Matrix::Identity(w.dim(), w.dim());
    const Matrix l = sld_of_hamiltonian(gen.H(), rho);
    LiftedVelocity out;
    out.wdot = Complex(0.0, -1.0) * gen.H() * w.matrix() - centered * w.matrix();
    out.wdot_h = (l - centered) * w.matrix();
    return out;
}

// Euclidean metric on purification tangents, 1/2 Tr(A^dag B + B^dag A).
inline double purification_inner(const Matrix& a, const Matrix& b) {
    return real_inner(a, b);
}

}  // namespace qgeo
