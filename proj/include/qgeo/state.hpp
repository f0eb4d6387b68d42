// Density operators on a fixed-rank manifold, tangent vectors attached to
// them, and non-Hermitian generators K = H - i Gamma.

#pragma once

#include <cmath>
#include <utility>

#include "qgeo/linalg.hpp"

namespace qgeo {

inline constexpr double kDefaultRankTol = 1e-10;
inline constexpr double kDefaultClusterTol = 1e-8;
inline constexpr double kHermitianTol = 1e-10;
inline constexpr double kTraceTol = 1e-10;

// Hermitian, positive-semidefinite, unit-trace matrix with tracked rank.
// Validation is eager; the eigensystem is computed once at construction and
// shared by every metric and decomposition routine.
class DensityOperator {
public:
    explicit DensityOperator(Matrix m, double rank_tol = kDefaultRankTol)
        : rank_tol_(rank_tol) {
        if (m.rows() != m.cols() || m.rows() == 0)
            throw NumericsError("DensityOperator", "matrix must be square and nonempty");
        if (rank_tol <= 0.0)
            throw NumericsError("DensityOperator", "rank_tol must be positive");
        if (hermiticity_defect(m) > kHermitianTol)
            throw NumericsError("DensityOperator", "symmetry violation: not Hermitian");
        mat_ = hermitize(std::move(m));
        if (std::abs(real_trace(mat_) - 1.0) > kTraceTol)
            throw NumericsError("DensityOperator", "trace differs from 1 beyond tolerance");
        eig_ = hermitian_eigensystem(mat_);
        const Eigen::Index n = mat_.rows();
        if (eig_.values(n - 1) < -rank_tol_)
            throw NumericsError("DensityOperator", "negativity: eigenvalue below -rank_tol");
        rank_ = 0;
        for (Eigen::Index k = 0; k < n; ++k)
            if (eig_.values(k) > rank_tol_) ++rank_;
        if (rank_ == 0)
            throw NumericsError("DensityOperator", "all eigenvalues below rank_tol");
    }

    const Matrix& matrix() const { return mat_; }
    int dim() const { return static_cast<int>(mat_.rows()); }
    int rank() const { return rank_; }
    double rank_tol() const { return rank_tol_; }
    bool full_rank() const { return rank_ == dim(); }

    // Unclustered eigensystem, descending, deterministic phases.
    const EigenSystem& eigensystem() const { return eig_; }

    double smallest_retained_eigenvalue() const { return eig_.values(rank_ - 1); }

    // Distinct-eigenvalue clusters and their projectors.
    SpectralDecomposition spectral(double cluster_tol = kDefaultClusterTol) const {
        return spectral_decompose(mat_, cluster_tol);
    }

private:
    Matrix mat_;
    EigenSystem eig_;
    int rank_ = 0;
    double rank_tol_ = kDefaultRankTol;
};

inline bool same_base(const DensityOperator& a, const DensityOperator& b, double tol = 1e-12) {
    return a.dim() == b.dim() && max_abs(a.matrix() - b.matrix()) <= tol;
}

// Traceless Hermitian matrix attached to a base state; units 1/time.
class TangentVector {
public:
    TangentVector(DensityOperator base, Matrix m) : base_(std::move(base)) {
        if (m.rows() != base_.dim() || m.cols() != base_.dim())
            throw NumericsError("TangentVector", "dimension mismatch with base state");
        if (hermiticity_defect(m) > kHermitianTol)
            throw NumericsError("TangentVector", "symmetry violation: not Hermitian");
        mat_ = hermitize(std::move(m));
        if (std::abs(real_trace(mat_)) > kTraceTol)
            throw NumericsError("TangentVector", "trace exceeds tolerance: not tangent to the unit-trace manifold");
    }

    const DensityOperator& base() const { return base_; }
    const Matrix& matrix() const { return mat_; }

private:
    DensityOperator base_;
    Matrix mat_;
};

// K = H - i Gamma with H, Gamma Hermitian; H in energy units (hbar = 1),
// Gamma in 1/time.
class NonHermitianGenerator {
public:
    NonHermitianGenerator(Matrix h, Matrix gamma) {
        if (h.rows() != h.cols() || gamma.rows() != gamma.cols() || h.rows() != gamma.rows())
            throw NumericsError("NonHermitianGenerator", "H and Gamma must be square with equal dims");
        if (hermiticity_defect(h) > kHermitianTol)
            throw NumericsError("NonHermitianGenerator", "symmetry violation in H");
        if (hermiticity_defect(gamma) > kHermitianTol)
            throw NumericsError("NonHermitianGenerator", "symmetry violation in Gamma");
        h_ = hermitize(std::move(h));
        gamma_ = hermitize(std::move(gamma));
    }

    static NonHermitianGenerator from_K(const Matrix& k) {
        if (k.rows() != k.cols())
            throw NumericsError("NonHermitianGenerator", "K must be square");
        return NonHermitianGenerator(0.5 * (k + k.adjoint()),
                                     (k.adjoint() - k) / Complex(0.0, 2.0));
    }

    const Matrix& H() const { return h_; }
    const Matrix& Gamma() const { return gamma_; }
    int dim() const { return static_cast<int>(h_.rows()); }

    Matrix K() const { return h_ - Complex(0.0, 1.0) * gamma_; }

private:
    Matrix h_;
    Matrix gamma_;
};

}  // namespace qgeo
