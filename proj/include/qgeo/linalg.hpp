// Complex-matrix primitives shared by the whole library: clustered Hermitian
// eigendecomposition, PSD square root, Moore-Penrose pseudoinverse and polar
// factorization.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "qgeo/errors.hpp"

namespace qgeo {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline double max_abs(const Matrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().maxCoeff();
}

inline Matrix hermitize(const Matrix& a) { return 0.5 * (a + a.adjoint()); }

// Hermiticity violation relative to the matrix scale (floored at 1).
inline double hermiticity_defect(const Matrix& a) {
    return 0.5 * max_abs(a - a.adjoint()) / std::max(1.0, max_abs(a));
}

inline bool is_hermitian(const Matrix& a, double tol = 1e-10) {
    return a.rows() == a.cols() && hermiticity_defect(a) <= tol;
}

inline Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }
inline Matrix anticommutator(const Matrix& a, const Matrix& b) { return a * b + b * a; }

inline double real_trace(const Matrix& a) { return a.trace().real(); }

// Re Tr(A^dag B), the Euclidean inner product on matrices seen as a real
// vector space.
inline double real_inner(const Matrix& a, const Matrix& b) {
    return (a.adjoint() * b).trace().real();
}

inline double frobenius_norm(const Matrix& a) { return a.norm(); }

// Hermitian eigensystem sorted by descending eigenvalue, with each
// eigenvector's largest-magnitude entry made real and positive so repeated
// runs produce identical bases.
struct EigenSystem {
    RealVector values;  // descending
    Matrix vectors;     // columns
};

inline EigenSystem hermitian_eigensystem(const Matrix& a, double herm_tol = 1e-9) {
    if (a.rows() != a.cols())
        throw NumericsError("hermitian_eigensystem", "matrix is not square");
    if (hermiticity_defect(a) > herm_tol)
        throw NumericsError("hermitian_eigensystem",
                            "symmetry violation: |A - A^dag|/2 exceeds tolerance");
    Eigen::SelfAdjointEigenSolver<Matrix> solver(hermitize(a));
    if (solver.info() != Eigen::Success)
        throw NumericsError("hermitian_eigensystem", "eigensolver failed to converge");

    const Eigen::Index n = a.rows();
    EigenSystem out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = solver.eigenvalues()(n - 1 - k);
        CVector v = solver.eigenvectors().col(n - 1 - k);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        const Complex pivot = v(imax);
        if (std::abs(pivot) > 0.0) v *= std::conj(pivot) / std::abs(pivot);
        out.vectors.col(k) = v;
    }
    return out;
}

// Spectral decomposition with eigenvalues merged into distinct clusters.
// Single-linkage merging on the sorted spectrum: a gap wider than cluster_tol
// starts a new cluster; the cluster eigenvalue is the mean of its members.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;  // distinct, descending
    std::vector<Matrix> projectors;   // Hermitian idempotents, sum = identity
    std::vector<int> multiplicities;

    int clusters() const { return static_cast<int>(eigenvalues.size()); }
};

inline SpectralDecomposition spectral_decompose(const Matrix& a, double cluster_tol = 1e-8) {
    if (cluster_tol <= 0.0)
        throw NumericsError("spectral_decompose", "cluster_tol must be positive");
    const EigenSystem es = hermitian_eigensystem(a);
    const Eigen::Index n = a.rows();

    SpectralDecomposition out;
    Eigen::Index k = 0;
    while (k < n) {
        Eigen::Index end = k + 1;
        while (end < n && es.values(end - 1) - es.values(end) <= cluster_tol) ++end;
        double mean = 0.0;
        Matrix proj = Matrix::Zero(n, n);
        for (Eigen::Index j = k; j < end; ++j) {
            mean += es.values(j);
            proj += es.vectors.col(j) * es.vectors.col(j).adjoint();
        }
        out.eigenvalues.push_back(mean / static_cast<double>(end - k));
        out.projectors.push_back(hermitize(proj));
        out.multiplicities.push_back(static_cast<int>(end - k));
        k = end;
    }
    return out;
}

// Square root of a positive semidefinite Hermitian matrix. Eigenvalues in
// [-tol, 0) are treated as zero; anything below -tol is rejected.
inline Matrix psd_sqrt(const Matrix& a, double tol = 1e-10) {
    const EigenSystem es = hermitian_eigensystem(a);
    if (es.values.size() > 0 && es.values(es.values.size() - 1) < -tol)
        throw NumericsError("psd_sqrt", "negativity: eigenvalue below -tol");
    RealVector roots = es.values.cwiseMax(0.0).cwiseSqrt();
    return hermitize(es.vectors * roots.asDiagonal() * es.vectors.adjoint());
}

// Moore-Penrose pseudoinverse; singular values at or below rank_tol are
// treated as zero.
inline Matrix pseudo_inverse(const Matrix& w, double rank_tol = 1e-12) {
    if (rank_tol <= 0.0)
        throw NumericsError("pseudo_inverse", "rank_tol must be positive");
    Eigen::JacobiSVD<Matrix> svd(w, Eigen::ComputeThinU | Eigen::ComputeThinV);
    RealVector inv = svd.singularValues();
    for (Eigen::Index i = 0; i < inv.size(); ++i)
        inv(i) = inv(i) > rank_tol ? 1.0 / inv(i) : 0.0;
    return svd.matrixV() * inv.asDiagonal() * svd.matrixU().adjoint();
}

// Left polar factorization A = P U with P = sqrt(A A^dag) >= 0 and U unitary.
// For singular A the unitary is completed through the SVD pairing of left and
// right singular vectors, which is deterministic and reduces to the identity
// on the cokernel for PSD inputs.
struct PolarFactors {
    Matrix positive_part;  // P
    Matrix unitary_part;   // U
};

inline PolarFactors polar_decompose(const Matrix& a) {
    if (a.rows() != a.cols())
        throw NumericsError("polar_decompose", "matrix is not square");
    Eigen::JacobiSVD<Matrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
    PolarFactors out;
    out.positive_part = hermitize(svd.matrixU() * svd.singularValues().asDiagonal() *
                                  svd.matrixU().adjoint());
    out.unitary_part = svd.matrixU() * svd.matrixV().adjoint();
    return out;
}

inline RealVector singular_values(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    return svd.singularValues();
}

}  // namespace qgeo
