// Tangent-space machinery on the fixed-rank manifold: generator-to-tangent
// maps, coherent/classical/lifting decomposition, monotone metrics, SLD
// solvers, Fisher information, fidelity, entropy and the Hamiltonian/gradient
// flow fields.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>

#include "qgeo/state.hpp"

namespace qgeo {

namespace detail {

// L with L rho + rho L = v on the support of rho: in the eigenbasis
// L_jk = v_jk / (lambda_j + lambda_k) whenever the denominator exceeds
// rank_tol, zero otherwise. Components on the (kernel, kernel) block must
// vanish for v to be a tangent; the caller decides how to police that.
inline Matrix sld_from_eigensystem(const EigenSystem& es, const Matrix& v, double rank_tol) {
    const Eigen::Index n = es.values.size();
    const Matrix vt = es.vectors.adjoint() * v * es.vectors;
    Matrix lt = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double denom = es.values(j) + es.values(k);
            if (denom > rank_tol) lt(j, k) = vt(j, k) / denom;
        }
    return hermitize(es.vectors * lt * es.vectors.adjoint());
}

}  // namespace detail

// rho_dot = -i (K rho - rho K^dag) + i Tr((K - K^dag) rho) rho.
inline TangentVector tangent_from_generator(const Matrix& k, const DensityOperator& rho) {
    if (k.rows() != rho.dim() || k.cols() != rho.dim())
        throw NumericsError("tangent_from_generator", "dimension mismatch");
    const Matrix& r = rho.matrix();
    const Complex i(0.0, 1.0);
    Matrix v = -i * (k * r - r * k.adjoint()) + i * ((k - k.adjoint()) * r).trace() * r;
    return TangentVector(rho, hermitize(v));
}

// rho_dot = -i [H, rho] - {Gamma, rho} + 2 Tr(Gamma rho) rho.
inline TangentVector tangent_from_H_Gamma(const NonHermitianGenerator& gen,
                                          const DensityOperator& rho) {
    if (gen.dim() != rho.dim())
        throw NumericsError("tangent_from_H_Gamma", "dimension mismatch");
    const Matrix& r = rho.matrix();
    Matrix v = Complex(0.0, -1.0) * commutator(gen.H(), r) - anticommutator(gen.Gamma(), r) +
               2.0 * real_inner(gen.Gamma(), r) * r;
    return TangentVector(rho, hermitize(v));
}

// Coherent / classical / lifting split of a tangent in the clustered
// eigenbasis of its base state. The three parts sum back to the input.
struct TangentSplit {
    TangentVector coherent;
    TangentVector classical;
    TangentVector lifting;
};

inline TangentSplit decompose_tangent(const TangentVector& v,
                                      double cluster_tol = kDefaultClusterTol) {
    const SpectralDecomposition sd = v.base().spectral(cluster_tol);
    const Eigen::Index n = v.base().dim();
    Matrix incoherent = Matrix::Zero(n, n);
    Matrix classical = Matrix::Zero(n, n);
    for (int k = 0; k < sd.clusters(); ++k) {
        const Matrix& p = sd.projectors[k];
        incoherent += p * v.matrix() * p;
        classical += (real_inner(p, v.matrix()) / sd.multiplicities[k]) * p;
    }
    Matrix coherent = v.matrix() - incoherent;
    Matrix lifting = incoherent - classical;
    return TangentSplit{TangentVector(v.base(), hermitize(coherent)),
                        TangentVector(v.base(), hermitize(classical)),
                        TangentVector(v.base(), hermitize(lifting))};
}

// Symmetric, order -1 homogeneous kernel c(lambda, mu) > 0 defining a
// monotone metric on the full-rank manifold. Custom kernels are validated on
// a sample grid at construction.
class MonotoneKernel {
public:
    MonotoneKernel(std::string name, std::function<double(double, double)> c)
        : name_(std::move(name)), c_(std::move(c)) {
        validate();
    }

    double operator()(double a, double b) const { return c_(a, b); }
    const std::string& name() const { return name_; }

    static const MonotoneKernel& bures() {
        static const MonotoneKernel k("bures", [](double a, double b) { return 2.0 / (a + b); });
        return k;
    }

    static const MonotoneKernel& right_log_derivative() {
        static const MonotoneKernel k(
            "right-log-derivative", [](double a, double b) { return (a + b) / (2.0 * a * b); });
        return k;
    }

private:
    void validate() const {
        const double grid[] = {0.05, 0.3, 1.0, 2.5};
        const double scales[] = {0.5, 2.0, 10.0};
        for (double a : grid)
            for (double b : grid) {
                const double cab = c_(a, b);
                if (!(cab > 0.0))
                    throw NumericsError("MonotoneKernel", "kernel not positive at sample point");
                if (std::abs(cab - c_(b, a)) > 1e-10 * std::abs(cab))
                    throw NumericsError("MonotoneKernel", "kernel not symmetric");
                for (double s : scales)
                    if (std::abs(c_(s * a, s * b) - cab / s) > 1e-10 * std::abs(cab / s))
                        throw NumericsError("MonotoneKernel",
                                            "kernel not homogeneous of order -1");
            }
    }

    std::string name_;
    std::function<double(double, double)> c_;
};

// Monotone-metric norm sqrt(sum_jk |v_jk|^2 c(lambda_j, lambda_k)) in the base
// eigenbasis. Defined on full-rank states only.
inline double monotone_norm(const TangentVector& v, const MonotoneKernel& kernel) {
    const DensityOperator& rho = v.base();
    if (!rho.full_rank())
        throw NumericsError("monotone_norm",
                            "rank-deficient base state; use bures_inner instead");
    const EigenSystem& es = rho.eigensystem();
    const Matrix vt = es.vectors.adjoint() * v.matrix() * es.vectors;
    double sum = 0.0;
    for (Eigen::Index j = 0; j < vt.rows(); ++j)
        for (Eigen::Index k = 0; k < vt.cols(); ++k)
            sum += std::norm(vt(j, k)) * kernel(es.values(j), es.values(k));
    return std::sqrt(sum);
}

// Inner product recovered from the norm through the polarization identity.
inline double monotone_inner(const TangentVector& v, const TangentVector& w,
                             const MonotoneKernel& kernel) {
    if (!same_base(v.base(), w.base()))
        throw NumericsError("monotone_inner", "mismatched base states");
    const TangentVector sum(v.base(), v.matrix() + w.matrix());
    const TangentVector diff(v.base(), v.matrix() - w.matrix());
    const double np = monotone_norm(sum, kernel);
    const double nm = monotone_norm(diff, kernel);
    return 0.25 * (np * np - nm * nm);
}

// Symmetric logarithmic derivative: Hermitian L with L rho + rho L = v on the
// support. Rejects inputs whose (kernel, kernel) components cannot be solved.
inline Matrix sld(const TangentVector& v) {
    const DensityOperator& rho = v.base();
    const Matrix l = detail::sld_from_eigensystem(rho.eigensystem(), v.matrix(), rho.rank_tol());
    const Matrix residual = l * rho.matrix() + rho.matrix() * l - v.matrix();
    if (max_abs(residual) > 1e-8 * std::max(1.0, max_abs(v.matrix())))
        throw NumericsError("sld", "not a tangent: unsolvable component off the support");
    return l;
}

// Extended Bures metric (v, w)_B = 1/2 Tr(L_v w).
inline double bures_inner(const TangentVector& v, const TangentVector& w) {
    if (!same_base(v.base(), w.base()))
        throw NumericsError("bures_inner", "mismatched base states");
    return 0.5 * (sld(v) * w.matrix()).trace().real();
}

inline double bures_norm(const TangentVector& v) {
    return std::sqrt(std::max(0.0, bures_inner(v, v)));
}

// L = i sum_jk ((lambda_j - lambda_k)/(lambda_j + lambda_k)) Pi_j H Pi_k,
// the SLD of the commutator tangent: L rho + rho L = -i [H, rho].
inline Matrix sld_of_hamiltonian(const Matrix& h, const DensityOperator& rho) {
    if (h.rows() != rho.dim() || h.cols() != rho.dim())
        throw NumericsError("sld_of_hamiltonian", "dimension mismatch");
    const EigenSystem& es = rho.eigensystem();
    const Eigen::Index n = rho.dim();
    const Matrix ht = es.vectors.adjoint() * h * es.vectors;
    Matrix lt = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j)
        for (Eigen::Index k = 0; k < n; ++k) {
            const double denom = es.values(j) + es.values(k);
            if (denom > rho.rank_tol())
                lt(j, k) = Complex(0.0, 1.0) * (es.values(j) - es.values(k)) / denom * ht(j, k);
        }
    return hermitize(es.vectors * lt * es.vectors.adjoint());
}

// Quantum Fisher information 4 Tr(L^2 rho) of the state with respect to H.
inline double qfi(const Matrix& h, const DensityOperator& rho) {
    const Matrix l = sld_of_hamiltonian(h, rho);
    return std::max(0.0, 4.0 * (l * l * rho.matrix()).trace().real());
}

struct FidelityAngle {
    double fidelity;  // Uhlmann fidelity in [0, 1]
    double angle;     // Bures angle arccos sqrt(F) in [0, pi/2]
};

inline FidelityAngle fidelity_and_angle(const DensityOperator& rho1,
                                        const DensityOperator& rho2) {
    if (rho1.dim() != rho2.dim())
        throw NumericsError("fidelity_and_angle", "dimension mismatch");
    const Matrix sq = psd_sqrt(rho1.matrix(), rho1.rank_tol());
    const EigenSystem es = hermitian_eigensystem(hermitize(sq * rho2.matrix() * sq));
    double root_sum = 0.0;
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        root_sum += std::sqrt(std::max(0.0, es.values(k)));
    const double f = std::min(1.0, root_sum * root_sum);
    return FidelityAngle{f, std::acos(std::sqrt(f))};
}

inline double trace_distance(const DensityOperator& rho1, const DensityOperator& rho2) {
    if (rho1.dim() != rho2.dim())
        throw NumericsError("trace_distance", "dimension mismatch");
    const EigenSystem es = hermitian_eigensystem(rho1.matrix() - rho2.matrix());
    return 0.5 * es.values.cwiseAbs().sum();
}

// -sum lambda log lambda over eigenvalues above rank_tol, natural log.
inline double von_neumann_entropy(const DensityOperator& rho) {
    const RealVector& vals = rho.eigensystem().values;
    double s = 0.0;
    for (Eigen::Index k = 0; k < vals.size(); ++k)
        if (vals(k) > rho.rank_tol()) s -= vals(k) * std::log(vals(k));
    return s;
}

// Rotation field -i[A, rho] and gradient field {A - <A>, rho} of the
// expectation value of A. The rotation preserves <A>; the two fields are
// Bures-orthogonal.
struct FlowFields {
    TangentVector rotation;
    TangentVector gradient;
};

inline FlowFields flow_fields(const Matrix& a, const DensityOperator& rho) {
    if (a.rows() != rho.dim() || a.cols() != rho.dim())
        throw NumericsError("flow_fields", "dimension mismatch");
    const Matrix& r = rho.matrix();
    const Matrix centered = a - real_inner(a, r) * Matrix::Identity(rho.dim(), rho.dim());
    Matrix rotation = Complex(0.0, -1.0) * commutator(a, r);
    Matrix gradient = anticommutator(centered, r);
    return FlowFields{TangentVector(rho, hermitize(rotation)),
                      TangentVector(rho, hermitize(gradient))};
}

}  // namespace qgeo
