// Time integration of the normalized non-Hermitian master equation with
// norm/decay-rate bookkeeping, success-rate optimization of generators, Bures
// speed and the two speed-limit bounds.

#pragma once

#include <cmath>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "qgeo/geometry.hpp"

namespace qgeo {

// Time-dependent generator K(t) = H(t) - i Gamma(t) on a horizon [t0, t1].
struct GeneratorSchedule {
    std::function<NonHermitianGenerator(double)> sampler;
    double t0 = 0.0;
    double t1 = 0.0;

    static GeneratorSchedule constant(NonHermitianGenerator gen, double t0, double t1) {
        return GeneratorSchedule{[g = std::move(gen)](double) { return g; }, t0, t1};
    }
};

struct IntegratorConfig {
    double dt = 1e-3;
    bool renormalize_each_step = true;
    double rank_tol = kDefaultRankTol;
    double cluster_tol = kDefaultClusterTol;
};

struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<DensityOperator> states;  // normalized
    std::vector<double> norms;            // Tr rho_tilde, un-normalized trace
    std::vector<double> decay_rates;      // gamma = 2 Tr(Gamma rho)
    std::vector<double> speeds;           // Bures speed

    std::size_t size() const { return times.size(); }
};

// Hook applied to the scheduled generator at every integrator stage; receives
// the (Hermitian, near-unit-trace) stage state.
using GeneratorTransform =
    std::function<NonHermitianGenerator(double, const NonHermitianGenerator&, const Matrix&)>;

inline double decay_rate(const NonHermitianGenerator& gen, const DensityOperator& rho) {
    if (gen.dim() != rho.dim()) throw NumericsError("decay_rate", "dimension mismatch");
    return 2.0 * real_inner(gen.Gamma(), rho.matrix());
}

// Gamma - mu_min * 1: shifts the spectrum so the smallest eigenvalue is zero.
inline Matrix shift_gamma_floor(const Matrix& gamma) {
    const EigenSystem es = hermitian_eigensystem(gamma);
    const double mu_min = es.values(es.values.size() - 1);
    return gamma - mu_min * Matrix::Identity(gamma.rows(), gamma.cols());
}

namespace detail {

struct OptimizedParts {
    Matrix h_opt;
    Matrix gamma_opt;
    double mu_c_min;
};

// Success-rate optimization in the clustered eigenbasis of rho:
//   Gamma_opt = sum_k Pi_k Gamma Pi_k - mu_c_min * 1,
//   H_opt     = H - i sum_{j != k} ((l_j + l_k)/(l_j - l_k)) Pi_k Gamma Pi_j,
// which generates the same tangent at rho with the smallest decay rate.
inline OptimizedParts optimize_generator_parts(const Matrix& h, const Matrix& gamma,
                                               const Matrix& rho, double cluster_tol) {
    const SpectralDecomposition sd = spectral_decompose(rho, cluster_tol);
    const Eigen::Index n = rho.rows();

    Matrix gamma_c = Matrix::Zero(n, n);
    for (int k = 0; k < sd.clusters(); ++k)
        gamma_c += sd.projectors[k] * gamma * sd.projectors[k];
    gamma_c = hermitize(gamma_c);

    Matrix h_prime = Matrix::Zero(n, n);
    for (int j = 0; j < sd.clusters(); ++j)
        for (int k = 0; k < sd.clusters(); ++k) {
            if (j == k) continue;
            const double gap = sd.eigenvalues[j] - sd.eigenvalues[k];
            if (std::abs(gap) <= cluster_tol)
                throw NumericsError("optimize_generator",
                                    "conditioning: distinct clusters closer than cluster_tol");
            h_prime += ((sd.eigenvalues[j] + sd.eigenvalues[k]) / gap) *
                       (sd.projectors[k] * gamma * sd.projectors[j]);
        }
    h_prime = hermitize(Complex(0.0, -1.0) * h_prime);

    const EigenSystem ec = hermitian_eigensystem(gamma_c);
    const double mu_c = ec.values(ec.values.size() - 1);
    return OptimizedParts{hermitize(h + h_prime),
                          gamma_c - mu_c * Matrix::Identity(n, n), mu_c};
}

inline Matrix master_tangent(const Matrix& h, const Matrix& gamma, const Matrix& rho) {
    return hermitize(Complex(0.0, -1.0) * commutator(h, rho) - anticommutator(gamma, rho) +
                     2.0 * real_inner(gamma, rho) * rho);
}

}  // namespace detail

// Generates the same tangent at rho as gen, with the anti-Hermitian part
// commuting with the state and the decay rate reduced by mu_c_min. Expects
// Gamma already floor-shifted when decay rates are to be compared.
inline NonHermitianGenerator optimize_generator(const NonHermitianGenerator& gen,
                                                const DensityOperator& rho,
                                                double cluster_tol = kDefaultClusterTol) {
    if (gen.dim() != rho.dim()) throw NumericsError("optimize_generator", "dimension mismatch");
    const auto parts =
        detail::optimize_generator_parts(gen.H(), gen.Gamma(), rho.matrix(), cluster_tol);
    return NonHermitianGenerator(parts.h_opt, parts.gamma_opt);
}

// Stage transform that re-applies the success-rate optimization at every
// integrator stage, using the instantaneous state.
inline GeneratorTransform optimizing_transform(double cluster_tol = kDefaultClusterTol) {
    return [cluster_tol](double, const NonHermitianGenerator& gen, const Matrix& rho) {
        const auto parts =
            detail::optimize_generator_parts(gen.H(), gen.Gamma(), rho, cluster_tol);
        return NonHermitianGenerator(parts.h_opt, parts.gamma_opt);
    };
}

// Bures speed sqrt(Tr((L - Gamma_c)^2 rho)) with L the SLD of -i[H, rho] and
// Gamma_c = Gamma - Tr(Gamma rho); the metric length of the generated tangent.
inline double bures_speed(const NonHermitianGenerator& gen, const DensityOperator& rho) {
    if (gen.dim() != rho.dim()) throw NumericsError("bures_speed", "dimension mismatch");
    const Matrix l = sld_of_hamiltonian(gen.H(), rho);
    const Matrix centered =
        gen.Gamma() - real_inner(gen.Gamma(), rho.matrix()) * Matrix::Identity(rho.dim(), rho.dim());
    const Matrix m = l - centered;
    return std::sqrt(std::max(0.0, (m * m * rho.matrix()).trace().real()));
}

// Pointwise upper bound on the Bures speed,
// sqrt(Var H + Var Gamma - i Tr([H, Gamma] rho)); the length of the plain
// (generally non-horizontal) lift of the tangent.
inline double weak_speed_bound(const NonHermitianGenerator& gen, const DensityOperator& rho) {
    const Matrix& r = rho.matrix();
    const double mh = real_inner(gen.H(), r);
    const double mg = real_inner(gen.Gamma(), r);
    const double var_h = (gen.H() * gen.H() * r).trace().real() - mh * mh;
    const double var_g = (gen.Gamma() * gen.Gamma() * r).trace().real() - mg * mg;
    const double cross =
        (Complex(0.0, -1.0) * (commutator(gen.H(), gen.Gamma()) * r).trace()).real();
    return std::sqrt(std::max(0.0, var_h + var_g + cross));
}

// || Pi (H - <H>) Pi || with Pi the support projector of rho; zero iff the
// weak bound is saturated.
inline double weak_bound_saturation_defect(const NonHermitianGenerator& gen,
                                           const DensityOperator& rho) {
    const EigenSystem& es = rho.eigensystem();
    Matrix support = Matrix::Zero(rho.dim(), rho.dim());
    for (Eigen::Index k = 0; k < es.values.size(); ++k)
        if (es.values(k) > rho.rank_tol())
            support += es.vectors.col(k) * es.vectors.col(k).adjoint();
    const Matrix centered =
        gen.H() - real_inner(gen.H(), rho.matrix()) * Matrix::Identity(rho.dim(), rho.dim());
    return max_abs(support * centered * support);
}

// Classical RK4 on the normalized master equation, integrating
// d(log Tr rho_tilde)/dt = -gamma alongside. The rank is monitored at every
// grid point; a retained eigenvalue falling below rank_tol/10 aborts with the
// offending time.
inline TrajectoryRecord evolve(const DensityOperator& rho0, const GeneratorSchedule& schedule,
                               const IntegratorConfig& config,
                               const GeneratorTransform& transform = {}) {
    if (!schedule.sampler) throw NumericsError("evolve", "schedule has no sampler");
    if (!(schedule.t1 > schedule.t0)) throw NumericsError("evolve", "horizon is empty");
    if (!(config.dt > 0.0)) throw NumericsError("evolve", "dt must be positive");

    const double span = schedule.t1 - schedule.t0;
    const long n_steps = std::max<long>(1, std::lround(span / config.dt));
    const double h = span / static_cast<double>(n_steps);
    const int rank0 = rho0.rank();

    const auto effective = [&](double t, const Matrix& rho) {
        NonHermitianGenerator gen = schedule.sampler(t);
        if (gen.dim() != rho0.dim())
            throw NumericsError("evolve", "schedule generator dimension mismatch");
        return transform ? transform(t, gen, rho) : gen;
    };

    struct Stage {
        Matrix drho;
        double dlog_norm;
    };
    const auto stage = [&](double t, const Matrix& rho) {
        const NonHermitianGenerator gen = effective(t, rho);
        return Stage{detail::master_tangent(gen.H(), gen.Gamma(), rho),
                     -2.0 * real_inner(gen.Gamma(), rho)};
    };

    TrajectoryRecord rec;
    rec.times.reserve(n_steps + 1);
    rec.states.reserve(n_steps + 1);
    rec.norms.reserve(n_steps + 1);
    rec.decay_rates.reserve(n_steps + 1);
    rec.speeds.reserve(n_steps + 1);

    Matrix rho = rho0.matrix();
    double log_norm = 0.0;

    for (long step = 0; step <= n_steps; ++step) {
        const double t = schedule.t0 + h * static_cast<double>(step);

        DensityOperator state = [&] {
            try {
                return DensityOperator(rho / real_trace(rho), config.rank_tol);
            } catch (const NumericsError& err) {
                throw NumericsError("evolve", std::string("invalid state at t=") +
                                                  std::to_string(t) + " (" + err.what() + ")");
            }
        }();
        if (state.rank() != rank0 ||
            state.eigensystem().values(rank0 - 1) < config.rank_tol / 10.0)
            throw NumericsError("evolve", "rank loss at t=" + std::to_string(t));

        const NonHermitianGenerator gen = effective(t, state.matrix());
        rec.times.push_back(t);
        rec.norms.push_back(std::exp(log_norm));
        rec.decay_rates.push_back(decay_rate(gen, state));
        rec.speeds.push_back(bures_speed(gen, state));
        rec.states.push_back(std::move(state));

        if (step == n_steps) break;

        const Stage k1 = stage(t, rho);
        const Stage k2 = stage(t + 0.5 * h, rho + 0.5 * h * k1.drho);
        const Stage k3 = stage(t + 0.5 * h, rho + 0.5 * h * k2.drho);
        const Stage k4 = stage(t + h, rho + h * k3.drho);

        rho = hermitize(rho + (h / 6.0) * (k1.drho + 2.0 * k2.drho + 2.0 * k3.drho + k4.drho));
        log_norm += (h / 6.0) * (k1.dlog_norm + 2.0 * k2.dlog_norm + 2.0 * k3.dlog_norm +
                                 k4.dlog_norm);
        if (config.renormalize_each_step) rho /= real_trace(rho);
    }
    return rec;
}

inline std::vector<NonHermitianGenerator> sample_generators(const GeneratorSchedule& schedule,
                                                            const std::vector<double>& times) {
    std::vector<NonHermitianGenerator> out;
    out.reserve(times.size());
    for (double t : times) out.push_back(schedule.sampler(t));
    return out;
}

struct SpeedLimitBounds {
    double qsl;
    double qsl_weak;
};

namespace detail {

inline double trapezoid_average(const std::vector<double>& times,
                                const std::vector<double>& values) {
    const double span = times.back() - times.front();
    double integral = 0.0;
    for (std::size_t i = 0; i + 1 < times.size(); ++i)
        integral += 0.5 * (values[i] + values[i + 1]) * (times[i + 1] - times[i]);
    return integral / span;
}

}  // namespace detail

// Quantum speed limits from the realized trajectory: the Bures-angle bound
// over the time-averaged speed, and the weaker bound with the averaged
// sqrt(Var H + Var Gamma - i Tr([H, Gamma] rho)) denominator.
inline SpeedLimitBounds speed_limit_bounds(const TrajectoryRecord& record,
                                           const std::vector<NonHermitianGenerator>& gen_log) {
    if (record.size() < 2)
        throw NumericsError("speed_limit_bounds", "record needs at least 2 points");
    if (gen_log.size() != record.size())
        throw NumericsError("speed_limit_bounds", "generator log size mismatch");

    const double angle =
        fidelity_and_angle(record.states.front(), record.states.back()).angle;
    const double avg_speed = detail::trapezoid_average(record.times, record.speeds);

    std::vector<double> weak(record.size());
    for (std::size_t i = 0; i < record.size(); ++i)
        weak[i] = weak_speed_bound(gen_log[i], record.states[i]);
    const double avg_weak = detail::trapezoid_average(record.times, weak);

    if (avg_speed <= 1e-14 || avg_weak <= 1e-14) return SpeedLimitBounds{0.0, 0.0};
    return SpeedLimitBounds{angle / avg_speed, angle / avg_weak};
}

}  // namespace qgeo
