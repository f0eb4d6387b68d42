#include <catch_amalgamated.hpp>

#include "helpers.hpp"

using namespace qgeo;
using namespace qgeo::testing;

namespace {

DensityOperator reference_rho1() {
    Matrix m(2, 2);
    m << 0.6, 0, 0, 0.4;
    return DensityOperator(m);
}

DensityOperator reference_rho2() {
    Matrix m(2, 2);
    m << 0.25, -0.25, -0.25, 0.75;
    return DensityOperator(m);
}

DensityOperator qutrit_rho1() {
    Matrix m = Matrix::Zero(3, 3);
    m.diagonal() << 0.2, 0.4, 0.4;
    return DensityOperator(m);
}

DensityOperator qutrit_rho2() {
    Matrix m = Matrix::Zero(3, 3);
    m.diagonal() << 0.2, 0.3, 0.5;
    return DensityOperator(m);
}

DensityOperator pure_state(const CVector& psi, double rank_tol = kDefaultRankTol) {
    Matrix proj = psi * psi.adjoint();
    proj /= proj.trace().real();
    return DensityOperator(proj, rank_tol);
}

// Tangent to the unit sphere in purification space at W.
Matrix random_sphere_tangent(const Purification& w, Rng& rng) {
    Matrix x = random_matrix(w.dim(), w.rank(), rng);
    return x - real_inner(w.matrix(), x) * w.matrix();
}

Matrix projected_tangent(const Matrix& wdot, const Purification& w) {
    return wdot * w.matrix().adjoint() + w.matrix() * wdot.adjoint();
}

}  // namespace

TEST_CASE("purify of a pure state is its single column") {
    Rng rng(401);
    CVector psi = random_matrix(3, 1, rng).col(0);
    psi /= psi.norm();
    const DensityOperator rho = pure_state(psi);
    const Purification w = purify(rho);
    REQUIRE(w.rank() == 1);
    CHECK(max_abs_diff(w.matrix() * w.matrix().adjoint(), rho.matrix()) < 1e-12);
}

TEST_CASE("purify reconstructs the state") {
    Rng rng(402);
    const DensityOperator full = random_state(4, rng);
    const Purification wf = purify(full);
    REQUIRE(wf.rank() == 4);
    CHECK(max_abs_diff(wf.matrix() * wf.matrix().adjoint(), full.matrix()) < 1e-12);

    const DensityOperator low = random_state_with_spectrum({0.7, 0.3, 0.0}, rng);
    const Purification wl = purify(low);
    REQUIRE(wl.rank() == 2);
    CHECK(wl.dim() == 3);
    CHECK((wl.matrix().adjoint() * wl.matrix()).trace().real() ==
          Catch::Approx(1.0).margin(1e-12));
    CHECK(max_abs_diff(wl.matrix() * wl.matrix().adjoint(), low.matrix()) < 1e-10);
}

TEST_CASE("purification validation") {
    Rng rng(403);
    REQUIRE_THROWS_WITH(Purification(Matrix(2.0 * Matrix::Identity(2, 2))),
                        Catch::Matchers::ContainsSubstring("Tr"));
    Matrix collapsed(2, 2);
    collapsed << 1.0, 0.0, 0.0, 0.0;
    REQUIRE_THROWS_WITH(Purification(collapsed),
                        Catch::Matchers::ContainsSubstring("invertible"));
}

TEST_CASE("align is a no-op on already aligned purifications") {
    Rng rng(404);
    const DensityOperator rho1 = random_state(3, rng);
    const DensityOperator rho2 = random_state(3, rng);
    const Purification w1 = purify(rho1);
    const AlignmentResult first = align(w1, purify(rho2));
    const AlignmentResult second = align(w1, first.aligned);
    CHECK(max_abs_diff(second.aligned.matrix(), first.aligned.matrix()) < 1e-12);
    CHECK_FALSE(first.overlap_rank_deficient);
}

TEST_CASE("align maps fiber mates back to the reference point") {
    Rng rng(405);
    const DensityOperator rho = random_state(3, rng);
    const Purification w1 = purify(rho);
    const Matrix v = random_unitary(3, rng);
    const Purification mate(Matrix(w1.matrix() * v), rho.rank_tol());
    const AlignmentResult ar = align(w1, mate);
    CHECK(max_abs_diff(ar.aligned.matrix(), w1.matrix()) < 1e-10);
    CHECK(real_inner(w1.matrix(), ar.aligned.matrix()) == Catch::Approx(1.0).margin(1e-10));
}

TEST_CASE("align recovers the root-fidelity overlap on the bundled pair") {
    const Purification w1(psd_sqrt(reference_rho1().matrix()));
    const Purification w2_raw(psd_sqrt(reference_rho2().matrix()));
    const AlignmentResult ar = align(w1, w2_raw);
    const double overlap = real_inner(w1.matrix(), ar.aligned.matrix());
    const double root_f = std::sqrt(fidelity_and_angle(reference_rho1(), reference_rho2()).fidelity);
    CHECK(overlap == Catch::Approx(root_f).margin(1e-9));
    // Aligned overlap matrix is PSD.
    const EigenSystem es =
        hermitian_eigensystem(hermitize(w1.matrix().adjoint() * ar.aligned.matrix()));
    CHECK(es.values(1) > -1e-10);
}

TEST_CASE("alignment maximizes the real overlap over the gauge group") {
    Rng rng(406);
    const DensityOperator rho1 = random_state_with_spectrum({0.6, 0.4, 0.0}, rng);
    const DensityOperator rho2 = random_state_with_spectrum({0.5, 0.5, 0.0}, rng);
    const Purification w1 = purify(rho1);
    const Purification w2_raw = purify(rho2);
    const double best = real_inner(w1.matrix(), align(w1, w2_raw).aligned.matrix());
    for (int trial = 0; trial < 50; ++trial) {
        const Matrix v = random_unitary(2, rng);
        CHECK(real_inner(w1.matrix(), Matrix(w2_raw.matrix() * v)) <= best + 1e-10);
    }
}

TEST_CASE("split_tangent of a phase direction is purely vertical") {
    Rng rng(407);
    const Purification w = purify(random_state(3, rng));
    const Matrix wdot = Complex(0, 0.7) * w.matrix();
    const SplitTangent st = split_tangent(wdot, w);
    CHECK(max_abs(st.horizontal) < 1e-10);
    CHECK(max_abs_diff(st.vertical, wdot) < 1e-10);
}

TEST_CASE("split_tangent of an SLD direction is purely horizontal") {
    Rng rng(408);
    const DensityOperator rho = random_state(3, rng);
    const Purification w = purify(rho);
    Matrix l = random_hermitian(3, rng);
    l -= real_inner(l, rho.matrix()) * Matrix::Identity(3, 3);  // Tr(L rho) = 0
    const Matrix wdot = l * w.matrix();
    const SplitTangent st = split_tangent(wdot, w);
    CHECK(max_abs(st.vertical) < 1e-9);
    CHECK(max_abs_diff(st.horizontal, wdot) < 1e-9);
}

TEST_CASE("split_tangent projects correctly on random sphere tangents") {
    Rng rng(409);
    for (int trial = 0; trial < 30; ++trial) {
        const DensityOperator rho = trial % 2 == 0
                                        ? random_state(3, rng)
                                        : random_state_with_spectrum({0.7, 0.3, 0.0}, rng);
        const Purification w = purify(rho);
        const Matrix wdot = random_sphere_tangent(w, rng);
        const SplitTangent st = split_tangent(wdot, w);
        CHECK(max_abs_diff(st.vertical + st.horizontal, wdot) < 1e-12 * std::max(1.0, max_abs(wdot)));
        // d pi kills the vertical part and keeps the full projection.
        CHECK(max_abs(projected_tangent(st.vertical, w)) < 1e-9 * std::max(1.0, max_abs(wdot)));
        CHECK(max_abs_diff(projected_tangent(st.horizontal, w), projected_tangent(wdot, w)) <
              1e-9 * std::max(1.0, max_abs(wdot)));
        // Orthogonality of the split.
        CHECK(std::abs(purification_inner(st.vertical, st.horizontal)) <
              1e-9 * std::max(1.0, max_abs(wdot)));
    }
}

TEST_CASE("split_tangent rejects non-tangents") {
    Rng rng(410);
    const Purification w = purify(random_state(2, rng));
    REQUIRE_THROWS_WITH(split_tangent(Matrix(0.3 * w.matrix()), w),
                        Catch::Matchers::ContainsSubstring("tangent"));
}

TEST_CASE("lift_generator with H = 0 is already horizontal") {
    Rng rng(411);
    const DensityOperator rho = random_state(3, rng);
    const Purification w = purify(rho);
    const NonHermitianGenerator gen(Matrix::Zero(3, 3), random_hermitian(3, rng));
    const LiftedVelocity lv = lift_generator(gen, w);
    CHECK(max_abs_diff(lv.wdot, lv.wdot_h) < 1e-12);
}

TEST_CASE("lift_generator is not horizontal for generic full-rank H") {
    Rng rng(412);
    const DensityOperator rho = random_state(3, rng);
    const Purification w = purify(rho);
    const NonHermitianGenerator gen(random_hermitian(3, rng), Matrix::Zero(3, 3));
    const LiftedVelocity lv = lift_generator(gen, w);
    CHECK(max_abs_diff(lv.wdot, lv.wdot_h) > 1e-3);
}

TEST_CASE("lift_generator projects to the master-equation tangent") {
    Rng rng(413);
    for (int trial = 0; trial < 30; ++trial) {
        const int n = 2 + trial % 3;
        const DensityOperator rho = random_state(n, rng);
        const Purification w = purify(rho);
        const NonHermitianGenerator gen = random_generator(n, rng);
        const LiftedVelocity lv = lift_generator(gen, w);
        const Matrix expected = tangent_from_H_Gamma(gen, rho).matrix();
        CHECK(max_abs_diff(projected_tangent(lv.wdot, w), expected) <
              1e-10 * std::max(1.0, max_abs(expected)));
        CHECK(max_abs_diff(projected_tangent(lv.wdot_h, w), expected) <
              1e-10 * std::max(1.0, max_abs(expected)));
        // Horizontal length is the Bures speed.
        const double speed = bures_speed(gen, rho);
        CHECK(purification_inner(lv.wdot_h, lv.wdot_h) ==
              Catch::Approx(speed * speed).margin(1e-9));
    }
}

TEST_CASE("metric correspondence is fiber independent") {
    Rng rng(414);
    for (int trial = 0; trial < 40; ++trial) {
        const int n = 2 + trial % 3;
        const DensityOperator rho = trial % 2 == 0
                                        ? random_state(n, rng)
                                        : (n == 2 ? random_state(n, rng)
                                                  : random_state_with_spectrum(
                                                        n == 3
                                                            ? std::vector<double>{0.7, 0.3, 0.0}
                                                            : std::vector<double>{0.5, 0.3, 0.2,
                                                                                  0.0},
                                                        rng));
        const NonHermitianGenerator gen = random_generator(n, rng);
        const TangentVector v = tangent_from_H_Gamma(gen, rho);
        const double inner = bures_inner(v, v);

        const Purification w = purify(rho);
        const Matrix u = random_unitary(rho.rank(), rng);
        const Purification w_mate(Matrix(w.matrix() * u), rho.rank_tol());
        for (const Purification* rep : {&w, &w_mate}) {
            const LiftedVelocity lv = lift_generator(gen, *rep);
            CHECK(purification_inner(lv.wdot_h, lv.wdot_h) ==
                  Catch::Approx(inner).margin(1e-8));
        }
    }
}

TEST_CASE("geodesic_path endpoints and range checks") {
    const GeodesicPlan plan = make_geodesic_plan(reference_rho1(), reference_rho2());
    const GeodesicPoint start = geodesic_path(plan, 0.0);
    const GeodesicPoint end = geodesic_path(plan, plan.theta);
    CHECK(max_abs_diff(start.rho.matrix(), reference_rho1().matrix()) < 1e-12);
    CHECK(max_abs_diff(end.rho.matrix(), reference_rho2().matrix()) < 1e-12);
    CHECK(max_abs_diff(start.W.matrix(), plan.W1.matrix()) < 1e-12);
    CHECK(max_abs_diff(end.W.matrix(), plan.W2.matrix()) < 1e-12);
    REQUIRE_THROWS_AS(geodesic_path(plan, -0.1), NumericsError);
    REQUIRE_THROWS_AS(geodesic_path(plan, plan.theta + 0.1), NumericsError);
}

TEST_CASE("geodesic midpoint of two pure states is the symmetric superposition") {
    CVector psi1(2), psi2(2);
    psi1 << 1, 0;
    psi2 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const GeodesicPlan plan = make_geodesic_plan(pure_state(psi1), pure_state(psi2));
    const GeodesicPoint mid = geodesic_path(plan, plan.theta / 2.0);

    CVector sum = plan.W1.matrix().col(0) + plan.W2.matrix().col(0);
    sum /= sum.norm();
    CHECK(max_abs_diff(mid.rho.matrix(), Matrix(sum * sum.adjoint())) < 1e-12);
}

TEST_CASE("geodesic path has unit purification speed") {
    const GeodesicPlan plan = make_geodesic_plan(reference_rho1(), reference_rho2());
    const double fd = 1e-6;
    for (double frac : {0.1, 0.35, 0.6, 0.9}) {
        const double tau = frac * plan.theta;
        const Matrix wdot = (geodesic_path(plan, tau + fd).W.matrix() -
                             geodesic_path(plan, tau - fd).W.matrix()) /
                            (2.0 * fd);
        CHECK(std::sqrt(purification_inner(wdot, wdot)) == Catch::Approx(1.0).margin(1e-8));
    }
}

TEST_CASE("projected arc length equals the Bures angle") {
    const GeodesicPlan plan = make_geodesic_plan(reference_rho1(), reference_rho2());
    // Quadrature of the Bures speed of finite-difference tangents (Simpson).
    const int intervals = 200;
    const double h = plan.theta / intervals;
    const double fd = 1e-7;
    const auto speed_at = [&](double tau) {
        const double lo = std::max(tau - fd, 0.0);
        const double hi = std::min(tau + fd, plan.theta);
        Matrix v = (geodesic_path(plan, hi).rho.matrix() -
                    geodesic_path(plan, lo).rho.matrix()) /
                   (hi - lo);
        v -= (v.trace() / 2.0) * Matrix::Identity(2, 2);  // strip FD trace noise
        const DensityOperator rho = geodesic_path(plan, tau).rho;
        return std::sqrt(bures_inner(TangentVector(rho, v), TangentVector(rho, v)));
    };
    double integral = 0.0;
    for (int i = 0; i < intervals; i += 2)
        integral += (h / 3.0) * (speed_at(i * h) + 4.0 * speed_at((i + 1) * h) +
                                 speed_at((i + 2) * h));
    const double angle = fidelity_and_angle(reference_rho1(), reference_rho2()).angle;
    CHECK(integral == Catch::Approx(angle).margin(1e-7));
}

TEST_CASE("transport_operator on the qutrit pair of the counterexample") {
    const Purification w1(psd_sqrt(qutrit_rho1().matrix()));
    const Purification w2(psd_sqrt(qutrit_rho2().matrix()));
    const Matrix m = transport_operator(w1, w2, 1.0);
    Matrix expected = Matrix::Zero(3, 3);
    expected.diagonal() << 1.0, std::sqrt(3.0) / 2.0, std::sqrt(5.0) / 2.0;
    CHECK(max_abs_diff(m, expected) < 1e-12);
}

TEST_CASE("transport_operator of identical full-rank purifications is the identity") {
    Rng rng(415);
    const Purification w = purify(random_state(3, rng));
    CHECK(max_abs_diff(transport_operator(w, w, 1.0), Matrix::Identity(3, 3)) < 1e-10);
}

TEST_CASE("transport_operator maps between pure states and keeps G_g invertible") {
    Rng rng(416);
    CVector psi1 = random_matrix(2, 1, rng).col(0);
    psi1 /= psi1.norm();
    CVector psi2 = random_matrix(2, 1, rng).col(0);
    psi2 /= psi2.norm();
    const GeodesicPlan plan = make_geodesic_plan(pure_state(psi1), pure_state(psi2));
    CHECK(max_abs_diff(plan.M * plan.W1.matrix(), plan.W2.matrix()) < 1e-10);
    for (int i = 0; i <= 100; ++i) {
        const double tau = plan.theta * i / 100.0;
        const RealVector sv = singular_values(geodesic_operator(plan, tau));
        CHECK(sv(sv.size() - 1) > 1e-8);
    }
}

TEST_CASE("G_g stays invertible along random low-rank plans") {
    Rng rng(417);
    for (int trial = 0; trial < 5; ++trial) {
        const DensityOperator rho1 = random_state_with_spectrum({0.6, 0.4, 0.0, 0.0}, rng);
        const DensityOperator rho2 = random_state_with_spectrum({0.8, 0.2, 0.0, 0.0}, rng);
        const GeodesicPlan plan = make_geodesic_plan(rho1, rho2, 1.0);
        for (int i = 0; i <= 200; ++i) {
            const double tau = plan.theta * i / 200.0;
            const RealVector sv = singular_values(geodesic_operator(plan, tau));
            CHECK(sv(sv.size() - 1) > 1e-8);
        }
    }
}

TEST_CASE("geodesic_generator matches the frozen qutrit values") {
    const GeodesicPlan plan = make_geodesic_plan(qutrit_rho1(), qutrit_rho2());
    const Matrix k0 = geodesic_generator(plan, 0.0);
    // cos(theta) = sum_k sqrt(l1k l2k); entries (mu_k - cos)/sin, frozen by the
    // pre-build oracle.
    const double ct = std::cos(plan.theta);
    CHECK(ct == Catch::Approx(0.2 + std::sqrt(0.12) + std::sqrt(0.2)).margin(1e-12));
    Matrix expected = Matrix::Zero(3, 3);
    expected.diagonal() << Complex(0, 0.056553674680547047), Complex(0, -1.1317253394899638),
        Complex(0, 1.1034485021496903);
    CHECK(max_abs_diff(k0, expected) < 1e-10);
}

TEST_CASE("make_geodesic_plan rejects coincident endpoints") {
    REQUIRE_THROWS_WITH(make_geodesic_plan(reference_rho1(), reference_rho1()),
                        Catch::Matchers::ContainsSubstring("theta = 0"));
}

TEST_CASE("make_geodesic_plan rejects rank mismatches") {
    Rng rng(418);
    const DensityOperator full = random_state(3, rng);
    const DensityOperator low = random_state_with_spectrum({0.6, 0.4, 0.0}, rng);
    REQUIRE_THROWS_WITH(make_geodesic_plan(full, low),
                        Catch::Matchers::ContainsSubstring("rank"));
}

TEST_CASE("geodesic generator is anti-Hermitian on full-rank plans") {
    Rng rng(419);
    const GeodesicPlan plan = make_geodesic_plan(reference_rho1(), reference_rho2());
    for (double frac : {0.0, 0.2, 0.5, 0.8, 1.0}) {
        const Matrix k = geodesic_generator(plan, frac * plan.theta);
        CHECK(max_abs(k + k.adjoint()) < 1e-9);
    }
    const DensityOperator r1 = random_state(3, rng);
    const DensityOperator r2 = random_state(3, rng);
    const GeodesicPlan plan3 = make_geodesic_plan(r1, r2);
    for (double frac : {0.1, 0.6}) {
        const Matrix k = geodesic_generator(plan3, frac * plan3.theta);
        CHECK(max_abs(k + k.adjoint()) < 1e-9);
    }
}

TEST_CASE("geodesic generator tangent matches the path derivative") {
    const GeodesicPlan plan = make_geodesic_plan(reference_rho1(), reference_rho2());
    const NonHermitianGenerator gen =
        NonHermitianGenerator::from_K(geodesic_generator(plan, 0.0));
    const TangentVector generated = tangent_from_H_Gamma(gen, reference_rho1());
    const double fd = 1e-6;
    const Matrix derivative =
        (geodesic_path(plan, fd).rho.matrix() - reference_rho1().matrix()) / fd;
    CHECK(max_abs_diff(generated.matrix(), derivative) < 1e-5);

    const double fd2 = 1e-7;
    const Matrix mid_derivative = (geodesic_path(plan, plan.theta / 2 + fd2).rho.matrix() -
                                   geodesic_path(plan, plan.theta / 2 - fd2).rho.matrix()) /
                                  (2 * fd2);
    const GeodesicPoint mid = geodesic_path(plan, plan.theta / 2);
    const NonHermitianGenerator gen_mid =
        NonHermitianGenerator::from_K(geodesic_generator(plan, plan.theta / 2));
    CHECK(max_abs_diff(tangent_from_H_Gamma(gen_mid, mid.rho).matrix(), mid_derivative) < 1e-6);
}

TEST_CASE("driving the master equation with K_g traces the geodesic") {
    const GeodesicPlan plan = make_geodesic_plan(reference_rho1(), reference_rho2());
    IntegratorConfig config;
    config.dt = plan.theta / 2000.0;
    const TrajectoryRecord rec = evolve(reference_rho1(), geodesic_schedule(plan), config);
    for (std::size_t i = 0; i < rec.size(); i += 250) {
        const DensityOperator expected = geodesic_path(plan, rec.times[i]).rho;
        CHECK(trace_distance(rec.states[i], expected) <= 1e-6);
    }
    CHECK(trace_distance(rec.states.back(), reference_rho2()) <= 1e-6);
}

TEST_CASE("time_independent_check verdicts") {
    Matrix i_sz(2, 2);
    i_sz << Complex(0, 1), 0, 0, Complex(0, -1);
    const TimeIndependenceCheck ok = time_independent_check(i_sz);
    CHECK(ok.verdict == ShortestFormVerdict::exists_shortest_form);
    CHECK(ok.distinct_eigenvalues == 2);

    Matrix three = Matrix::Zero(3, 3);
    three.diagonal() << Complex(0, 1), Complex(0, 2), Complex(0, 3);
    const TimeIndependenceCheck bad = time_independent_check(three);
    CHECK(bad.verdict == ShortestFormVerdict::fails);
    CHECK(bad.distinct_eigenvalues == 3);

    const GeodesicPlan plan = make_geodesic_plan(qutrit_rho1(), qutrit_rho2());
    const TimeIndependenceCheck qutrit =
        time_independent_check(geodesic_generator(plan, 0.0));
    CHECK(qutrit.verdict == ShortestFormVerdict::fails);
    CHECK(qutrit.distinct_eigenvalues == 3);

    // Hermitian two-eigenvalue generators are not of the shortest (horizontal)
    // form: the shifted pair is real, not imaginary.
    Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    CHECK(time_independent_check(sz).verdict == ShortestFormVerdict::fails);
}

TEST_CASE("qubit_ellipse_invariant closed forms and guards") {
    Matrix on_axis(2, 2);
    on_axis << 0.8, 0, 0, 0.2;
    CHECK(qubit_ellipse_invariant(DensityOperator(on_axis)) ==
          Catch::Approx(0.0).margin(1e-12));
    CHECK(qubit_ellipse_invariant(DensityOperator(Matrix(0.5 * Matrix::Identity(2, 2)))) ==
          Catch::Approx(0.0).margin(1e-12));

    Matrix pole(2, 2);
    pole << 1, 0, 0, 0;
    REQUIRE_THROWS_WITH(qubit_ellipse_invariant(DensityOperator(pole)),
                        Catch::Matchers::ContainsSubstring("singular frame"));

    Rng rng(420);
    REQUIRE_THROWS_AS(qubit_ellipse_invariant(random_state(3, rng)), NumericsError);
}

TEST_CASE("ellipse invariant is conserved under the i sigma_z flow") {
    Matrix sz(2, 2);
    sz << 1, 0, 0, -1;
    const NonHermitianGenerator gen =
        NonHermitianGenerator::from_K(Matrix(Complex(0, 1) * sz));
    Matrix start(2, 2);
    start << 0.6, 0.25, 0.25, 0.4;
    const DensityOperator rho0(start);
    const double reference = qubit_ellipse_invariant(rho0);
    IntegratorConfig config;
    config.dt = 1e-3;
    const TrajectoryRecord rec =
        evolve(rho0, GeneratorSchedule::constant(gen, 0.0, 1.0), config);
    for (std::size_t i = 0; i < rec.size(); i += 100)
        CHECK(qubit_ellipse_invariant(rec.states[i]) ==
              Catch::Approx(reference).margin(1e-8));
}
