#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>
#include <random>

#include "fvheat/errors.hpp"
#include "fvheat/matrix_lab.hpp"

using namespace fvheat;
using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using CD = std::complex<double>;

namespace {

constexpr double kPi = std::numbers::pi;

MatrixOperator op_from(const MatrixXcd& A) { return MatrixOperator{A}; }

MatrixOperator jordan2() {
    MatrixXcd A(2, 2);
    A << 1, 1, 0, 1;
    return op_from(A);
}

MatrixOperator diag12() {
    MatrixXcd A = MatrixXcd::Zero(2, 2);
    A(0, 0) = 1.0;
    A(1, 1) = 2.0;
    return op_from(A);
}

MatrixXcd random_matrix(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    MatrixXcd A(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            A(i, j) = CD(gauss(rng), gauss(rng));
    return A;
}

// Random matrix with positive-definite Hermitian part (V-elliptic fixture).
MatrixOperator random_coercive(std::size_t n, std::uint64_t seed, double skew = 0.4) {
    const MatrixXcd R = random_matrix(n, seed);
    const MatrixXcd H =
        MatrixXcd::Identity(n, n) + 0.25 * (R + R.adjoint());  // Hermitian, eigs near 1
    const MatrixXcd S = 0.5 * skew * (R - R.adjoint());        // skew part
    MatrixXcd A = H + S;
    // Shift if the Hermitian part dipped below zero.
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(0.5 * (A + A.adjoint()), Eigen::EigenvaluesOnly);
    const double m = es.eigenvalues().minCoeff();
    if (m < 0.1)
        A += (0.1 - m) * MatrixXcd::Identity(n, n);
    return op_from(A);
}

VectorXcd random_vector(std::size_t n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    VectorXcd v(n);
    for (std::size_t i = 0; i < n; ++i)
        v(i) = CD(gauss(rng), gauss(rng));
    return v;
}

double q_value(const MatrixOperator& op, const VectorXcd& x) {
    const VectorXcd Ax = op.A * x;
    const VectorXcd AAx = op.A * Ax;
    const double re = (x.adjoint() * Ax)(0, 0).real();
    return (x.adjoint() * AAx)(0, 0).real() + Ax.squaredNorm() - 2.0 * re * re;
}

} // namespace

TEST_SUITE_BEGIN("matrix_lab");

TEST_CASE("matrix exponential: identity, diagonal, nilpotent") {
    const auto zero = op_from(MatrixXcd::Zero(3, 3));
    CHECK((matrix_exponential(zero, 1.0) - MatrixXcd::Identity(3, 3)).norm() == 0.0);

    const auto E = matrix_exponential(diag12(), -1.0);
    CHECK(std::abs(E(0, 0) - CD(std::exp(-1.0), 0)) < 1e-15);
    CHECK(std::abs(E(1, 1) - CD(std::exp(-2.0), 0)) < 1e-15);
    CHECK(std::abs(E(0, 1)) < 1e-16);

    MatrixXcd N(2, 2);
    N << 0, 1, 0, 0;
    for (double t : {0.5, 1.0, 3.0}) {
        const auto En = matrix_exponential(op_from(N), t);
        CHECK(std::abs(En(0, 0) - CD(1, 0)) < 1e-15);
        CHECK(std::abs(En(0, 1) - CD(t, 0)) < 1e-15);  // series terminates: I + tN
        CHECK(std::abs(En(1, 0)) < 1e-16);
        CHECK(std::abs(En(1, 1) - CD(1, 0)) < 1e-15);
    }
}

TEST_CASE("matrix exponential: agrees with the eigendecomposition route for Hermitian input") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const MatrixXcd R = random_matrix(5, seed);
        const MatrixXcd H = 0.5 * (R + R.adjoint());
        const double t = 0.8;
        const MatrixXcd E = matrix_exponential(op_from(H), t);

        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H);
        MatrixXcd D = MatrixXcd::Zero(5, 5);
        for (int i = 0; i < 5; ++i)
            D(i, i) = std::exp(t * es.eigenvalues()(i));
        const MatrixXcd oracle = es.eigenvectors() * D * es.eigenvectors().adjoint();
        CHECK((E - oracle).norm() <= 1e-12 * oracle.norm());
    }
}

TEST_CASE("matrix exponential: semigroup law within 1e-12 relative") {
    const auto op = random_coercive(4, 11);
    MatrixOperator gen;
    gen.A = -op.A;  // generator of the decaying semigroup
    for (const auto& [s, t] : {std::pair{0.5, 0.5}, {0.3, 1.7}, {2.0, 2.0}}) {
        const MatrixXcd prod = matrix_exponential(gen, s) * matrix_exponential(gen, t);
        const MatrixXcd direct = matrix_exponential(gen, s + t);
        CHECK((prod - direct).norm() <= 1e-12 * direct.norm());
    }
}

TEST_CASE("matrix exponential: overflow budget enforced") {
    CHECK_THROWS_AS(matrix_exponential(diag12(), 200.0), OverflowError);  // t*abscissa = 400
    CHECK_NOTHROW(matrix_exponential(diag12(), 100.0));
}

TEST_CASE("coercivity profile: identity, Jordan block, negative identity") {
    const auto pid = coercivity_profile(op_from(MatrixXcd::Identity(2, 2)));
    CHECK(pid.C3 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pid.C4 == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pid.k == 0.0);
    CHECK(pid.theta == doctest::Approx(kPi / 4).epsilon(1e-12));

    // 2x2 oracle: ||A||^2 = max eig of A*A = (3+sqrt(5))/2, the squared golden
    // ratio; Hermitian part [[1,1/2],[1/2,1]] has min eigenvalue 1/2.
    const auto pj = coercivity_profile(jordan2());
    CHECK(pj.C3 == doctest::Approx(std::sqrt((3.0 + std::sqrt(5.0)) / 2.0)).epsilon(1e-12));
    CHECK(pj.C3 == doctest::Approx(1.6180339887).epsilon(1e-9));
    CHECK(pj.C4 == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(pj.k == 0.0);
    CHECK(pj.theta > 0.0);
    CHECK(pj.theta < kPi / 2);

    const auto pm = coercivity_profile(op_from(-MatrixXcd::Identity(3, 3)));
    CHECK(pm.k == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(pm.C4 == doctest::Approx(1.0).epsilon(1e-12));  // shifted by (k+1)I
}

TEST_CASE("height curve: pure eigenvector decays as e^{-t}") {
    VectorXcd u0(2);
    u0 << 1, 0;
    const auto curve = height_curve(diag12(), u0, TimeGrid::uniform(1.0, 8));
    for (std::size_t m = 0; m < curve.t.size(); ++m) {
        CHECK(curve.h[m] == doctest::Approx(std::exp(-curve.t[m])).epsilon(1e-13));
        CHECK(curve.dh[m] == doctest::Approx(-std::exp(-curve.t[m])).epsilon(1e-12));
    }
    CHECK(curve.dh[0] == doctest::Approx(-1.0).epsilon(1e-13));
}

TEST_CASE("height curve: h'(0) is the mean eigenvalue for the balanced start") {
    VectorXcd u0(2);
    u0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto curve = height_curve(diag12(), u0, TimeGrid::uniform(0.5, 4));
    CHECK(curve.dh[0] == doctest::Approx(-1.5).epsilon(1e-13));
}

TEST_CASE("height curve: u0 = 0 rejected; h stays positive") {
    CHECK_THROWS_AS(height_curve(diag12(), VectorXcd::Zero(2), TimeGrid::uniform(1.0, 4)),
                    std::invalid_argument);
    const auto curve = height_curve(random_coercive(4, 13), random_vector(4, 14),
                                    TimeGrid::uniform(2.0, 16));
    for (double h : curve.h)
        CHECK(h > 0.0);
}

TEST_CASE("height curve: formulas match centered differences to 1e-6 relative") {
    for (std::uint64_t seed : {21u, 22u, 23u}) {
        const auto op = random_coercive(4, seed);
        const VectorXcd u0 = random_vector(4, seed + 100).normalized();
        const auto curve = height_curve(op, u0, TimeGrid::uniform(1.0, 8), true, 1e-4);
        for (std::size_t m = 0; m < curve.t.size(); ++m) {
            if (std::abs(curve.dh[m]) > 1e-3)
                CHECK(curve.fd_residual_dh[m] <= 1e-6 * std::abs(curve.dh[m]));
            if (std::abs(curve.ddh[m]) > 1e-3)
                CHECK(curve.fd_residual_ddh[m] <= 1e-6 * std::abs(curve.ddh[m]));
        }
    }
}

TEST_CASE("log-convexity criterion: eigenvector equality and balanced value") {
    const auto op = diag12();
    VectorXcd e0(2), mix(2);
    e0 << 1, 0;
    mix << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    CHECK(q_value(op, e0) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(q_value(op, mix) == doctest::Approx(0.5).epsilon(1e-13));
}

TEST_CASE("log-convexity criterion: sampled min for the self-adjoint fixture is ~0") {
    SamplerSpec spec;
    spec.count = 512;
    spec.seed = 7;
    spec.refine_rounds = 16;
    const auto result = logconvexity_criterion_min(diag12(), spec);
    CHECK(result.holds);
    CHECK(result.min_value >= -1e-12);
    CHECK(result.min_value <= 1e-4);  // refinement closes in on an eigenvector
}

TEST_CASE("log-convexity criterion: Jordan block dips to -1/8") {
    // Dense-sampling oracle over the real section x = (cos a, sin a):
    // Q = sin^2 a (1 - 2 cos^2 a), minimized at sin^2 a = 1/4 with value -1/8.
    const auto op = jordan2();
    double oracle = 0.0;
    for (int i = 0; i <= 20000; ++i) {
        const double a = kPi * static_cast<double>(i) / 20000.0;
        VectorXcd x(2);
        x << std::cos(a), std::sin(a);
        oracle = std::min(oracle, q_value(op, x));
    }
    CHECK(oracle == doctest::Approx(-0.125).epsilon(1e-6));

    SamplerSpec spec;
    spec.count = 1024;
    spec.seed = 3;
    spec.refine_rounds = 20;
    const auto result = logconvexity_criterion_min(op, spec);
    CHECK(!result.holds);
    CHECK(result.min_value <= -0.1249);
    CHECK(result.min_value >= -0.13);  // the complex section does not go lower here
    CHECK(q_value(op, result.argmin) == doctest::Approx(result.min_value).epsilon(1e-12));
}

TEST_CASE("hyponormality gap: diagonal, Jordan, unitary") {
    CHECK(std::abs(hyponormality_gap(diag12())) < 1e-14);

    CHECK(hyponormality_gap(jordan2()) == doctest::Approx(-1.0).epsilon(1e-13));

    MatrixXcd U(2, 2);  // rotation: unitary
    U << CD(0, 0), CD(1, 0), CD(-1, 0), CD(0, 0);
    CHECK(std::abs(hyponormality_gap(op_from(U))) < 1e-14);
}

TEST_CASE("log-convexity check: closed-form oracle for the self-adjoint mix") {
    // h(t) = sqrt((e^{-2t} + e^{-4t})/2): h''h - (h')^2 = ab/(a+b) with
    // a = e^{-2t}, b = e^{-4t} (symbolic second derivative of ln h).
    VectorXcd u0(2);
    u0 << 1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0);
    const auto curve = height_curve(diag12(), u0, TimeGrid::uniform(1.0, 32), false);
    const auto check = logconvexity_check(curve);
    CHECK(check.log_convex);
    CHECK(check.min_defect >= 0.0);
    for (std::size_t m = 0; m < curve.t.size(); ++m) {
        const double a = std::exp(-2.0 * curve.t[m]);
        const double b = std::exp(-4.0 * curve.t[m]);
        // Halve: h^2 = (a+b)/2, so the defect is (ab/(a+b)^2)*(a+b)/2*2 ... direct:
        const double oracle = a * b / (a + b);
        CHECK(check.defects[m] == doctest::Approx(oracle).epsilon(1e-9));
    }
}

TEST_CASE("log-convexity check: single eigenvector gives a linear log-height") {
    VectorXcd u0(2);
    u0 << 0, 1;
    const auto curve = height_curve(diag12(), u0, TimeGrid::uniform(1.0, 16), false);
    const auto check = logconvexity_check(curve);
    CHECK(check.log_convex);
    CHECK(std::abs(check.min_defect) <= 1e-9 * check.scale);
}

TEST_CASE("log-convexity check: criterion violation has a matching curve violation") {
    // Where Q(u0) < 0, the height curve from u0 violates log-convexity at
    // t = 0, since h''h - (h')^2 there equals Q(u0) for unit u0.
    const auto op = jordan2();
    SamplerSpec spec;
    spec.count = 1024;
    spec.seed = 3;
    spec.refine_rounds = 20;
    const auto crit = logconvexity_criterion_min(op, spec);
    REQUIRE(crit.min_value < 0.0);

    const auto curve = height_curve(op, crit.argmin, TimeGrid::uniform(0.5, 16), false);
    const auto check = logconvexity_check(curve);
    CHECK(!check.log_convex);
    CHECK(check.defects[0] == doctest::Approx(crit.min_value).epsilon(1e-10));
    CHECK((check.min_defect < 0.0) == (crit.min_value < 0.0));  // detector sign agreement
}

TEST_CASE("log-convexity holds along curves of random self-adjoint coercive matrices") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const MatrixXcd R = random_matrix(4, seed);
        MatrixXcd H = MatrixXcd::Identity(4, 4) + 0.3 * (R + R.adjoint());
        Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H, Eigen::EigenvaluesOnly);
        const double m = es.eigenvalues().minCoeff();
        if (m < 0.1)
            H += (0.1 - m) * MatrixXcd::Identity(4, 4);
        const auto curve =
            height_curve(op_from(H), random_vector(4, seed + 50), TimeGrid::uniform(1.0, 24),
                         false);
        const auto check = logconvexity_check(curve);
        CHECK(check.min_defect >= -1e-9 * check.scale);
    }
}

TEST_CASE("sector check: decaying scalar semigroup has a small finite supremum") {
    MatrixOperator gen;
    gen.A = -MatrixXcd::Identity(1, 1);
    const auto check = sector_check(gen, 0.0, kPi / 4);
    CHECK(check.near_singular == 0);
    CHECK(check.sup <= 3.92);
    CHECK(check.sup >= 0.9);  // the real-axis samples already push it near 1
}

TEST_CASE("sector check: omega inside the spectrum raises near-singular flags") {
    MatrixOperator gen;
    gen.A = -MatrixXcd::Identity(2, 2);
    const auto check = sector_check(gen, -1.0, kPi / 4);
    CHECK(check.near_singular >= 1);
}

TEST_CASE("sector check: diagonal generator approaches 1 along the real axis") {
    MatrixOperator gen;
    gen.A = MatrixXcd::Zero(2, 2);
    gen.A(0, 0) = -1.0;
    gen.A(1, 1) = -3.0;
    SectorSamples wide;
    wide.r_max = 1e6;
    const auto check = sector_check(gen, 0.0, kPi / 4, wide);
    CHECK(check.sup >= 0.99);
    CHECK(check.sup < 10.0);
    CHECK(check.near_singular == 0);
}

TEST_CASE("laplace identity: scalar closed forms") {
    MatrixOperator gen;
    gen.A = -MatrixXcd::Identity(1, 1);
    const auto check = laplace_identity_check(gen, CD(1.0, 0.0), 40.0, 4001);
    CHECK(check.defect <= 1e-9);  // resolvent (1+1)^{-1} = 1/2

    MatrixOperator zero;
    zero.A = MatrixXcd::Zero(1, 1);
    const auto check0 = laplace_identity_check(zero, CD(1.0, 0.0), 40.0, 4001);
    CHECK(check0.defect <= 1e-9);  // resolvent 1
}

TEST_CASE("laplace identity: 3x3 coercive generator within budget") {
    const auto op = random_coercive(3, 31);
    MatrixOperator gen;
    gen.A = -op.A;
    const double lambda = coercivity_profile(op).C3 + 1.0;
    const auto check = laplace_identity_check(gen, CD(lambda, 0.0), 40.0, 4001);
    CHECK(check.defect <= 1e-6);
    CHECK(check.truncation_bound <= 1e-10);
}

TEST_CASE("laplace identity: defect decreases at fourth order as steps double") {
    const auto op = random_coercive(3, 37);
    MatrixOperator gen;
    gen.A = -op.A;
    const double lambda = coercivity_profile(op).C3 + 1.0;
    const double coarse = laplace_identity_check(gen, CD(lambda, 0.0), 40.0, 501).defect;
    const double fine = laplace_identity_check(gen, CD(lambda, 0.0), 40.0, 1001).defect;
    CHECK(fine <= coarse / 8.0);  // Simpson: expect ~1/16
}

TEST_CASE("laplace identity: precondition violations rejected") {
    MatrixOperator gen;
    gen.A = MatrixXcd::Identity(1, 1);  // abscissa +1
    CHECK_THROWS_AS(laplace_identity_check(gen, CD(0.5, 0.0), 40.0, 101),
                    std::invalid_argument);
    CHECK_THROWS_AS(laplace_identity_check(gen, CD(1.5, 0.0), 10.0, 101),
                    std::invalid_argument);
}

TEST_CASE("translation trick: scalar and random-matrix defects") {
    MatrixOperator gen;
    gen.A = MatrixXcd::Identity(1, 1) * CD(-0.7, 0.0);
    const auto scalar = translation_check(gen, CD(2.0, -1.0), 1.3);
    CHECK(scalar.defect_rel <= 1e-13);

    const auto op = random_coercive(4, 41);
    MatrixOperator gen4;
    gen4.A = -op.A;
    CHECK(translation_check(gen4, CD(0.0, 0.0), 0.7).defect == 0.0);  // mu = 0 identity
    const auto rand4 = translation_check(gen4, CD(1.0, 1.0), 0.7);
    CHECK(rand4.defect_rel <= 1e-12);
}

TEST_CASE("injectivity probe: scalar decay and the crude lower bound") {
    MatrixOperator gen;
    gen.A = -MatrixXcd::Identity(2, 2);
    VectorXcd v(2), w(2);
    v << 1, 0;
    w << 0, 0;
    const auto probe = injectivity_probe(gen, v, w, TimeGrid::uniform(1.0, 10));
    CHECK(probe.min_norm == doctest::Approx(std::exp(-1.0)).epsilon(1e-12));
    CHECK(probe.min_norm >= probe.lower_bound * (1 - 1e-12));

    CHECK_THROWS_AS(injectivity_probe(gen, v, v, TimeGrid::uniform(1.0, 4)),
                    std::invalid_argument);
}

TEST_CASE("injectivity probe: strictly positive for a non-normal generator") {
    MatrixXcd N(3, 3);
    N.setZero();
    N(0, 1) = 1.0;
    N(1, 2) = 1.0;
    MatrixOperator gen;
    gen.A = -MatrixXcd::Identity(3, 3) + N;  // nilpotent-shifted
    const auto probe =
        injectivity_probe(gen, random_vector(3, 43), random_vector(3, 44),
                          TimeGrid::uniform(2.0, 20));
    CHECK(probe.min_norm > 0.0);
    CHECK(probe.min_norm >= probe.lower_bound * (1 - 1e-12));
}

TEST_CASE("matrix final value problem: diagonal closed form") {
    VectorXcd u_T(2);
    u_T << std::exp(-1.0), std::exp(-2.0);
    const auto grid = TimeGrid::uniform(1.0, 8);
    const std::vector<VectorXcd> f(grid.node_count(), VectorXcd::Zero(2));
    const auto result = matrix_fvp_solve(diag12(), u_T, f, grid);
    CHECK(std::abs(result.u0(0) - CD(1, 0)) < 1e-12);
    CHECK(std::abs(result.u0(1) - CD(1, 0)) < 1e-12);
    CHECK(result.terminal_residual <= result.kappa * 64 *
                                          std::numeric_limits<double>::epsilon() * u_T.norm());
}

TEST_CASE("matrix final value problem: scalar constant source") {
    // A = (1), f ≡ 1: u0 = e^{T}(u_T - (1 - e^{-T})).
    MatrixXcd A = MatrixXcd::Identity(1, 1);
    const double T = 0.9;
    const auto grid = TimeGrid::uniform(T, 16);
    std::vector<VectorXcd> f(grid.node_count(), VectorXcd::Ones(1));
    VectorXcd u_T(1);
    u_T << 0.75;
    const auto result = matrix_fvp_solve(op_from(A), u_T, f, grid);
    const double expected = std::exp(T) * (0.75 - (-std::expm1(-T)));
    CHECK(std::abs(result.u0(0) - CD(expected, 0)) < 1e-12 * std::abs(expected));
}

TEST_CASE("matrix final value problem: advection-diffusion forward data recovered") {
    const auto op = advection_diffusion_builder(8, +1,
                                                BoundaryCondition{BoundaryKind::dirichlet},
                                                BoundaryCondition{BoundaryKind::neumann});
    // Mild time horizon: the discrete Laplacian has eigenvalues up to ~4/h^2.
    const double T = 0.01;
    const auto grid = TimeGrid::uniform(T, 32);

    const VectorXcd u0 = random_vector(8, 47);
    std::vector<VectorXcd> f(grid.node_count());
    for (auto& s : f)
        s = VectorXcd::Zero(8);

    // Forward evolve with a dense exponential as the oracle.
    std::vector<VectorXcd> traj(grid.node_count());
    for (std::size_t m = 0; m < grid.node_count(); ++m)
        traj[m] = matrix_exponential(op, -grid.nodes[m]) * u0;

    const auto result = matrix_fvp_solve(op, traj.back(), f, grid);
    CHECK((result.u0 - u0).norm() <= result.kappa * 1e-12 * u0.norm());
    for (std::size_t m = 0; m < grid.node_count(); ++m)
        CHECK((result.trajectory[m] - traj[m]).norm() <=
              result.kappa * 1e-10 * std::max(1.0, traj[m].norm()));
}

TEST_CASE("matrix final value problem: overflow budget enforced") {
    VectorXcd u_T = VectorXcd::Ones(2);
    const auto grid = TimeGrid::uniform(200.0, 4);
    const std::vector<VectorXcd> f(grid.node_count(), VectorXcd::Zero(2));
    CHECK_THROWS_AS(matrix_fvp_solve(diag12(), u_T, f, grid), OverflowError);
}

TEST_CASE("advection-diffusion builder: Dirichlet stencil at n = 3") {
    const auto op = advection_diffusion_builder(3, +1,
                                                BoundaryCondition{BoundaryKind::dirichlet},
                                                BoundaryCondition{BoundaryKind::dirichlet});
    // h = 1/4: interior row [-1/h^2 - 1/(2h), 2/h^2, -1/h^2 + 1/(2h)].
    CHECK(op.A(1, 0).real() == doctest::Approx(-18.0).epsilon(1e-14));
    CHECK(op.A(1, 1).real() == doctest::Approx(32.0).epsilon(1e-14));
    CHECK(op.A(1, 2).real() == doctest::Approx(-14.0).epsilon(1e-14));
    CHECK(op.A(0, 0).real() == doctest::Approx(32.0).epsilon(1e-14));
    CHECK(op.A(0, 1).real() == doctest::Approx(-14.0).epsilon(1e-14));
}

TEST_CASE("advection-diffusion builder: sign flip isolates the advection part") {
    for (auto kinds : {std::pair{BoundaryKind::dirichlet, BoundaryKind::neumann},
                       {BoundaryKind::neumann, BoundaryKind::robin},
                       {BoundaryKind::robin, BoundaryKind::dirichlet}}) {
        BoundaryCondition left{kinds.first, 2.0};
        BoundaryCondition right{kinds.second, 3.0};
        const auto plus = advection_diffusion_builder(6, +1, left, right);
        const auto minus = advection_diffusion_builder(6, -1, left, right);
        const MatrixXcd expected = 2.0 * advection_part(6, left, right);
        // Exact for Dirichlet/Neumann closures; Robin weights round, leaving
        // only entry-level addition roundoff.
        const double slack = 4.0 * std::numeric_limits<double>::epsilon() *
                             (plus.A.norm() + minus.A.norm());
        CHECK((plus.A - minus.A - expected).norm() <= slack);
    }
}

TEST_CASE("advection-diffusion builder: Dirichlet-Neumann mix is not hyponormal") {
    const auto op = advection_diffusion_builder(16, +1,
                                                BoundaryCondition{BoundaryKind::dirichlet},
                                                BoundaryCondition{BoundaryKind::neumann});
    CHECK(hyponormality_gap(op) < 0.0);  // discrete-level illustration
}

TEST_CASE("advection-diffusion builder: invalid arguments rejected") {
    CHECK_THROWS_AS(advection_diffusion_builder(2, +1, BoundaryCondition{}, BoundaryCondition{}),
                    std::invalid_argument);
    CHECK_THROWS_AS(advection_diffusion_builder(5, 0, BoundaryCondition{}, BoundaryCondition{}),
                    std::invalid_argument);
}

TEST_SUITE_END();
