// Acceptance suite: one criterion per section, one PASS/FAIL line each, with
// the measured quantities and timings printed alongside.  Exits nonzero if
// any criterion fails.

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <string>
#include <sys/wait.h>
#include <vector>

#include "cli_fixtures.hpp"
#include "fvheat/domains.hpp"
#include "fvheat/errors.hpp"
#include "fvheat/final_value.hpp"
#include "fvheat/io.hpp"
#include "fvheat/matrix_lab.hpp"
#include "fvheat/version.hpp"

using namespace fvheat;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

constexpr double kPi = std::numbers::pi;

int failures = 0;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

void report(int id, bool pass, const std::string& description, const std::string& details) {
    std::printf("%s  [%2d] %s (%s)\n", pass ? "PASS" : "FAIL", id, description.c_str(),
                details.c_str());
    if (!pass)
        ++failures;
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.4g", x);
    return buf;
}

SpectralCoeffs random_coeffs(const BasisPtr& basis, std::mt19937_64& rng, double decay = 0.0) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SpectralCoeffs c = zero_coeffs(basis);
    for (std::size_t k = 0; k < c.size(); ++k)
        c.values[k] = Complex(uni(rng), uni(rng)) * std::exp(-decay * basis->eigenvalues[k]);
    return c;
}

SourceTerm random_source(const BasisPtr& basis, const TimeGrid& grid, std::mt19937_64& rng,
                         double decay = 0.0) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SourceTerm f = SourceTerm::zero(basis, grid);
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        const double scale = std::exp(-decay * basis->eigenvalues[k]);
        for (std::size_t m = 0; m < grid.node_count(); ++m)
            f.at(k, m) = Complex(uni(rng), uni(rng)) * scale;
    }
    return f;
}

// --- criteria ----------------------------------------------------------------

void criterion_1_forward_exactness() {
    const auto start = Clock::now();
    const auto basis = interval_basis(IntervalDomain{kPi}, 32);
    SpectralCoeffs u0 = zero_coeffs(basis);
    u0.values[1] = Complex(1.0, 0.0);  // lambda_1 = 1
    const auto f = SourceTerm::zero(basis, TimeGrid::uniform(1.0, 16));
    const Trajectory traj = solve_forward(u0, f);
    const double elapsed = seconds_since(start);

    const double value = traj.at(1, 16).real();
    const double rel_err = std::abs(value - std::exp(-1.0)) / std::exp(-1.0);
    report(1, rel_err <= 1e-13 && elapsed < 0.1, "forward exactness: u(T) = e^{-1}",
           "rel err " + fmt(rel_err) + ", " + fmt(elapsed) + " s");
}

void criterion_2_yield_identity() {
    const auto start = Clock::now();
    const auto basis = interval_basis(IntervalDomain{kPi}, 24);
    std::mt19937_64 rng(202);
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto grid = TimeGrid::uniform(0.4 + 0.02 * rep, 5 + rep % 11);
        const SourceTerm f = random_source(basis, grid, rng);
        const SpectralCoeffs y = compute_yield(f);
        const Trajectory traj = solve_forward(zero_coeffs(basis), f);
        double diff = 0.0;
        for (std::size_t k = 0; k < basis->truncation(); ++k)
            diff += std::norm(y.values[k] - traj.at(k, grid.node_count() - 1));
        worst = std::max(worst, std::sqrt(diff) / source_l2_norm(f));
    }
    const double elapsed = seconds_since(start);
    report(2, worst <= 1e-12 && elapsed < 1.0,
           "yield identity over 50 random piecewise-linear sources",
           "worst rel defect " + fmt(worst) + ", " + fmt(elapsed) + " s");
}

void criterion_3_roundtrip() {
    const auto start = Clock::now();
    const auto basis = interval_basis(IntervalDomain{kPi}, 6);  // lambda_max T = 25
    const double T = 1.0;
    std::mt19937_64 rng(303);
    bool ok = true;
    double worst_node = 0.0, worst_terminal = 0.0;
    for (int rep = 0; rep < 100; ++rep) {
        const SpectralCoeffs u0 = random_coeffs(basis, rng);
        const SourceTerm f = random_source(basis, TimeGrid::uniform(T, 12), rng);
        const RoundTripReport r = roundtrip(u0, f);
        const double uT_norm = sobolev_norm(solve_forward(u0, f).terminal_state(),
                                            SobolevScale{0});
        worst_node = std::max(worst_node, r.max_node_residual / r.scale);
        worst_terminal = std::max(worst_terminal, r.terminal_residual / uT_norm);
        if (r.max_node_residual > r.amplification_ceiling * 1e-12 * r.scale)
            ok = false;
        if (r.terminal_residual > 1e-13 * uT_norm)
            ok = false;
    }
    const double elapsed = seconds_since(start);
    report(3, ok && elapsed < 5.0, "isomorphism round trip over 100 random cases",
           "R∘P node residual/scale " + fmt(worst_node) + ", P∘R terminal rel " +
               fmt(worst_terminal) + ", " + fmt(elapsed) + " s");
}

void criterion_4_compatibility_discrimination() {
    const auto start = Clock::now();
    const auto basis = interval_basis(IntervalDomain{kPi}, 16);  // lambda_k = k^2

    auto data_for = [&](double rate) {
        SpectralCoeffs u_T = zero_coeffs(basis);
        for (std::size_t k = 0; k < 16; ++k)
            u_T.values[k] = Complex(std::exp(-rate * basis->eigenvalues[k]), 0.0);
        return FinalData{u_T, SourceTerm::zero(basis, TimeGrid::uniform(1.0, 8))};
    };
    const CompatibilityReport good = check_compatibility(data_for(2.0), TargetSpace::Y1);
    const CompatibilityReport bad = check_compatibility(data_for(0.5), TargetSpace::Y1);
    const double elapsed = seconds_since(start);

    const bool ok = good.verdict == Verdict::COMPATIBLE && good.decay.determined &&
                    std::abs(good.decay.rho - 2.0) <= 0.01 &&
                    bad.verdict == Verdict::INCOMPATIBLE && bad.decay.determined &&
                    std::abs(bad.decay.rho - 0.5) <= 0.01 && elapsed < 1.0;
    report(4, ok, "compatibility discrimination on lambda_k = k^2",
           std::string(to_string(good.verdict)) + " rho=" + fmt(good.decay.rho) + " / " +
               to_string(bad.verdict) + " rho=" + fmt(bad.decay.rho) + ", " + fmt(elapsed) +
               " s");
}

void criterion_5_interpolation_norm() {
    const auto start = Clock::now();
    const QuadratureSpec quad;
    const double c_half = lions_magenes_constant(0.5, quad);
    const double target = 2.0 * std::log(2.0);
    bool ok = std::abs(c_half - target) <= 1e-8;

    const auto basis = make_custom_basis(
        {0.0, 0.3, 1.0, 2.5, 4.0, 9.0, 16.0, 25.0, 100.0, 400.0, 2500.0});
    std::mt19937_64 rng(505);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    const double chi = std::sqrt(target);
    for (int rep = 0; rep < 100; ++rep) {
        SpectralCoeffs v = zero_coeffs(basis);
        for (auto& z : v.values)
            z = Complex(uni(rng), uni(rng));
        const double lm = lions_magenes_norm(v, 0.5, quad);
        const double h1 = interpolation_half_norm(v);
        if (!(lm >= h1 * (1 - 1e-9) && lm <= chi * h1 * (1 + 1e-9)))
            ok = false;
    }
    const double elapsed = seconds_since(start);
    report(5, ok && elapsed < 1.0, "interpolation-norm equivalence and C(1/2) = 2 ln 2",
           "C(1/2) err " + fmt(std::abs(c_half - target)) + ", " + fmt(elapsed) + " s");
}

void criterion_6_instability_table() {
    const auto basis = interval_basis(IntervalDomain{kPi}, 8);
    const auto table = instability_table(basis, 1.0, 3);
    const double expected[3] = {std::exp(1.0), std::exp(4.0), std::exp(9.0)};
    bool ok = table.size() == 3;
    double worst_digits = 0.0, worst_check = 0.0;
    for (std::size_t i = 0; ok && i < 3; ++i) {
        const double rel = std::abs(table[i].amplification - expected[i]) / expected[i];
        worst_digits = std::max(worst_digits, rel);
        worst_check = std::max(worst_check, table[i].backward_check_rel_err);
        if (rel > 5e-7 || table[i].overflow)  // 7 significant digits
            ok = false;
        if (table[i].backward_check_rel_err > 1e-10)
            ok = false;
    }
    report(6, ok, "instability rows e^1, e^4, e^9 reproduced by backward solves",
           "row rel err " + fmt(worst_digits) + ", solve rel err " + fmt(worst_check));
}

void criterion_7_weyl() {
    // Interval: zero violations of |N(lambda) - sqrt(lambda)| <= 1 up to 1e4.
    const auto basis = interval_basis(IntervalDomain{kPi}, 110);  // lambda_max = 109^2 > 1e4
    std::size_t violations = 0;
    auto probe = [&](double lam) {
        if (lam < 0.0 || lam > 1e4)
            return;
        const WeylCount w = weyl_count(*basis, lam);
        if (std::abs(w.difference) > 1.0 + 1e-9)
            ++violations;
    };
    for (int i = 0; i <= 10000; ++i)
        probe(static_cast<double>(i));
    for (double ev : basis->eigenvalues) {
        probe(ev);
        probe(std::nextafter(ev, 0.0));
        probe(ev + 1e-9);
    }

    // Rectangle: report the fitted constant of |N - lambda/(4 pi)| <= C sqrt(lambda).
    const auto rect = rectangle_basis(RectangleDomain{1.0, 1.0}, 16, 16);
    double C = 0.0;
    for (int i = 1; i <= 1000; ++i) {
        const double lam = static_cast<double>(i);
        const WeylCount w = weyl_count(*rect, lam);
        C = std::max(C, std::abs(w.difference) / std::sqrt(lam));
    }
    const bool ok = violations == 0 && std::isfinite(C) && C > 0.0;
    report(7, ok, "Weyl bound: interval exact to +/-1, rectangle constant reported",
           "violations " + std::to_string(violations) + ", rectangle C " + fmt(C));
}

void criterion_8_logconvexity() {
    std::mt19937_64 rng(808);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_selfadjoint = [&](std::size_t n) {
        Eigen::MatrixXcd R(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                R(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::MatrixXcd H = Eigen::MatrixXcd::Identity(n, n) + 0.3 * (R + R.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
        const double m = es.eigenvalues().minCoeff();
        if (m < 0.1)
            H += (0.1 - m) * Eigen::MatrixXcd::Identity(n, n);
        return MatrixOperator{H};
    };
    auto random_vec = [&](std::size_t n) {
        Eigen::VectorXcd v(n);
        for (std::size_t i = 0; i < n; ++i)
            v(i) = Complex(gauss(rng), gauss(rng));
        return v.normalized().eval();
    };

    bool ok = true;
    double worst_defect_ratio = 0.0, worst_fd = 0.0;
    for (int rep = 0; rep < 20; ++rep) {
        const MatrixOperator op = random_selfadjoint(4);
        const Eigen::VectorXcd u0 = random_vec(4);
        const HeightCurve curve = height_curve(op, u0, TimeGrid::uniform(1.0, 24), true, 1e-4);
        const LogConvexityCheck check = logconvexity_check(curve);
        worst_defect_ratio = std::min(worst_defect_ratio, check.min_defect / check.scale);
        if (check.min_defect < -1e-9 * check.scale)
            ok = false;
        for (std::size_t m = 0; m < curve.t.size(); ++m) {
            if (std::abs(curve.dh[m]) > 1e-3) {
                const double rel = curve.fd_residual_dh[m] / std::abs(curve.dh[m]);
                worst_fd = std::max(worst_fd, rel);
                if (rel > 1e-6)
                    ok = false;
            }
            if (std::abs(curve.ddh[m]) > 1e-3) {
                const double rel = curve.fd_residual_ddh[m] / std::abs(curve.ddh[m]);
                worst_fd = std::max(worst_fd, rel);
                if (rel > 1e-6)
                    ok = false;
            }
        }
    }

    // Jordan fixture: sampled criterion minimum and located curve violation
    // must agree in sign.
    Eigen::MatrixXcd J(2, 2);
    J << 1, 1, 0, 1;
    SamplerSpec spec;
    spec.count = 1024;
    spec.seed = 3;
    spec.refine_rounds = 20;
    const CriterionResult crit = logconvexity_criterion_min(MatrixOperator{J}, spec);
    const HeightCurve jc =
        height_curve(MatrixOperator{J}, crit.argmin, TimeGrid::uniform(0.5, 16), false);
    const LogConvexityCheck jcheck = logconvexity_check(jc);
    const bool jordan_consistent =
        crit.min_value < 0.0 && !jcheck.log_convex && jcheck.min_defect < 0.0;
    if (!jordan_consistent)
        ok = false;

    report(8, ok, "log-convexity: 20 self-adjoint fixtures + Jordan detector agreement",
           "min defect/scale " + fmt(worst_defect_ratio) + ", worst FD rel " + fmt(worst_fd) +
               ", Jordan Q_min " + fmt(crit.min_value));
}

void criterion_9_matrix_semigroup() {
    const auto start = Clock::now();
    std::mt19937_64 rng(909);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto random_coercive = [&](std::size_t n) {
        Eigen::MatrixXcd R(n, n);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j)
                R(i, j) = Complex(gauss(rng), gauss(rng));
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Identity(n, n) + 0.25 * (R + R.adjoint()) +
                             0.2 * (R - R.adjoint());
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (A + A.adjoint()),
                                                           Eigen::EigenvaluesOnly);
        const double m = es.eigenvalues().minCoeff();
        if (m < 0.1)
            A += (0.1 - m) * Eigen::MatrixXcd::Identity(n, n);
        return MatrixOperator{A};
    };

    bool ok = true;

    // Translation trick on a random 4x4 generator.
    const MatrixOperator op4 = random_coercive(4);
    MatrixOperator gen4{(-op4.A).eval()};
    const TranslationCheck trans = translation_check(gen4, {1.0, 1.0}, 0.7);
    if (trans.defect_rel > 1e-12)
        ok = false;

    // Laplace identity on a random 3x3 coercive generator.
    const MatrixOperator op3 = random_coercive(3);
    MatrixOperator gen3{(-op3.A).eval()};
    const double lambda = coercivity_profile(op3).C3 + 1.0;
    const LaplaceCheck laplace = laplace_identity_check(gen3, {lambda, 0.0}, 40.0, 4001);
    if (laplace.defect > 1e-6)
        ok = false;

    // Injectivity probes stay strictly positive on all fixtures.
    double worst_min = std::numeric_limits<double>::infinity();
    {
        MatrixOperator gen{(-Eigen::MatrixXcd::Identity(2, 2)).eval()};
        Eigen::VectorXcd v(2), w(2);
        v << 1, 0;
        w << 0, 0;
        const auto probe = injectivity_probe(gen, v, w, TimeGrid::uniform(1.0, 10));
        worst_min = std::min(worst_min, probe.min_norm);
    }
    {
        Eigen::MatrixXcd N = Eigen::MatrixXcd::Zero(3, 3);
        N(0, 1) = 1.0;
        N(1, 2) = 1.0;
        MatrixOperator gen{(-Eigen::MatrixXcd::Identity(3, 3) + N).eval()};
        Eigen::VectorXcd v(3), w(3);
        for (int i = 0; i < 3; ++i) {
            v(i) = Complex(gauss(rng), gauss(rng));
            w(i) = Complex(gauss(rng), gauss(rng));
        }
        const auto probe = injectivity_probe(gen, v, w, TimeGrid::uniform(2.0, 20));
        worst_min = std::min(worst_min, probe.min_norm);
    }
    {
        const auto adv = advection_diffusion_builder(8, +1,
                                                     BoundaryCondition{BoundaryKind::dirichlet},
                                                     BoundaryCondition{BoundaryKind::neumann});
        MatrixOperator gen{(-adv.A).eval()};
        Eigen::VectorXcd v(8), w(8);
        for (int i = 0; i < 8; ++i) {
            v(i) = Complex(gauss(rng), gauss(rng));
            w(i) = Complex(gauss(rng), gauss(rng));
        }
        const auto probe = injectivity_probe(gen, v, w, TimeGrid::uniform(0.05, 16));
        worst_min = std::min(worst_min, probe.min_norm);
    }
    if (!(worst_min > 0.0))
        ok = false;

    const double elapsed = seconds_since(start);
    report(9, ok && elapsed < 10.0, "matrix semigroup checks (translation, Laplace, injectivity)",
           "translation rel " + fmt(trans.defect_rel) + ", Laplace defect " +
               fmt(laplace.defect) + ", min |e^{tA}d| " + fmt(worst_min) + ", " + fmt(elapsed) +
               " s");
}

void criterion_10_regularity_boundedness() {
    // Empirical c = max ||u||_{X1} / ||(f,u_T)||_{Y1} over forward-generated
    // batches, across basis refinements with a fixed smooth data profile.
    const double T = 0.005;  // keeps lambda_max * T <= 30 at N = 64
    auto c_for = [&](std::size_t N) {
        const auto basis = interval_basis(IntervalDomain{kPi}, N);
        std::mt19937_64 rng(1010);  // same seed: nested batches
        std::vector<std::pair<SpectralCoeffs, SourceTerm>> batch;
        batch.reserve(100);
        for (int rep = 0; rep < 100; ++rep) {
            batch.emplace_back(random_coeffs(basis, rng, 0.01),
                               random_source(basis, TimeGrid::uniform(T, 16), rng, 0.01));
        }
        return stability_report(batch).c_max;
    };
    const double c16 = c_for(16);
    const double c32 = c_for(32);
    const double c64 = c_for(64);
    const double lo = std::min({c16, c32, c64});
    const double hi = std::max({c16, c32, c64});
    const bool ok = std::isfinite(hi) && (hi - lo) / lo < 0.25;
    report(10, ok, "regularity-estimate constant finite and stable across N in {16,32,64}",
           "c = " + fmt(c16) + " / " + fmt(c32) + " / " + fmt(c64) + ", spread " +
               fmt((hi - lo) / lo));
}

void criterion_11_cli_determinism() {
    const fs::path cli = FVHEAT_CLI_PATH;
    const fs::path root = fs::temp_directory_path() / "fvheat_acceptance_cli";
    fs::remove_all(root);

    auto run_in = [&](const fs::path& dir, const std::string& args) {
        fs::create_directories(dir);
        fvheat::testfix::write_fixtures(dir);
        const std::string cmd = "cd '" + dir.string() + "' && '" + cli.string() + "' " + args +
                                " >stdout.txt 2>stderr.txt";
        const int status = std::system(cmd.c_str());
        return status != -1 && WIFEXITED(status) && WEXITSTATUS(status) == 0;
    };
    auto slurp = [](const fs::path& p) {
        std::ifstream in(p, std::ios::binary);
        return std::string((std::istreambuf_iterator<char>(in)), {});
    };

    bool ok = true;
    std::string detail;
    for (const auto& gc : fvheat::testfix::golden_cases()) {
        const fs::path a = root / (gc.name + "_a");
        const fs::path b = root / (gc.name + "_b");
        if (!run_in(a, gc.args) || !run_in(b, gc.args)) {
            ok = false;
            detail = gc.name + " failed to run";
            break;
        }
        for (const std::string& f : gc.outputs) {
            const std::string ca = slurp(a / f);
            if (ca.empty() || ca != slurp(b / f)) {
                ok = false;
                detail = gc.name + "/" + f + " differs";
            }
        }
    }
    if (ok)
        detail = std::to_string(fvheat::testfix::golden_cases().size()) +
                 " fixtures byte-identical";
    report(11, ok, "CLI determinism: two runs of every golden fixture", detail);
}

} // namespace

int main() {
    std::printf("acceptance suite (toolkit %s)\n", kVersion);
    criterion_1_forward_exactness();
    criterion_2_yield_identity();
    criterion_3_roundtrip();
    criterion_4_compatibility_discrimination();
    criterion_5_interpolation_norm();
    criterion_6_instability_table();
    criterion_7_weyl();
    criterion_8_logconvexity();
    criterion_9_matrix_semigroup();
    criterion_10_regularity_boundedness();
    criterion_11_cli_determinism();

    if (failures == 0) {
        std::printf("all 11 criteria passed\n");
        return 0;
    }
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
}
