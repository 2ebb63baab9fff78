#include "fvheat/matrix_lab.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>

#include <unsupported/Eigen/MatrixFunctions>

#include "fvheat/errors.hpp"

namespace fvheat {

namespace {

using Eigen::MatrixXcd;
using Eigen::VectorXcd;
using CD = std::complex<double>;

constexpr double kAbscissaBudget = 300.0;

double operator_norm(const MatrixXcd& M) {
    return M.jacobiSvd().singularValues()(0);
}

double smallest_singular_value(const MatrixXcd& M) {
    const auto sv = M.jacobiSvd().singularValues();
    return sv(sv.size() - 1);
}

// Re⟨Mx, x⟩ in the mathematicians' convention ⟨a,b⟩ = Σ a_i conj(b_i).
double re_inner(const VectorXcd& a, const VectorXcd& b) {
    return (b.adjoint() * a)(0, 0).real();
}

// φ₁ and φ₂ of a matrix via one exponential of the 3n x 3n block matrix
//   [[Z, I, 0], [0, 0, I], [0, 0, 0]]  →  top row [e^Z, φ₁(Z), φ₂(Z)].
struct MatrixPhis {
    MatrixXcd expZ, phi1, phi2;
};

MatrixPhis matrix_phis(const MatrixXcd& Z) {
    const Eigen::Index n = Z.rows();
    MatrixXcd W = MatrixXcd::Zero(3 * n, 3 * n);
    W.topLeftCorner(n, n) = Z;
    W.block(0, n, n, n).setIdentity();
    W.block(n, 2 * n, n, n).setIdentity();
    const MatrixXcd E = W.exp();
    return MatrixPhis{E.topLeftCorner(n, n), E.block(0, n, n, n), E.block(0, 2 * n, n, n)};
}

} // namespace

void MatrixOperator::validate() const {
    if (A.rows() < 1 || A.rows() != A.cols())
        throw std::invalid_argument("MatrixOperator: matrix must be square with n >= 1");
    if (!A.allFinite())
        throw std::invalid_argument("MatrixOperator: entries must be finite");
}

double spectral_abscissa(const MatrixOperator& op) {
    op.validate();
    Eigen::ComplexEigenSolver<MatrixXcd> es(op.A, false);
    return es.eigenvalues().real().maxCoeff();
}

Eigen::MatrixXcd matrix_exponential(const MatrixOperator& op, double t) {
    op.validate();
    if (!std::isfinite(t))
        throw std::invalid_argument("matrix_exponential: t must be finite");
    const double budget = t * spectral_abscissa(op);
    if (budget > kAbscissaBudget) {
        std::ostringstream msg;
        msg << "matrix_exponential: t * abscissa = " << budget << " exceeds the overflow budget";
        throw OverflowError(msg.str(), {});
    }
    return (t * op.A).exp();
}

CoercivityProfile coercivity_profile(const MatrixOperator& op) {
    op.validate();
    CoercivityProfile profile;
    profile.C3 = operator_norm(op.A);

    const MatrixXcd H = 0.5 * (op.A + op.A.adjoint());
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(H, Eigen::EigenvaluesOnly);
    const double m = es.eigenvalues().minCoeff();
    profile.k = std::max(0.0, -m);
    // Shift by (k+1)I when the Hermitian part is not positive: the shifted
    // operator is V-elliptic with constant exactly 1.
    profile.C4 = m > 0.0 ? m : 1.0;
    profile.theta = std::atan2(profile.C4, profile.C3);  // arccot(C3/C4)
    return profile;
}

HeightCurve height_curve(const MatrixOperator& op, const VectorXcd& u0, const TimeGrid& grid,
                         bool with_fd_check, double fd_step) {
    op.validate();
    grid.validate();
    if (u0.size() != op.A.rows())
        throw std::invalid_argument("height_curve: u0 dimension mismatch");
    if (u0.norm() == 0.0)
        throw std::invalid_argument("height_curve: u0 must be nonzero");

    const std::size_t nodes = grid.node_count();
    HeightCurve curve;
    curve.t = grid.nodes;
    curve.h.resize(nodes);
    curve.dh.resize(nodes);
    curve.ddh.resize(nodes);
    if (with_fd_check) {
        curve.fd_residual_dh.resize(nodes);
        curve.fd_residual_ddh.resize(nodes);
    }

    auto height = [&](double t) { return (matrix_exponential(op, -t) * u0).norm(); };

    for (std::size_t m = 0; m < nodes; ++m) {
        const double t = grid.nodes[m];
        const VectorXcd u = matrix_exponential(op, -t) * u0;
        const VectorXcd Au = op.A * u;
        const VectorXcd AAu = op.A * Au;
        const double nu = u.norm();
        const double re_Au_u = re_inner(Au, u);
        curve.h[m] = nu;
        curve.dh[m] = -re_Au_u / nu;
        curve.ddh[m] =
            (re_inner(AAu, u) + Au.squaredNorm()) / nu - re_Au_u * re_Au_u / (nu * nu * nu);
        if (with_fd_check) {
            const double h0 = curve.h[m];
            // At t = 0 a centered stencil would leave the domain; use
            // one-sided second-order differences there.
            if (t - fd_step >= 0.0) {
                const double hp = height(t + fd_step);
                const double hm = height(t - fd_step);
                curve.fd_residual_dh[m] = std::abs((hp - hm) / (2.0 * fd_step) - curve.dh[m]);
                curve.fd_residual_ddh[m] =
                    std::abs((hp - 2.0 * h0 + hm) / (fd_step * fd_step) - curve.ddh[m]);
            } else {
                const double h1 = height(t + fd_step);
                const double h2 = height(t + 2.0 * fd_step);
                const double h3 = height(t + 3.0 * fd_step);
                curve.fd_residual_dh[m] =
                    std::abs((-1.5 * h0 + 2.0 * h1 - 0.5 * h2) / fd_step - curve.dh[m]);
                curve.fd_residual_ddh[m] = std::abs(
                    (2.0 * h0 - 5.0 * h1 + 4.0 * h2 - h3) / (fd_step * fd_step) - curve.ddh[m]);
            }
        }
    }
    return curve;
}

CriterionResult logconvexity_criterion_min(const MatrixOperator& op, const SamplerSpec& spec) {
    op.validate();
    if (spec.count == 0)
        throw std::invalid_argument("logconvexity_criterion_min: sample count must be positive");

    const Eigen::Index n = op.A.rows();
    std::mt19937_64 rng(spec.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);

    auto random_vec = [&]() {
        VectorXcd x(n);
        for (Eigen::Index i = 0; i < n; ++i)
            x(i) = CD(gauss(rng), gauss(rng));
        return x;
    };
    auto Q = [&](const VectorXcd& x) {
        const VectorXcd Ax = op.A * x;
        const VectorXcd AAx = op.A * Ax;
        const double re = re_inner(Ax, x);
        return re_inner(AAx, x) + Ax.squaredNorm() - 2.0 * re * re;
    };

    CriterionResult result;
    result.samples = spec.count * (1 + spec.refine_rounds);

    VectorXcd best = random_vec().normalized();
    double best_q = Q(best);
    for (std::size_t i = 1; i < spec.count; ++i) {
        const VectorXcd x = random_vec().normalized();
        const double q = Q(x);
        if (q < best_q) {
            best_q = q;
            best = x;
        }
    }
    double step = 0.5;
    for (std::size_t round = 0; round < spec.refine_rounds; ++round) {
        for (std::size_t i = 0; i < spec.count; ++i) {
            const VectorXcd x = (best + step * random_vec()).normalized();
            const double q = Q(x);
            if (q < best_q) {
                best_q = q;
                best = x;
            }
        }
        step *= 0.5;
    }

    result.min_value = best_q;
    result.argmin = best;
    result.holds = best_q >= -spec.tol;
    return result;
}

double hyponormality_gap(const MatrixOperator& op) {
    op.validate();
    const MatrixXcd C = op.A.adjoint() * op.A - op.A * op.A.adjoint();
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es(C, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

LogConvexityCheck logconvexity_check(const HeightCurve& curve, double tol) {
    if (curve.h.empty())
        throw std::invalid_argument("logconvexity_check: empty curve");

    LogConvexityCheck check;
    check.defects.resize(curve.h.size());
    check.min_defect = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < curve.h.size(); ++m) {
        if (!(curve.h[m] > 0.0))
            throw std::invalid_argument("logconvexity_check: curve must be strictly positive");
        const double defect = curve.ddh[m] * curve.h[m] - curve.dh[m] * curve.dh[m];
        check.defects[m] = defect;
        check.scale = std::max(check.scale,
                               std::abs(curve.ddh[m] * curve.h[m]) + curve.dh[m] * curve.dh[m]);
        if (defect < check.min_defect) {
            check.min_defect = defect;
            check.argmin_node = m;
        }
    }
    if (check.scale == 0.0)
        check.scale = 1.0;
    check.log_convex = check.min_defect >= -tol * check.scale;
    return check;
}

SectorCheck sector_check(const MatrixOperator& generator, double omega, double theta,
                         const SectorSamples& samples) {
    generator.validate();
    if (!(theta > 0.0 && theta < 0.5 * std::numbers::pi))
        throw std::invalid_argument("sector_check: theta must lie in (0, pi/2)");
    if (samples.n_radii < 2 || samples.n_angles < 3 || !(samples.r_min > 0.0) ||
        !(samples.r_max > samples.r_min))
        throw std::invalid_argument("sector_check: bad sample grid");

    const Eigen::Index n = generator.A.rows();
    const MatrixXcd I = MatrixXcd::Identity(n, n);
    const double scale = std::max(1.0, operator_norm(generator.A));
    const double half_angle = theta + 0.5 * std::numbers::pi;

    SectorCheck check;
    auto probe = [&](CD lambda, bool count_sup) {
        const MatrixXcd R = lambda * I - generator.A;
        const double sigma_min = smallest_singular_value(R);
        ++check.samples;
        if (sigma_min < 1e-10 * std::max(scale, std::abs(lambda))) {
            ++check.near_singular;
            check.flagged.push_back(lambda);
            return;
        }
        if (count_sup)
            check.sup = std::max(check.sup, std::abs(lambda - CD(omega, 0.0)) / sigma_min);
    };

    // ω itself must belong to the resolvent set; its |λ-ω| weight is zero so
    // it only contributes the singularity check.
    probe(CD(omega, 0.0), false);

    const double log_rmin = std::log(samples.r_min);
    const double log_rmax = std::log(samples.r_max);
    for (std::size_t i = 0; i < samples.n_radii; ++i) {
        const double r = std::exp(log_rmin + (log_rmax - log_rmin) * static_cast<double>(i) /
                                                 static_cast<double>(samples.n_radii - 1));
        for (std::size_t j = 0; j < samples.n_angles; ++j) {
            const double frac =
                2.0 * static_cast<double>(j) / static_cast<double>(samples.n_angles - 1) - 1.0;
            const double phi = 0.999 * half_angle * frac;
            probe(CD(omega, 0.0) + std::polar(r, phi), true);
        }
    }
    return check;
}

LaplaceCheck laplace_identity_check(const MatrixOperator& generator, CD lambda, double horizon,
                                    std::size_t steps) {
    generator.validate();
    if (steps < 3 || steps % 2 == 0)
        throw std::invalid_argument("laplace_identity_check: steps must be odd and >= 3");
    const double abscissa = spectral_abscissa(generator);
    const double gap = lambda.real() - abscissa;
    if (!(gap > 0.0))
        throw std::invalid_argument("laplace_identity_check: Re(lambda) must exceed the abscissa");
    if (!(horizon * gap >= 30.0))
        throw std::invalid_argument(
            "laplace_identity_check: horizon*(Re lambda - abscissa) must be >= 30");

    const Eigen::Index n = generator.A.rows();
    const MatrixXcd I = MatrixXcd::Identity(n, n);
    const double h = horizon / static_cast<double>(steps - 1);

    // March e^{t(M - λI)} by repeated multiplication with the step
    // propagator; Simpson weights 1,4,2,...,4,1.
    const MatrixXcd Estep = (h * (generator.A - lambda * I)).exp();
    MatrixXcd Et = I;
    MatrixXcd acc = MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < steps; ++i) {
        const double w = (i == 0 || i + 1 == steps) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        acc += w * Et;
        if (i + 1 < steps)
            Et = Estep * Et;
    }
    acc *= h / 3.0;

    const MatrixXcd resolvent = (lambda * I - generator.A).partialPivLu().solve(I);

    LaplaceCheck check;
    check.defect = operator_norm(acc - resolvent);
    check.truncation_bound = operator_norm(Et) / gap;
    return check;
}

TranslationCheck translation_check(const MatrixOperator& generator, CD mu, double t) {
    generator.validate();
    const Eigen::Index n = generator.A.rows();
    const MatrixXcd E = matrix_exponential(generator, t);
    const MatrixXcd shifted =
        std::exp(t * mu) * (t * (generator.A - mu * MatrixXcd::Identity(n, n))).exp();
    TranslationCheck check;
    check.defect = operator_norm(E - shifted);
    check.defect_rel = check.defect / operator_norm(E);
    return check;
}

InjectivityProbe injectivity_probe(const MatrixOperator& generator, const VectorXcd& v,
                                   const VectorXcd& w, const TimeGrid& grid) {
    generator.validate();
    grid.validate();
    if (v.size() != generator.A.rows() || w.size() != generator.A.rows())
        throw std::invalid_argument("injectivity_probe: vector dimension mismatch");
    const VectorXcd d0 = v - w;
    if (d0.norm() == 0.0)
        throw std::invalid_argument("injectivity_probe: v and w must differ");

    const double op_norm = operator_norm(generator.A);
    InjectivityProbe probe;
    probe.min_norm = std::numeric_limits<double>::infinity();
    for (std::size_t m = 0; m < grid.node_count(); ++m) {
        const double t = grid.nodes[m];
        const double norm = (matrix_exponential(generator, t) * d0).norm();
        if (norm < probe.min_norm) {
            probe.min_norm = norm;
            probe.argmin_node = m;
            probe.lower_bound = std::exp(-t * op_norm) * d0.norm();
        }
    }
    return probe;
}

MatrixFvpResult matrix_fvp_solve(const MatrixOperator& op, const VectorXcd& u_T,
                                 const std::vector<VectorXcd>& f_samples, const TimeGrid& grid) {
    op.validate();
    grid.validate();
    if (u_T.size() != op.A.rows())
        throw std::invalid_argument("matrix_fvp_solve: u_T dimension mismatch");
    if (f_samples.size() != grid.node_count())
        throw std::invalid_argument("matrix_fvp_solve: one source sample per grid node required");
    for (const VectorXcd& f : f_samples)
        if (f.size() != op.A.rows())
            throw std::invalid_argument("matrix_fvp_solve: source sample dimension mismatch");

    const double T = grid.horizon();
    const double budget = T * spectral_abscissa(op);
    if (budget > kAbscissaBudget) {
        std::ostringstream msg;
        msg << "matrix_fvp_solve: T * abscissa = " << budget << " exceeds the overflow budget";
        throw OverflowError(msg.str(), {});
    }

    // Step operators cached per distinct step size.
    std::map<double, MatrixPhis> cache;
    auto phis_for = [&](double dt) -> const MatrixPhis& {
        auto it = cache.find(dt);
        if (it == cache.end())
            it = cache.emplace(dt, matrix_phis(-dt * op.A)).first;
        return it->second;
    };

    const Eigen::Index n = op.A.rows();
    auto conv_step = [&](const VectorXcd& u, std::size_t m) {
        const double dt = grid.nodes[m + 1] - grid.nodes[m];
        const MatrixPhis& P = phis_for(dt);
        return (P.expZ * u + dt * (P.phi1 * f_samples[m] + P.phi2 * (f_samples[m + 1] - f_samples[m])))
            .eval();
    };

    // Yield y_f = ∫₀^T e^{-(T-t)A} f(t) dt.
    VectorXcd y = VectorXcd::Zero(n);
    for (std::size_t m = 0; m + 1 < grid.node_count(); ++m)
        y = conv_step(y, m);

    MatrixFvpResult result;
    const MatrixXcd E_T = (T * op.A).exp();
    const MatrixXcd E_mT = (-T * op.A).exp();
    result.kappa = operator_norm(E_T) * operator_norm(E_mT);
    result.u0 = E_T * (u_T - y);

    result.trajectory.resize(grid.node_count());
    result.trajectory[0] = result.u0;
    for (std::size_t m = 0; m + 1 < grid.node_count(); ++m)
        result.trajectory[m + 1] = conv_step(result.trajectory[m], m);
    result.terminal_residual = (result.trajectory.back() - u_T).norm();
    return result;
}

namespace {

// Boundary elimination weight: the ghost value is `weight` times the
// adjacent interior unknown.
double closure_weight(const BoundaryCondition& bc, double h) {
    switch (bc.kind) {
        case BoundaryKind::dirichlet: return 0.0;
        case BoundaryKind::neumann: return 1.0;
        case BoundaryKind::robin: return 1.0 / (1.0 + bc.beta * h);
    }
    return 0.0;
}

} // namespace

Eigen::MatrixXcd advection_part(std::size_t n, const BoundaryCondition& left,
                                const BoundaryCondition& right) {
    if (n < 3)
        throw std::invalid_argument("advection_part: n must be >= 3");
    const double h = 1.0 / static_cast<double>(n + 1);
    const double c = 1.0 / (2.0 * h);
    MatrixXcd C = MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        if (i > 0)
            C(i, i - 1) -= c;
        if (i + 1 < n)
            C(i, i + 1) += c;
    }
    C(0, 0) -= c * closure_weight(left, h);
    C(n - 1, n - 1) += c * closure_weight(right, h);
    return C;
}

MatrixOperator advection_diffusion_builder(std::size_t n, int sign, const BoundaryCondition& left,
                                           const BoundaryCondition& right) {
    if (n < 3)
        throw std::invalid_argument("advection_diffusion_builder: n must be >= 3");
    if (sign != 1 && sign != -1)
        throw std::invalid_argument("advection_diffusion_builder: sign must be +1 or -1");

    const double h = 1.0 / static_cast<double>(n + 1);
    const double d = 1.0 / (h * h);
    MatrixXcd D = MatrixXcd::Zero(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        D(i, i) = 2.0 * d;
        if (i > 0)
            D(i, i - 1) -= d;
        if (i + 1 < n)
            D(i, i + 1) -= d;
    }
    D(0, 0) -= d * closure_weight(left, h);
    D(n - 1, n - 1) -= d * closure_weight(right, h);

    MatrixOperator op;
    op.A = D + static_cast<double>(sign) * advection_part(n, left, right);
    return op;
}

} // namespace fvheat
