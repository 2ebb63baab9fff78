#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fvheat/evolution.hpp"

namespace fvheat {

// Dense n x n complex matrix standing for a (possibly non-normal)
// Lax-Milgram operator.
struct MatrixOperator {
    Eigen::MatrixXcd A;

    std::size_t dim() const { return static_cast<std::size_t>(A.rows()); }
    void validate() const;
};

// Finite-dimensional coercivity data with V = H = Cⁿ:
//   |⟨Av,v⟩| <= C3 |v|²  and  Re⟨Av,v⟩ >= C4 |v|² - k |v|².
// When the Hermitian part has min eigenvalue m <= 0, the profile describes
// the operator shifted by (k+1)I with k = -m, so C4 = 1.  theta is the
// analyticity sector half-angle arccot(C3/C4).
struct CoercivityProfile {
    double C3 = 0.0;
    double C4 = 0.0;
    double k = 0.0;
    double theta = 0.0;
};

// Samples of the height function h(t) = |e^{-tA} u0| with its first two
// derivatives from the inner-product formulas
//   h' = -Re⟨Au,u⟩/|u|,
//   h'' = (Re⟨A²u,u⟩ + |Au|²)/|u| - (Re⟨Au,u⟩)²/|u|³,
// plus centered-difference cross-check residuals.
struct HeightCurve {
    std::vector<double> t;
    std::vector<double> h;
    std::vector<double> dh;
    std::vector<double> ddh;
    std::vector<double> fd_residual_dh;
    std::vector<double> fd_residual_ddh;
};

// e^{t M} by scaling-and-squaring with a diagonal Padé approximant (Eigen's
// matrix-exponential backend); callers pass the generator directly, so
// e^{-tA} is matrix_exponential(op, -t).  Refuses when t times the spectral
// abscissa exceeds the overflow budget of 300.
Eigen::MatrixXcd matrix_exponential(const MatrixOperator& op, double t);

// Largest real part of the spectrum.
double spectral_abscissa(const MatrixOperator& op);

CoercivityProfile coercivity_profile(const MatrixOperator& op);

// Height curve along the grid; u0 must be nonzero (the semigroup is
// injective, so h > 0 throughout).
HeightCurve height_curve(const MatrixOperator& op, const Eigen::VectorXcd& u0,
                         const TimeGrid& grid, bool with_fd_check = true, double fd_step = 1e-4);

struct SamplerSpec {
    std::size_t count = 2048;
    std::uint64_t seed = 1;
    std::size_t refine_rounds = 24;
    double tol = 1e-10;
};

struct CriterionResult {
    double min_value = 0.0;
    Eigen::VectorXcd argmin;
    bool holds = false;  // min >= -tol
    std::size_t samples = 0;
};

// Minimum over sampled unit vectors of
//   Q(x) = Re⟨A²x,x⟩ + |Ax|² - 2(Re⟨Ax,x⟩)²,
// the criterion whose nonnegativity is equivalent to log-convexity of every
// height curve.  Sampling plus local refinement, deterministic per seed; a
// negative minimum comes with the witnessing vector, a nonnegative one is a
// sampled verdict, not a proof.
CriterionResult logconvexity_criterion_min(const MatrixOperator& op, const SamplerSpec& spec);

// Smallest eigenvalue of the Hermitian matrix A*A - AA*.  gap >= 0 iff the
// matrix is hyponormal, which in finite dimension forces normality.
double hyponormality_gap(const MatrixOperator& op);

struct LogConvexityCheck {
    double min_defect = 0.0;  // min over nodes of h''h - (h')²
    std::size_t argmin_node = 0;
    double scale = 0.0;       // max over nodes of |h''h| + (h')²
    bool log_convex = false;  // min_defect >= -tol·scale
    std::vector<double> defects;
};

LogConvexityCheck logconvexity_check(const HeightCurve& curve, double tol = 1e-9);

struct SectorSamples {
    std::size_t n_radii = 25;
    std::size_t n_angles = 33;
    double r_min = 1e-2;
    double r_max = 1e3;
};

struct SectorCheck {
    double sup = 0.0;  // over clean samples of |λ-ω| ||(λI - A)^{-1}||
    std::size_t samples = 0;
    std::size_t near_singular = 0;  // flagged and excluded
    std::vector<std::complex<double>> flagged;
};

// Samples λ in ω + S_{θ+π/2} on a log-radial grid (plus λ = ω itself, which
// must be in the resolvent set) and estimates the sector-resolvent supremum.
SectorCheck sector_check(const MatrixOperator& generator, double omega, double theta,
                         const SectorSamples& samples = {});

struct LaplaceCheck {
    double defect = 0.0;            // ||∫₀^h e^{-tλ} e^{tM} dt - (λI-M)^{-1}||
    double truncation_bound = 0.0;  // analytic tail estimate
};

// Laplace-transform identity for the resolvent, by composite-Simpson matrix
// quadrature.  Requires Re λ past the spectral abscissa with
// horizon·(Re λ - abscissa) >= 30 so the tail is negligible.
LaplaceCheck laplace_identity_check(const MatrixOperator& generator, std::complex<double> lambda,
                                    double horizon, std::size_t steps);

// ||e^{tM} - e^{tμ} e^{t(M - μI)}||, absolute and relative to ||e^{tM}||.
struct TranslationCheck {
    double defect = 0.0;
    double defect_rel = 0.0;
};

TranslationCheck translation_check(const MatrixOperator& generator, std::complex<double> mu,
                                   double t);

struct InjectivityProbe {
    double min_norm = 0.0;  // min over nodes of |e^{tM}(v-w)|
    std::size_t argmin_node = 0;
    double lower_bound = 0.0;  // e^{-t ||M||} |v-w| at the attaining node
};

// Trajectories of two distinct states never meet: the sampled minimum is
// strictly positive and sits above the crude bound e^{-t||M||}|v-w|.
InjectivityProbe injectivity_probe(const MatrixOperator& generator, const Eigen::VectorXcd& v,
                                   const Eigen::VectorXcd& w, const TimeGrid& grid);

struct MatrixFvpResult {
    Eigen::VectorXcd u0;
    std::vector<Eigen::VectorXcd> trajectory;  // one state per grid node
    double kappa = 0.0;                        // ||e^{TA}|| ||e^{-TA}||
    double terminal_residual = 0.0;            // |u(T) - u_T|
};

// Matrix final value problem: u0 = e^{TA}(u_T - y_f) with y_f by matrix
// φ-quadrature over the piecewise-linear samples, then forward evolution.
MatrixFvpResult matrix_fvp_solve(const MatrixOperator& op, const Eigen::VectorXcd& u_T,
                                 const std::vector<Eigen::VectorXcd>& f_samples,
                                 const TimeGrid& grid);

enum class BoundaryKind { dirichlet, neumann, robin };

struct BoundaryCondition {
    BoundaryKind kind = BoundaryKind::dirichlet;
    double beta = 0.0;  // Robin coefficient in u' = beta·u at the boundary
};

// Finite-difference advection-diffusion operator -u'' ± u' on (0,1): n
// interior unknowns at x_i = i·h, h = 1/(n+1), second-order centered
// stencils, first-order one-sided boundary closures for Neumann/Robin
// (u_0 = u_1/(1+βh) on the left, mirrored on the right).  Mixed conditions
// make it genuinely non-normal.
MatrixOperator advection_diffusion_builder(std::size_t n, int sign, const BoundaryCondition& left,
                                           const BoundaryCondition& right);

// The closed advection part alone (same boundary elimination); the builder
// satisfies A₊ - A₋ = 2·advection_part exactly.
Eigen::MatrixXcd advection_part(std::size_t n, const BoundaryCondition& left,
                                const BoundaryCondition& right);

} // namespace fvheat
