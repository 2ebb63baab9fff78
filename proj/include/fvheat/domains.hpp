#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "fvheat/quadrature.hpp"
#include "fvheat/spectral.hpp"

namespace fvheat {

// Interval (0, L).  The n = 1 model geometry; eigendata are exact.
struct IntervalDomain {
    double length = 1.0;

    void validate() const;
};

// Rectangle (0, Lx) x (0, Ly).  Separable n = 2 geometry with exact tensor
// eigendata.  The corner violates the smooth-boundary hypothesis of the
// continuous theory; everything asserted here is purely spectral and
// unaffected (see README).
struct RectangleDomain {
    double Lx = 1.0;
    double Ly = 1.0;

    void validate() const;
};

// λ_k = (kπ/L)², e₀ = 1/√L, e_k = √(2/L)·cos(kπx/L), k = 0..N-1.
BasisPtr interval_basis(const IntervalDomain& domain, std::size_t N);

// λ_(p,q) = (pπ/Lx)² + (qπ/Ly)² over [0,Nx) x [0,Ny), sorted ascending with
// ties broken lexicographically by (p,q) for reproducible files.
BasisPtr rectangle_basis(const RectangleDomain& domain, std::size_t Nx, std::size_t Ny);

// Projection c_k = ∫ f ē_k dx by composite Simpson (tensorized on the
// rectangle).  The basis must have been generated from the same domain.
SpectralCoeffs analyze(const IntervalDomain& domain, const std::function<Complex(double)>& f,
                       const BasisPtr& basis, const QuadratureSpec& quad);
SpectralCoeffs analyze(const RectangleDomain& domain,
                       const std::function<Complex(double, double)>& f, const BasisPtr& basis,
                       const QuadratureSpec& quad);

// Same projection from uniform samples (odd count including both endpoints).
SpectralCoeffs analyze_samples(const IntervalDomain& domain, const std::vector<Complex>& samples,
                               const BasisPtr& basis);

// Pointwise partial sums Σ c_k e_k(x).  Points must lie in the closed domain.
std::vector<Complex> synthesize(const SpectralCoeffs& coeffs, const std::vector<double>& points);
std::vector<Complex> synthesize(const SpectralCoeffs& coeffs,
                                const std::vector<std::array<double, 2>>& points);

// Dirichlet form s(u,v) = Σ_k λ_k u_k v̄_k; satisfies
// s(v,v) = ||v||₁² - ||v||₀² exactly in the spectral realization.
Complex dirichlet_form(const SpectralCoeffs& u, const SpectralCoeffs& v);

struct WeylCount {
    std::size_t count = 0;         // N(λ) = #{j : λ_j <= λ}
    double leading_term = 0.0;     // (√λ/2π)^n ω_n |Ω|
    double difference = 0.0;       // count - leading_term
    bool truncation_limited = false;
};

// Eigenvalue counting function with the Weyl leading term.  Flagged
// truncation-limited when λ reaches past the retained spectrum.
WeylCount weyl_count(const SpectralBasis& basis, double lam);

// Max over boundary sample points of |∂_ν(partial sum)|.  Exact cosine modes
// give 0 up to roundoff; the value certifies the truncated synthesis honors
// the Neumann condition by construction.
double boundary_flux(const SpectralCoeffs& coeffs, std::size_t samples_per_edge = 33);

} // namespace fvheat
