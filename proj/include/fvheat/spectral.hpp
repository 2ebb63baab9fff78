#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "fvheat/quadrature.hpp"

namespace fvheat {

using Complex = std::complex<double>;

enum class DomainKind { interval, rectangle, custom };

// Mode identifier: a single wavenumber on the interval (q < 0), a pair on the
// rectangle.
struct ModeLabel {
    int p = 0;
    int q = -1;

    std::string str() const;
};

// Ordered Neumann-Laplacian eigenvalues with the generating geometry and the
// truncation level.  This is the discrete stand-in for the operator -Δ_N: all
// semigroup and norm operations act diagonally on coefficient sequences over
// one of these bases.
//
// Invariants: eigenvalues ascending, finite, >= 0; at least one mode.  Bases
// produced by the interval/rectangle builders additionally have λ₀ = 0
// (constant mode).
struct SpectralBasis {
    std::vector<double> eigenvalues;
    std::vector<ModeLabel> mode_labels;
    DomainKind kind = DomainKind::custom;
    std::string domain_tag;
    double L = 0.0;        // interval length, when kind == interval
    double Lx = 0.0;       // rectangle sides, when kind == rectangle
    double Ly = 0.0;

    std::size_t truncation() const noexcept { return eigenvalues.size(); }
    double lambda_max() const { return eigenvalues.back(); }

    void validate() const;
};

using BasisPtr = std::shared_ptr<const SpectralBasis>;

// Basis with user-supplied eigenvalues (sorted ascending, >= 0).
BasisPtr make_custom_basis(std::vector<double> eigenvalues);

// Finite coefficient sequence in a SpectralBasis.  One object represents
// vectors of H, V, D(A) and V*; the scale parameter of the norm picks the
// space.
struct SpectralCoeffs {
    BasisPtr basis;
    std::vector<Complex> values;

    std::size_t size() const noexcept { return values.size(); }
    void validate() const;
};

SpectralCoeffs make_coeffs(BasisPtr basis, std::vector<Complex> values);
SpectralCoeffs zero_coeffs(BasisPtr basis);

// Throws std::invalid_argument unless both sequences live on the same basis
// (same object or identical eigenvalue lists).
void check_same_basis(const SpectralCoeffs& a, const SpectralCoeffs& b);
bool same_basis(const SpectralBasis& a, const SpectralBasis& b);

// Selects the norm ||v||_s = (Σ_k (1+λ_k)^s |c_k|²)^{1/2} on the Hilbert
// scale of 1 - Δ_N:  s = -1 is the dual norm on V* = H₀^{-1}, s = 0 the
// pivot L₂ norm, s = 1 the form-domain H¹ norm, s = 2 the H² part.
struct SobolevScale {
    int s;

    explicit SobolevScale(int scale);
};

inline const int kScaleDual = -1;
inline const int kScalePivot = 0;
inline const int kScaleForm = 1;
inline const int kScaleDomain = 2;

// Exponential decay-rate fit over the coefficient tail: ln|c_k| ≈ α - ρ·λ_k.
// `determined` is false when fewer than three usable modes exist.  The fit is
// the quantitative stand-in for membership in D(e^{tA}): v is judged inside
// when ρ >= t.
struct DecayEstimate {
    double rho = 0.0;
    double fit_residual = 0.0;
    bool determined = false;
    std::size_t first_mode = 0;
    std::size_t last_mode = 0;
    std::size_t modes_used = 0;
};

enum class OverflowPolicy { fail, zero, saturate };

// Result of applying the inverse semigroup: values plus per-mode overflow
// flags (policy zero/saturate only; policy fail throws instead).
struct BackwardResult {
    SpectralCoeffs coeffs;
    std::vector<std::uint8_t> overflow;

    bool any_overflow() const;
    std::vector<std::size_t> flagged_modes() const;
};

// e^{-tA}: c_k -> e^{-λ_k t} c_k.  Requires t >= 0; the inverse direction is
// a distinct operation.  Norm non-increasing in every SobolevScale.
SpectralCoeffs apply_forward_semigroup(const SpectralCoeffs& v, double t);

// e^{+tA}: c_k -> e^{+λ_k t} c_k for t > 0.  Modes whose exponent
// λ_k t + ln|c_k| exceeds the double range are handled per policy; silent
// saturation would fabricate compatible-looking data, so the default in all
// drivers is fail.
BackwardResult apply_backward_semigroup(const SpectralCoeffs& v, double t, OverflowPolicy policy);

// (Σ_k (1+λ_k)^s |c_k|²)^{1/2}; summation runs in ascending mode order.
double sobolev_norm(const SpectralCoeffs& v, SobolevScale s);

// Graph norm of D(A): (Σ_k (1+λ_k²)|c_k|²)^{1/2} = (|v|² + |Av|²)^{1/2}.
double graph_norm_DA(const SpectralCoeffs& v);

// Fixed realization of the interpolation space [D(A),H]_{1/2}: the s = 1
// norm.  Valid because [D(-Δ_N),L₂]_{1/2} = H¹; one member of the
// equivalence class of interpolation norms.
double interpolation_half_norm(const SpectralCoeffs& v);

// C(θ) = ∫₀^∞ s^{2θ-3} (1-e^{-s})² ds, by adaptive quadrature at the
// spec'd relative tolerance.  Diverges at θ = 0 and θ = 1.
double lions_magenes_constant(double theta, const QuadratureSpec& quad);

// Semigroup interpolation norm
//   ( ||a||₀² + Σ_k C(θ) λ_k^{2-2θ} |a_k|² )^{1/2},
// the per-mode reduction of ||a||_Y² + ∫₀^∞ t^{2θ-1} ||(e^{tA₀}a - a)/t||² dt
// for the self-adjoint diagonal generator A₀ = -A.  λ_k = 0 modes contribute
// only through ||a||₀.
double lions_magenes_norm(const SpectralCoeffs& a, double theta, const QuadratureSpec& quad);

// Least-squares fit of ln|c_k| against λ_k over the trailing
// ceil(tail_fraction·N) modes with c_k ≠ 0.
DecayEstimate estimate_decay_rate(const SpectralCoeffs& v, double tail_fraction);

} // namespace fvheat
