#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <vector>

#include "fvheat/spectral.hpp"

namespace fvheat {

// Strictly increasing time nodes 0 = t₀ < t₁ < … < t_M = T.
struct TimeGrid {
    std::vector<double> nodes;

    double horizon() const { return nodes.back(); }
    std::size_t node_count() const noexcept { return nodes.size(); }
    std::size_t step_count() const noexcept { return nodes.size() - 1; }

    void validate() const;
    static TimeGrid uniform(double T, std::size_t steps);
};

// Per-mode time samples of the source f(t), interpreted as piecewise linear
// in t.  Mode-major storage: sample(k, m) = samples[k*(M+1) + m].
struct SourceTerm {
    BasisPtr basis;
    TimeGrid grid;
    std::vector<Complex> samples;

    Complex at(std::size_t mode, std::size_t node) const {
        return samples[mode * grid.node_count() + node];
    }
    Complex& at(std::size_t mode, std::size_t node) {
        return samples[mode * grid.node_count() + node];
    }

    void validate() const;
    static SourceTerm zero(BasisPtr basis, TimeGrid grid);
};

enum class Provenance { forward, backward };

// Per-mode states u_k(t_m) on the grid, mode-major like SourceTerm.  Backward
// runs may carry per-mode overflow flags.
struct Trajectory {
    BasisPtr basis;
    TimeGrid grid;
    std::vector<Complex> states;
    Provenance provenance = Provenance::forward;
    std::vector<std::uint8_t> mode_overflow;
    std::uint64_t source_hash = 0;

    Complex at(std::size_t mode, std::size_t node) const {
        return states[mode * grid.node_count() + node];
    }
    Complex& at(std::size_t mode, std::size_t node) {
        return states[mode * grid.node_count() + node];
    }
    SpectralCoeffs state_at(std::size_t node) const;
    SpectralCoeffs terminal_state() const { return state_at(grid.node_count() - 1); }

    bool any_overflow() const;
    void validate() const;
};

// φ₁(z) = (e^z - 1)/z and φ₂(z) = (e^z - 1 - z)/z².  Truncated Taylor series
// below |z| = 1e-3 to avoid cancellation; the closed forms are evaluated in
// extended precision so the two branches agree at the crossover.
double phi1(double z);
double phi2(double z);

// One exact step of u' = -λu + f with f linear on [t_m, t_m + dt]:
//   u⁺ = e^{-λ dt} u + dt·(φ₁(-λ dt) f_m + φ₂(-λ dt)(f_{m+1} - f_m)).
inline Complex phi_step(double lambda, double dt, Complex u, Complex fm, Complex fp) {
    const double z = -lambda * dt;
    return std::exp(z) * u + dt * (phi1(z) * fm + phi2(z) * (fp - fm));
}

// FNV-1a over grid nodes and samples; used to tie trajectories to the source
// they were produced with.
std::uint64_t source_fingerprint(const SourceTerm& f);

// Exact per-mode exponential integration of u' + Au = f, u(0) = u0 (no time
// discretization error for piecewise-linear-in-time sources).
Trajectory solve_forward(const SpectralCoeffs& u0, const SourceTerm& f);

// y_f = ∫₀^T e^{-(T-t)A} f(t) dt, accumulated by the same φ-recurrence as
// solve_forward; equals solve_forward(0, f) at T, which tests use as the
// cross-check.
SpectralCoeffs compute_yield(const SourceTerm& f);

struct DerivativeField {
    BasisPtr basis;
    TimeGrid grid;
    std::vector<Complex> values;  // mode-major
    bool provenance_warning = false;

    Complex at(std::size_t mode, std::size_t node) const {
        return values[mode * grid.node_count() + node];
    }
};

// u'(t_m) = f(t_m) - λ_k u_k(t_m), exact from the ODE rather than finite
// differences.  Sets the warning flag when the trajectory was produced with
// a different source.
DerivativeField time_derivative(const Trajectory& traj, const SourceTerm& f);

// ( ∫ ||u||₁² dt + sup_m ||u(t_m)||₀² + ∫ ||u'||_{-1}² dt )^{1/2}.
// Time integrals by trapezoid on the grid; the sup is the max over nodes and
// therefore a lower bound of the true sup.
double norm_X0(const Trajectory& traj, const SourceTerm& f);

// Same with the scales shifted by one: ||·||₂, sup ||·||₁, ||u'||₀.
double norm_X1(const Trajectory& traj, const SourceTerm& f);

// Reduced equivalent norm ( ∫ ||u||₁² dt + ∫ ||u'||_{-1}² dt )^{1/2}; the
// equivalence constants with norm_X0 depend on the geometry and T and are
// only reported, never asserted.
double norm_X0_equivalent(const Trajectory& traj, const SourceTerm& f);

struct HolderResult {
    double value = 0.0;
    std::size_t node_s = 0;
    std::size_t node_t = 0;
};

// sup over node pairs of ||f(t) - f(s)||₀ · |t - s|^{-σ}, with the attaining
// pair.
HolderResult holder_seminorm(const SourceTerm& f, double sigma);

// ||f||_{L₂(0,T;H)} by trapezoid; the data-norm ingredient for estimates.
double source_l2_norm(const SourceTerm& f);

} // namespace fvheat
