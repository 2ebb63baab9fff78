#include "fvheat/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <stdexcept>

namespace fvheat {

namespace {

bool finite(const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

double trapezoid(const TimeGrid& grid, const std::vector<double>& g) {
    double acc = 0.0;
    for (std::size_t m = 0; m + 1 < grid.node_count(); ++m)
        acc += 0.5 * (grid.nodes[m + 1] - grid.nodes[m]) * (g[m] + g[m + 1]);
    return acc;
}

// Squared Sobolev weight (1+λ)^s for s in {-1,0,1,2}.
double scale_weight(double lambda, int s) {
    const double w = 1.0 + lambda;
    switch (s) {
        case -1: return 1.0 / w;
        case 0:  return 1.0;
        case 1:  return w;
        default: return w * w;
    }
}

} // namespace

void TimeGrid::validate() const {
    if (nodes.size() < 2)
        throw std::invalid_argument("TimeGrid: needs at least two nodes");
    if (nodes.front() != 0.0)
        throw std::invalid_argument("TimeGrid: first node must be 0");
    for (std::size_t m = 0; m + 1 < nodes.size(); ++m)
        if (!(nodes[m] < nodes[m + 1]))
            throw std::invalid_argument("TimeGrid: nodes must be strictly increasing");
    if (!std::isfinite(nodes.back()) || !(nodes.back() > 0.0))
        throw std::invalid_argument("TimeGrid: horizon must be finite and positive");
}

TimeGrid TimeGrid::uniform(double T, std::size_t steps) {
    if (!(T > 0.0) || steps < 1)
        throw std::invalid_argument("TimeGrid::uniform: T > 0 and steps >= 1 required");
    TimeGrid grid;
    grid.nodes.resize(steps + 1);
    for (std::size_t m = 0; m <= steps; ++m)
        grid.nodes[m] = T * static_cast<double>(m) / static_cast<double>(steps);
    grid.nodes.back() = T;
    grid.validate();
    return grid;
}

void SourceTerm::validate() const {
    if (!basis)
        throw std::invalid_argument("SourceTerm: missing basis");
    grid.validate();
    if (samples.size() != basis->truncation() * grid.node_count())
        throw std::invalid_argument("SourceTerm: sample dimensions inconsistent with basis/grid");
    for (const Complex& c : samples)
        if (!finite(c))
            throw std::invalid_argument("SourceTerm: entries must be finite");
}

SourceTerm SourceTerm::zero(BasisPtr basis, TimeGrid grid) {
    grid.validate();
    const std::size_t n = basis->truncation() * grid.node_count();
    return SourceTerm{std::move(basis), std::move(grid), std::vector<Complex>(n, Complex{})};
}

SpectralCoeffs Trajectory::state_at(std::size_t node) const {
    SpectralCoeffs c = zero_coeffs(basis);
    for (std::size_t k = 0; k < basis->truncation(); ++k)
        c.values[k] = at(k, node);
    return c;
}

bool Trajectory::any_overflow() const {
    return std::any_of(mode_overflow.begin(), mode_overflow.end(),
                       [](std::uint8_t f) { return f != 0; });
}

void Trajectory::validate() const {
    if (!basis)
        throw std::invalid_argument("Trajectory: missing basis");
    grid.validate();
    if (states.size() != basis->truncation() * grid.node_count())
        throw std::invalid_argument("Trajectory: state dimensions inconsistent with basis/grid");
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        const bool flagged = k < mode_overflow.size() && mode_overflow[k];
        if (flagged)
            continue;
        for (std::size_t m = 0; m < grid.node_count(); ++m)
            if (!finite(at(k, m)))
                throw std::invalid_argument("Trajectory: non-finite entry in unflagged mode");
    }
}

double phi1(double z) {
    if (std::abs(z) < 1e-3) {
        // Σ z^n/(n+1)!, n = 0..6; remainder below 1e-21 at the crossover.
        return ((((((z / 5040.0 + 1.0 / 720.0) * z + 1.0 / 120.0) * z + 1.0 / 24.0) * z +
                  1.0 / 6.0) * z + 0.5) * z + 1.0);
    }
    const long double zl = z;
    return static_cast<double>(expm1l(zl) / zl);
}

double phi2(double z) {
    if (std::abs(z) < 1e-3) {
        // Σ z^n/(n+2)!, n = 0..6.
        return ((((((z / 40320.0 + 1.0 / 5040.0) * z + 1.0 / 720.0) * z + 1.0 / 120.0) * z +
                  1.0 / 24.0) * z + 1.0 / 6.0) * z + 0.5);
    }
    const long double zl = z;
    return static_cast<double>((expm1l(zl) - zl) / (zl * zl));
}

std::uint64_t source_fingerprint(const SourceTerm& f) {
    std::uint64_t h = 1469598103934665603ull;
    auto mix = [&h](const void* data, std::size_t n) {
        const auto* bytes = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            h ^= bytes[i];
            h *= 1099511628211ull;
        }
    };
    mix(f.grid.nodes.data(), f.grid.nodes.size() * sizeof(double));
    mix(f.samples.data(), f.samples.size() * sizeof(Complex));
    return h;
}

Trajectory solve_forward(const SpectralCoeffs& u0, const SourceTerm& f) {
    u0.validate();
    f.validate();
    if (!same_basis(*u0.basis, *f.basis))
        throw std::invalid_argument("solve_forward: u0 and f live on different bases");

    const std::size_t n = u0.size();
    const std::size_t nodes = f.grid.node_count();
    Trajectory traj;
    traj.basis = u0.basis;
    traj.grid = f.grid;
    traj.states.resize(n * nodes);
    traj.provenance = Provenance::forward;
    traj.mode_overflow.assign(n, 0);
    traj.source_hash = source_fingerprint(f);

    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = u0.basis->eigenvalues[k];
        Complex u = u0.values[k];
        traj.at(k, 0) = u;
        for (std::size_t m = 0; m + 1 < nodes; ++m) {
            const double dt = f.grid.nodes[m + 1] - f.grid.nodes[m];
            u = phi_step(lambda, dt, u, f.at(k, m), f.at(k, m + 1));
            traj.at(k, m + 1) = u;
        }
    }
    return traj;
}

SpectralCoeffs compute_yield(const SourceTerm& f) {
    f.validate();
    SpectralCoeffs y = zero_coeffs(f.basis);
    const std::size_t nodes = f.grid.node_count();
    for (std::size_t k = 0; k < f.basis->truncation(); ++k) {
        const double lambda = f.basis->eigenvalues[k];
        Complex acc{0.0, 0.0};
        for (std::size_t m = 0; m + 1 < nodes; ++m) {
            const double dt = f.grid.nodes[m + 1] - f.grid.nodes[m];
            acc = phi_step(lambda, dt, acc, f.at(k, m), f.at(k, m + 1));
        }
        y.values[k] = acc;
    }
    return y;
}

DerivativeField time_derivative(const Trajectory& traj, const SourceTerm& f) {
    traj.validate();
    f.validate();
    if (!same_basis(*traj.basis, *f.basis) || traj.grid.nodes != f.grid.nodes)
        throw std::invalid_argument("time_derivative: trajectory and source mismatch");

    DerivativeField d;
    d.basis = traj.basis;
    d.grid = traj.grid;
    d.values.resize(traj.states.size());
    d.provenance_warning = traj.source_hash != 0 && traj.source_hash != source_fingerprint(f);
    for (std::size_t k = 0; k < traj.basis->truncation(); ++k) {
        const double lambda = traj.basis->eigenvalues[k];
        for (std::size_t m = 0; m < traj.grid.node_count(); ++m)
            d.values[k * traj.grid.node_count() + m] = f.at(k, m) - lambda * traj.at(k, m);
    }
    return d;
}

namespace {

double x_norm(const Trajectory& traj, const SourceTerm& f, int s_space, int s_sup, int s_deriv) {
    const DerivativeField d = time_derivative(traj, f);
    const std::size_t nodes = traj.grid.node_count();
    const std::size_t n = traj.basis->truncation();

    std::vector<double> space_sq(nodes, 0.0), deriv_sq(nodes, 0.0);
    double sup_sq = 0.0;
    for (std::size_t m = 0; m < nodes; ++m) {
        double space = 0.0, sup = 0.0, deriv = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const double lambda = traj.basis->eigenvalues[k];
            const double u2 = std::norm(traj.at(k, m));
            space += scale_weight(lambda, s_space) * u2;
            sup += scale_weight(lambda, s_sup) * u2;
            deriv += scale_weight(lambda, s_deriv) * std::norm(d.at(k, m));
        }
        space_sq[m] = space;
        deriv_sq[m] = deriv;
        sup_sq = std::max(sup_sq, sup);
    }
    return std::sqrt(trapezoid(traj.grid, space_sq) + sup_sq + trapezoid(traj.grid, deriv_sq));
}

} // namespace

double norm_X0(const Trajectory& traj, const SourceTerm& f) {
    return x_norm(traj, f, 1, 0, -1);
}

double norm_X1(const Trajectory& traj, const SourceTerm& f) {
    return x_norm(traj, f, 2, 1, 0);
}

double norm_X0_equivalent(const Trajectory& traj, const SourceTerm& f) {
    const DerivativeField d = time_derivative(traj, f);
    const std::size_t nodes = traj.grid.node_count();
    std::vector<double> space_sq(nodes, 0.0), deriv_sq(nodes, 0.0);
    for (std::size_t m = 0; m < nodes; ++m) {
        for (std::size_t k = 0; k < traj.basis->truncation(); ++k) {
            const double lambda = traj.basis->eigenvalues[k];
            space_sq[m] += scale_weight(lambda, 1) * std::norm(traj.at(k, m));
            deriv_sq[m] += scale_weight(lambda, -1) * std::norm(d.at(k, m));
        }
    }
    return std::sqrt(trapezoid(traj.grid, space_sq) + trapezoid(traj.grid, deriv_sq));
}

HolderResult holder_seminorm(const SourceTerm& f, double sigma) {
    f.validate();
    if (!(sigma > 0.0 && sigma < 1.0))
        throw std::invalid_argument("holder_seminorm: sigma must lie in (0,1)");

    const std::size_t nodes = f.grid.node_count();
    const std::size_t n = f.basis->truncation();
    HolderResult best;
    for (std::size_t ms = 0; ms < nodes; ++ms)
        for (std::size_t mt = ms + 1; mt < nodes; ++mt) {
            double diff_sq = 0.0;
            for (std::size_t k = 0; k < n; ++k)
                diff_sq += std::norm(f.at(k, mt) - f.at(k, ms));
            const double dt = f.grid.nodes[mt] - f.grid.nodes[ms];
            const double value = std::sqrt(diff_sq) * std::pow(dt, -sigma);
            if (value > best.value) {
                best.value = value;
                best.node_s = ms;
                best.node_t = mt;
            }
        }
    return best;
}

double source_l2_norm(const SourceTerm& f) {
    f.validate();
    const std::size_t nodes = f.grid.node_count();
    std::vector<double> g(nodes, 0.0);
    for (std::size_t m = 0; m < nodes; ++m)
        for (std::size_t k = 0; k < f.basis->truncation(); ++k)
            g[m] += std::norm(f.at(k, m));
    return std::sqrt(trapezoid(f.grid, g));
}

} // namespace fvheat
