#include "fvheat/domains.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace fvheat {

namespace {

constexpr double kPi = std::numbers::pi;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Orthonormal Neumann eigenfunction on (0,L).
double mode_fn(double x, int k, double L) {
    if (k == 0)
        return 1.0 / std::sqrt(L);
    return std::sqrt(2.0 / L) * std::cos(static_cast<double>(k) * kPi * x / L);
}

// d/dx of mode_fn.
double mode_fn_deriv(double x, int k, double L) {
    if (k == 0)
        return 0.0;
    const double w = static_cast<double>(k) * kPi / L;
    return -std::sqrt(2.0 / L) * w * std::sin(w * x);
}

void check_interval_basis(const IntervalDomain& domain, const BasisPtr& basis) {
    if (!basis || basis->kind != DomainKind::interval || basis->L != domain.length)
        throw std::invalid_argument("basis was not generated from this interval domain");
}

void check_rectangle_basis(const RectangleDomain& domain, const BasisPtr& basis) {
    if (!basis || basis->kind != DomainKind::rectangle || basis->Lx != domain.Lx ||
        basis->Ly != domain.Ly)
        throw std::invalid_argument("basis was not generated from this rectangle domain");
}

} // namespace

void IntervalDomain::validate() const {
    if (!(length > 0.0) || !std::isfinite(length))
        throw std::invalid_argument("IntervalDomain: length must be finite and positive");
}

void RectangleDomain::validate() const {
    if (!(Lx > 0.0) || !std::isfinite(Lx) || !(Ly > 0.0) || !std::isfinite(Ly))
        throw std::invalid_argument("RectangleDomain: sides must be finite and positive");
}

BasisPtr interval_basis(const IntervalDomain& domain, std::size_t N) {
    domain.validate();
    if (N < 1)
        throw std::invalid_argument("interval_basis: N must be >= 1");
    auto basis = std::make_shared<SpectralBasis>();
    basis->kind = DomainKind::interval;
    basis->L = domain.length;
    basis->eigenvalues.resize(N);
    basis->mode_labels.resize(N);
    for (std::size_t k = 0; k < N; ++k) {
        const double w = static_cast<double>(k) * kPi / domain.length;
        basis->eigenvalues[k] = w * w;
        basis->mode_labels[k] = ModeLabel{static_cast<int>(k), -1};
    }
    std::ostringstream tag;
    tag << "interval L=" << fmt17(domain.length) << " N=" << N;
    basis->domain_tag = tag.str();
    basis->validate();
    return basis;
}

BasisPtr rectangle_basis(const RectangleDomain& domain, std::size_t Nx, std::size_t Ny) {
    domain.validate();
    if (Nx < 1 || Ny < 1)
        throw std::invalid_argument("rectangle_basis: Nx and Ny must be >= 1");

    struct Entry {
        double lambda;
        int p, q;
    };
    std::vector<Entry> entries;
    entries.reserve(Nx * Ny);
    for (std::size_t p = 0; p < Nx; ++p)
        for (std::size_t q = 0; q < Ny; ++q) {
            const double wx = static_cast<double>(p) * kPi / domain.Lx;
            const double wy = static_cast<double>(q) * kPi / domain.Ly;
            entries.push_back({wx * wx + wy * wy, static_cast<int>(p), static_cast<int>(q)});
        }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.lambda != b.lambda)
            return a.lambda < b.lambda;
        if (a.p != b.p)
            return a.p < b.p;
        return a.q < b.q;
    });

    auto basis = std::make_shared<SpectralBasis>();
    basis->kind = DomainKind::rectangle;
    basis->Lx = domain.Lx;
    basis->Ly = domain.Ly;
    basis->eigenvalues.resize(entries.size());
    basis->mode_labels.resize(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
        basis->eigenvalues[i] = entries[i].lambda;
        basis->mode_labels[i] = ModeLabel{entries[i].p, entries[i].q};
    }
    std::ostringstream tag;
    tag << "rectangle Lx=" << fmt17(domain.Lx) << " Ly=" << fmt17(domain.Ly) << " Nx=" << Nx
        << " Ny=" << Ny;
    basis->domain_tag = tag.str();
    basis->validate();
    return basis;
}

SpectralCoeffs analyze(const IntervalDomain& domain, const std::function<Complex(double)>& f,
                       const BasisPtr& basis, const QuadratureSpec& quad) {
    domain.validate();
    check_interval_basis(domain, basis);
    quad.validate();

    const std::size_t nodes = quad.node_count;
    const double L = domain.length;
    const double h = L / static_cast<double>(nodes - 1);

    std::vector<Complex> fx(nodes);
    std::vector<double> weight(nodes);
    for (std::size_t i = 0; i < nodes; ++i) {
        const double x = h * static_cast<double>(i);
        fx[i] = f(x);
        weight[i] = (i == 0 || i + 1 == nodes) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    }

    SpectralCoeffs out = zero_coeffs(basis);
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < nodes; ++i) {
            const double x = h * static_cast<double>(i);
            acc += weight[i] * fx[i] * mode_fn(x, basis->mode_labels[k].p, L);
        }
        out.values[k] = acc * (h / 3.0);
    }
    return out;
}

SpectralCoeffs analyze(const RectangleDomain& domain,
                       const std::function<Complex(double, double)>& f, const BasisPtr& basis,
                       const QuadratureSpec& quad) {
    domain.validate();
    check_rectangle_basis(domain, basis);
    quad.validate();

    const std::size_t nodes = quad.node_count;
    const double hx = domain.Lx / static_cast<double>(nodes - 1);
    const double hy = domain.Ly / static_cast<double>(nodes - 1);

    std::vector<double> weight(nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        weight[i] = (i == 0 || i + 1 == nodes) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);

    std::vector<Complex> fx(nodes * nodes);
    for (std::size_t i = 0; i < nodes; ++i)
        for (std::size_t j = 0; j < nodes; ++j)
            fx[i * nodes + j] =
                f(hx * static_cast<double>(i), hy * static_cast<double>(j));

    // Per-axis eigenfunction tables; modes reference them by (p,q).
    int pmax = 0, qmax = 0;
    for (const ModeLabel& ml : basis->mode_labels) {
        pmax = std::max(pmax, ml.p);
        qmax = std::max(qmax, ml.q);
    }
    std::vector<double> ex(static_cast<std::size_t>(pmax + 1) * nodes);
    std::vector<double> ey(static_cast<std::size_t>(qmax + 1) * nodes);
    for (int p = 0; p <= pmax; ++p)
        for (std::size_t i = 0; i < nodes; ++i)
            ex[static_cast<std::size_t>(p) * nodes + i] =
                mode_fn(hx * static_cast<double>(i), p, domain.Lx);
    for (int q = 0; q <= qmax; ++q)
        for (std::size_t j = 0; j < nodes; ++j)
            ey[static_cast<std::size_t>(q) * nodes + j] =
                mode_fn(hy * static_cast<double>(j), q, domain.Ly);

    SpectralCoeffs out = zero_coeffs(basis);
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        const ModeLabel ml = basis->mode_labels[k];
        const double* exk = &ex[static_cast<std::size_t>(ml.p) * nodes];
        const double* eyk = &ey[static_cast<std::size_t>(ml.q) * nodes];
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < nodes; ++i) {
            Complex row{0.0, 0.0};
            for (std::size_t j = 0; j < nodes; ++j)
                row += weight[j] * fx[i * nodes + j] * eyk[j];
            acc += weight[i] * exk[i] * row;
        }
        out.values[k] = acc * (hx / 3.0) * (hy / 3.0);
    }
    return out;
}

SpectralCoeffs analyze_samples(const IntervalDomain& domain, const std::vector<Complex>& samples,
                               const BasisPtr& basis) {
    domain.validate();
    check_interval_basis(domain, basis);
    const std::size_t nodes = samples.size();
    if (nodes < 3 || nodes % 2 == 0)
        throw std::invalid_argument("analyze_samples: sample count must be odd and >= 3");
    const double L = domain.length;
    const double h = L / static_cast<double>(nodes - 1);

    SpectralCoeffs out = zero_coeffs(basis);
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        Complex acc{0.0, 0.0};
        for (std::size_t i = 0; i < nodes; ++i) {
            const double w = (i == 0 || i + 1 == nodes) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
            acc += w * samples[i] * mode_fn(h * static_cast<double>(i), basis->mode_labels[k].p, L);
        }
        out.values[k] = acc * (h / 3.0);
    }
    return out;
}

std::vector<Complex> synthesize(const SpectralCoeffs& coeffs, const std::vector<double>& points) {
    coeffs.validate();
    if (coeffs.basis->kind != DomainKind::interval)
        throw std::invalid_argument("synthesize(points): needs an interval basis");
    const double L = coeffs.basis->L;
    std::vector<Complex> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i];
        if (x < 0.0 || x > L)
            throw std::invalid_argument("synthesize: point outside the closed domain");
        Complex acc{0.0, 0.0};
        for (std::size_t k = 0; k < coeffs.size(); ++k)
            acc += coeffs.values[k] * mode_fn(x, coeffs.basis->mode_labels[k].p, L);
        out[i] = acc;
    }
    return out;
}

std::vector<Complex> synthesize(const SpectralCoeffs& coeffs,
                                const std::vector<std::array<double, 2>>& points) {
    coeffs.validate();
    if (coeffs.basis->kind != DomainKind::rectangle)
        throw std::invalid_argument("synthesize(2d points): needs a rectangle basis");
    const double Lx = coeffs.basis->Lx;
    const double Ly = coeffs.basis->Ly;
    std::vector<Complex> out(points.size());
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double x = points[i][0];
        const double y = points[i][1];
        if (x < 0.0 || x > Lx || y < 0.0 || y > Ly)
            throw std::invalid_argument("synthesize: point outside the closed domain");
        Complex acc{0.0, 0.0};
        for (std::size_t k = 0; k < coeffs.size(); ++k) {
            const ModeLabel ml = coeffs.basis->mode_labels[k];
            acc += coeffs.values[k] * mode_fn(x, ml.p, Lx) * mode_fn(y, ml.q, Ly);
        }
        out[i] = acc;
    }
    return out;
}

Complex dirichlet_form(const SpectralCoeffs& u, const SpectralCoeffs& v) {
    u.validate();
    v.validate();
    check_same_basis(u, v);
    Complex acc{0.0, 0.0};
    for (std::size_t k = 0; k < u.size(); ++k)
        acc += u.basis->eigenvalues[k] * u.values[k] * std::conj(v.values[k]);
    return acc;
}

WeylCount weyl_count(const SpectralBasis& basis, double lam) {
    basis.validate();
    if (!(lam >= 0.0))
        throw std::invalid_argument("weyl_count: lambda must be >= 0");

    WeylCount result;
    for (double ev : basis.eigenvalues)
        if (ev <= lam)
            ++result.count;
    result.truncation_limited = basis.eigenvalues.back() <= lam;

    switch (basis.kind) {
        case DomainKind::interval:
            // n = 1: ω₁ = 2, |Ω| = L  →  L√λ/π.
            result.leading_term = basis.L * std::sqrt(lam) / kPi;
            break;
        case DomainKind::rectangle:
            // n = 2: ω₂ = π, |Ω| = Lx·Ly  →  λ·Lx·Ly/(4π).
            result.leading_term = lam * basis.Lx * basis.Ly / (4.0 * kPi);
            break;
        case DomainKind::custom:
            throw std::invalid_argument("weyl_count: custom basis has no geometry");
    }
    result.difference = static_cast<double>(result.count) - result.leading_term;
    return result;
}

double boundary_flux(const SpectralCoeffs& coeffs, std::size_t samples_per_edge) {
    coeffs.validate();
    if (samples_per_edge < 2)
        throw std::invalid_argument("boundary_flux: needs at least 2 samples per edge");

    double flux = 0.0;
    if (coeffs.basis->kind == DomainKind::interval) {
        const double L = coeffs.basis->L;
        for (double x : {0.0, L}) {
            Complex d{0.0, 0.0};
            for (std::size_t k = 0; k < coeffs.size(); ++k)
                d += coeffs.values[k] * mode_fn_deriv(x, coeffs.basis->mode_labels[k].p, L);
            flux = std::max(flux, std::abs(d));
        }
        return flux;
    }
    if (coeffs.basis->kind != DomainKind::rectangle)
        throw std::invalid_argument("boundary_flux: needs an interval or rectangle basis");

    const double Lx = coeffs.basis->Lx;
    const double Ly = coeffs.basis->Ly;
    const auto n = static_cast<double>(samples_per_edge - 1);
    // Vertical edges: normal derivative is ∂_x; horizontal edges: ∂_y.
    for (std::size_t j = 0; j < samples_per_edge; ++j) {
        const double y = Ly * static_cast<double>(j) / n;
        for (double x : {0.0, Lx}) {
            Complex d{0.0, 0.0};
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                const ModeLabel ml = coeffs.basis->mode_labels[k];
                d += coeffs.values[k] * mode_fn_deriv(x, ml.p, Lx) * mode_fn(y, ml.q, Ly);
            }
            flux = std::max(flux, std::abs(d));
        }
    }
    for (std::size_t i = 0; i < samples_per_edge; ++i) {
        const double x = Lx * static_cast<double>(i) / n;
        for (double y : {0.0, Ly}) {
            Complex d{0.0, 0.0};
            for (std::size_t k = 0; k < coeffs.size(); ++k) {
                const ModeLabel ml = coeffs.basis->mode_labels[k];
                d += coeffs.values[k] * mode_fn(x, ml.p, Lx) * mode_fn_deriv(y, ml.q, Ly);
            }
            flux = std::max(flux, std::abs(d));
        }
    }
    return flux;
}

} // namespace fvheat
