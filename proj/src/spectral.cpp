#include "fvheat/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fvheat/errors.hpp"

namespace fvheat {

namespace {

constexpr double kLogMax = 709.782712893384;  // ln(DBL_MAX)

bool finite(const Complex& z) {
    return std::isfinite(z.real()) && std::isfinite(z.imag());
}

} // namespace

std::string ModeLabel::str() const {
    if (q < 0)
        return std::to_string(p);
    return "(" + std::to_string(p) + "," + std::to_string(q) + ")";
}

void SpectralBasis::validate() const {
    if (eigenvalues.empty())
        throw std::invalid_argument("SpectralBasis: needs at least one mode");
    double prev = -0.0;
    for (std::size_t k = 0; k < eigenvalues.size(); ++k) {
        const double ev = eigenvalues[k];
        if (!std::isfinite(ev) || ev < 0.0)
            throw std::invalid_argument("SpectralBasis: eigenvalues must be finite and >= 0");
        if (k > 0 && ev < prev)
            throw std::invalid_argument("SpectralBasis: eigenvalues must be ascending");
        prev = ev;
    }
    if (!mode_labels.empty() && mode_labels.size() != eigenvalues.size())
        throw std::invalid_argument("SpectralBasis: label/eigenvalue count mismatch");
    if (kind != DomainKind::custom && eigenvalues.front() != 0.0)
        throw std::invalid_argument("SpectralBasis: Neumann basis must start at lambda_0 = 0");
}

BasisPtr make_custom_basis(std::vector<double> eigenvalues) {
    auto basis = std::make_shared<SpectralBasis>();
    basis->eigenvalues = std::move(eigenvalues);
    basis->kind = DomainKind::custom;
    basis->mode_labels.resize(basis->eigenvalues.size());
    for (std::size_t k = 0; k < basis->eigenvalues.size(); ++k)
        basis->mode_labels[k] = ModeLabel{static_cast<int>(k), -1};
    std::ostringstream tag;
    tag << "custom N=" << basis->eigenvalues.size();
    basis->domain_tag = tag.str();
    basis->validate();
    return basis;
}

void SpectralCoeffs::validate() const {
    if (!basis)
        throw std::invalid_argument("SpectralCoeffs: missing basis");
    basis->validate();
    if (values.size() != basis->truncation())
        throw std::invalid_argument("SpectralCoeffs: value count must equal basis truncation");
    for (const Complex& c : values)
        if (!finite(c))
            throw std::invalid_argument("SpectralCoeffs: entries must be finite");
}

SpectralCoeffs make_coeffs(BasisPtr basis, std::vector<Complex> values) {
    SpectralCoeffs c{std::move(basis), std::move(values)};
    c.validate();
    return c;
}

SpectralCoeffs zero_coeffs(BasisPtr basis) {
    const std::size_t n = basis->truncation();
    return SpectralCoeffs{std::move(basis), std::vector<Complex>(n, Complex{0.0, 0.0})};
}

bool same_basis(const SpectralBasis& a, const SpectralBasis& b) {
    return &a == &b || a.eigenvalues == b.eigenvalues;
}

void check_same_basis(const SpectralCoeffs& a, const SpectralCoeffs& b) {
    if (!a.basis || !b.basis || !same_basis(*a.basis, *b.basis))
        throw std::invalid_argument("operands live on different spectral bases");
}

SobolevScale::SobolevScale(int scale) : s(scale) {
    if (s < -1 || s > 2)
        throw std::invalid_argument("SobolevScale: s must lie in {-1,0,1,2}");
}

bool BackwardResult::any_overflow() const {
    return std::any_of(overflow.begin(), overflow.end(), [](std::uint8_t f) { return f != 0; });
}

std::vector<std::size_t> BackwardResult::flagged_modes() const {
    std::vector<std::size_t> modes;
    for (std::size_t k = 0; k < overflow.size(); ++k)
        if (overflow[k])
            modes.push_back(k);
    return modes;
}

SpectralCoeffs apply_forward_semigroup(const SpectralCoeffs& v, double t) {
    v.validate();
    if (!(t >= 0.0))
        throw std::invalid_argument("apply_forward_semigroup: t must be >= 0");
    SpectralCoeffs out = v;
    for (std::size_t k = 0; k < out.values.size(); ++k)
        out.values[k] *= std::exp(-v.basis->eigenvalues[k] * t);
    return out;
}

BackwardResult apply_backward_semigroup(const SpectralCoeffs& v, double t, OverflowPolicy policy) {
    v.validate();
    if (!(t > 0.0))
        throw std::invalid_argument("apply_backward_semigroup: t must be > 0");

    const std::size_t n = v.size();
    BackwardResult result{v, std::vector<std::uint8_t>(n, 0)};
    std::vector<std::size_t> offending;

    for (std::size_t k = 0; k < n; ++k) {
        const Complex c = v.values[k];
        const double mag = std::abs(c);
        if (mag == 0.0) {
            result.coeffs.values[k] = Complex{0.0, 0.0};
            continue;
        }
        const double lt = v.basis->eigenvalues[k] * t;
        const double exponent = lt + std::log(mag);
        if (exponent > kLogMax) {
            result.overflow[k] = 1;
            offending.push_back(k);
            switch (policy) {
                case OverflowPolicy::fail:
                    break;  // collected below
                case OverflowPolicy::zero:
                    result.coeffs.values[k] = Complex{0.0, 0.0};
                    break;
                case OverflowPolicy::saturate:
                    result.coeffs.values[k] =
                        std::polar(std::numeric_limits<double>::max(), std::arg(c));
                    break;
            }
            continue;
        }
        // Plain scaling while e^{λt} itself is representable; otherwise fold
        // the magnitude into one exponent so no intermediate overflows.
        if (lt <= 690.0)
            result.coeffs.values[k] = c * std::exp(lt);
        else
            result.coeffs.values[k] = std::polar(std::exp(exponent), std::arg(c));
    }

    if (!offending.empty() && policy == OverflowPolicy::fail) {
        std::ostringstream msg;
        msg << "apply_backward_semigroup: e^{lambda t} overflows at t=" << t << " for mode(s)";
        for (std::size_t k : offending)
            msg << ' ' << k;
        throw OverflowError(msg.str(), offending);
    }
    return result;
}

double sobolev_norm(const SpectralCoeffs& v, SobolevScale scale) {
    v.validate();
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double w = 1.0 + v.basis->eigenvalues[k];
        const double m2 = std::norm(v.values[k]);
        switch (scale.s) {
            case -1: sum += m2 / w; break;
            case 0:  sum += m2; break;
            case 1:  sum += m2 * w; break;
            case 2:  sum += m2 * w * w; break;
            default: break;
        }
    }
    return std::sqrt(sum);
}

double graph_norm_DA(const SpectralCoeffs& v) {
    v.validate();
    double sum = 0.0;
    for (std::size_t k = 0; k < v.size(); ++k) {
        const double lam = v.basis->eigenvalues[k];
        sum += (1.0 + lam * lam) * std::norm(v.values[k]);
    }
    return std::sqrt(sum);
}

double interpolation_half_norm(const SpectralCoeffs& v) {
    return sobolev_norm(v, SobolevScale{1});
}

double lions_magenes_constant(double theta, const QuadratureSpec& quad) {
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("lions_magenes_constant: theta must lie in (0,1)");
    quad.validate();
    // Substituting s = e^x turns ∫₀^∞ s^{2θ-3}(1-e^{-s})² ds into an integral
    // whose integrand decays like e^{2θx} to the left and e^{-(2-2θ)x} to the
    // right; truncation at the bounds below is far under the tolerance.
    const double a = -80.0 / (2.0 * theta);
    const double b = 80.0 / (2.0 - 2.0 * theta);
    auto integrand = [theta](double x) {
        const double s = std::exp(x);
        const double d = -std::expm1(-s);  // 1 - e^{-s}, cancellation-free
        return std::pow(s, 2.0 * theta - 2.0) * d * d;
    };
    return adaptive_simpson(integrand, a, b, quad.rel_tol);
}

double lions_magenes_norm(const SpectralCoeffs& a, double theta, const QuadratureSpec& quad) {
    a.validate();
    if (!(theta > 0.0 && theta < 1.0))
        throw std::invalid_argument("lions_magenes_norm: theta must lie in (0,1)");
    const double C = lions_magenes_constant(theta, quad);
    double sum = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        const double lam = a.basis->eigenvalues[k];
        const double m2 = std::norm(a.values[k]);
        sum += m2;
        if (lam > 0.0)
            sum += C * std::pow(lam, 2.0 - 2.0 * theta) * m2;
    }
    return std::sqrt(sum);
}

DecayEstimate estimate_decay_rate(const SpectralCoeffs& v, double tail_fraction) {
    v.validate();
    if (!(tail_fraction > 0.0 && tail_fraction <= 1.0))
        throw std::invalid_argument("estimate_decay_rate: tail_fraction must lie in (0,1]");

    const std::size_t n = v.size();
    const auto window = static_cast<std::size_t>(
        std::ceil(tail_fraction * static_cast<double>(n)));
    const std::size_t start = n - std::min(window, n);

    std::vector<double> xs, ys;
    std::size_t first = 0, last = 0;
    for (std::size_t k = start; k < n; ++k) {
        const double mag = std::abs(v.values[k]);
        if (mag <= 0.0 || !std::isfinite(mag))
            continue;
        if (xs.empty())
            first = k;
        last = k;
        xs.push_back(v.basis->eigenvalues[k]);
        ys.push_back(std::log(mag));
    }

    DecayEstimate est;
    est.first_mode = first;
    est.last_mode = last;
    est.modes_used = xs.size();
    if (xs.size() < 3)
        return est;  // undetermined

    const auto m = static_cast<double>(xs.size());
    double xbar = 0.0, ybar = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        xbar += xs[i];
        ybar += ys[i];
    }
    xbar /= m;
    ybar /= m;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sxx += (xs[i] - xbar) * (xs[i] - xbar);
        sxy += (xs[i] - xbar) * (ys[i] - ybar);
    }
    if (sxx == 0.0)
        return est;  // all usable modes share one eigenvalue

    est.determined = true;
    est.rho = -sxy / sxx;
    const double alpha = ybar + est.rho * xbar;
    double rss = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double e = ys[i] - (alpha - est.rho * xs[i]);
        rss += e * e;
    }
    est.fit_residual = std::sqrt(rss / m);
    return est;
}

} // namespace fvheat
