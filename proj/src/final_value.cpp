#include "fvheat/final_value.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "fvheat/errors.hpp"

namespace fvheat {

namespace {

constexpr double kLogMax = 709.782712893384;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Running log-sum-exp accumulator: keeps log Σ e^{a_k} without ever forming
// the exponentials.
class LogSumExp {
public:
    void add(double a) {
        if (a == kNegInf)
            return;
        if (max_ == kNegInf) {
            max_ = a;
            sum_ = 1.0;
        } else if (a <= max_) {
            sum_ += std::exp(a - max_);
        } else {
            sum_ = sum_ * std::exp(max_ - a) + 1.0;
            max_ = a;
        }
    }
    double log_value() const { return max_ == kNegInf ? kNegInf : max_ + std::log(sum_); }

private:
    double max_ = kNegInf;
    double sum_ = 0.0;
};

// Partial norms of e^{TA}w in the scale-s norm, from the per-mode log
// magnitudes ln|w_k| (kNegInf for zero modes).
std::vector<PartialNormRow> partial_norm_table(const SpectralBasis& basis,
                                               const std::vector<double>& log_w, double T,
                                               int scale_s) {
    std::vector<PartialNormRow> table(basis.truncation());
    LogSumExp acc;
    for (std::size_t k = 0; k < basis.truncation(); ++k) {
        const double lam = basis.eigenvalues[k];
        if (log_w[k] != kNegInf)
            acc.add(static_cast<double>(scale_s) * std::log1p(lam) +
                    2.0 * (lam * T + log_w[k]));
        PartialNormRow& row = table[k];
        row.N = k + 1;
        row.log_value = acc.log_value() == kNegInf ? kNegInf : 0.5 * acc.log_value();
        row.overflow = row.log_value > kLogMax;
        row.value = row.log_value == kNegInf
                        ? 0.0
                        : (row.overflow ? std::numeric_limits<double>::max()
                                        : std::exp(row.log_value));
    }
    return table;
}

std::vector<double> log_magnitudes(const SpectralCoeffs& w) {
    std::vector<double> lw(w.size());
    for (std::size_t k = 0; k < w.size(); ++k) {
        const double mag = std::abs(w.values[k]);
        lw[k] = mag > 0.0 ? std::log(mag) : kNegInf;
    }
    return lw;
}

SpectralCoeffs difference(const SpectralCoeffs& a, const SpectralCoeffs& b) {
    check_same_basis(a, b);
    SpectralCoeffs d = a;
    for (std::size_t k = 0; k < d.size(); ++k)
        d.values[k] -= b.values[k];
    return d;
}

double norm0(const SpectralCoeffs& v) { return sobolev_norm(v, SobolevScale{0}); }
double norm1(const SpectralCoeffs& v) { return sobolev_norm(v, SobolevScale{1}); }

} // namespace

void FinalData::validate() const {
    u_T.validate();
    f.validate();
    if (!same_basis(*u_T.basis, *f.basis))
        throw std::invalid_argument("FinalData: u_T and f live on different bases");
}

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::COMPATIBLE: return "COMPATIBLE";
        case Verdict::MARGINAL: return "MARGINAL";
        case Verdict::INCOMPATIBLE: return "INCOMPATIBLE";
    }
    return "?";
}

const char* to_string(TargetSpace s) {
    return s == TargetSpace::Y0 ? "Y0" : "Y1";
}

CompatibilityReport check_compatibility(const FinalData& data, TargetSpace target) {
    return check_compatibility(data, target, CompatThresholds::defaults(data.T()));
}

CompatibilityReport check_compatibility(const FinalData& data, TargetSpace target,
                                        const CompatThresholds& thresholds) {
    data.validate();
    const double T = data.T();
    const SpectralCoeffs w = difference(data.u_T, compute_yield(data.f));
    const std::vector<double> log_w = log_magnitudes(w);
    const SpectralBasis& basis = *w.basis;

    CompatibilityReport report;
    report.target_space = target;
    report.thresholds = thresholds;
    report.T = T;

    report.margins.resize(w.size());
    for (std::size_t k = 0; k < w.size(); ++k)
        report.margins[k] = log_w[k] == kNegInf ? kNegInf : basis.eigenvalues[k] * T + log_w[k];

    report.partial_norms_h = partial_norm_table(basis, log_w, T, 0);
    report.partial_norms_h1 = partial_norm_table(basis, log_w, T, 1);
    report.decay = estimate_decay_rate(w, thresholds.decay_tail_fraction);

    // Tail behaviour over the last quarter of the table (at least one step).
    const auto& table =
        target == TargetSpace::Y0 ? report.partial_norms_h : report.partial_norms_h1;
    const std::size_t n = table.size();
    const std::size_t window = std::max<std::size_t>(1, n / 4);
    const std::size_t start = n - window;

    bool converged = true;
    bool all_growing = n >= 2;
    for (std::size_t i = (start == 0 ? 1 : start); i < n; ++i) {
        const double prev = table[i - 1].log_value;
        const double cur = table[i].log_value;
        double rel_inc = 0.0;
        if (cur != kNegInf)
            rel_inc = prev == kNegInf ? 1.0 : 1.0 - std::exp(prev - cur);
        if (rel_inc >= thresholds.tail_rel)
            converged = false;
        if (!(rel_inc > 0.0))
            all_growing = false;
    }
    double growth = 0.0;  // log of P_N / P_{start}
    if (n >= 2) {
        const double first = table[start == 0 ? 0 : start - 1].log_value;
        const double last = table[n - 1].log_value;
        if (last == kNegInf)
            growth = 0.0;
        else
            growth = first == kNegInf ? std::numeric_limits<double>::infinity() : last - first;
    }
    report.tail_converged = converged;
    report.monotone_growth = all_growing && growth > std::log(thresholds.growth_factor);

    const bool decay_compatible =
        report.decay.determined && report.decay.rho >= T + thresholds.epsilon_margin;
    const bool decay_incompatible =
        report.decay.determined && report.decay.rho < T - thresholds.epsilon_margin;

    if (converged && (decay_compatible || !report.decay.determined))
        report.verdict = Verdict::COMPATIBLE;
    else if (decay_incompatible || report.monotone_growth)
        report.verdict = Verdict::INCOMPATIBLE;
    else
        report.verdict = Verdict::MARGINAL;
    return report;
}

BackwardResult reconstruct_initial(const FinalData& data, OverflowPolicy policy) {
    data.validate();
    const SpectralCoeffs w = difference(data.u_T, compute_yield(data.f));
    return apply_backward_semigroup(w, data.T(), policy);
}

BackwardResult reconstruct_initial_cutoff(const FinalData& data, double lambda_t_cap,
                                          OverflowPolicy policy) {
    data.validate();
    if (!(lambda_t_cap > 0.0))
        throw std::invalid_argument("reconstruct_initial_cutoff: cap must be positive");
    SpectralCoeffs w = difference(data.u_T, compute_yield(data.f));
    const double T = data.T();
    for (std::size_t k = 0; k < w.size(); ++k)
        if (w.basis->eigenvalues[k] * T > lambda_t_cap)
            w.values[k] = Complex{0.0, 0.0};
    return apply_backward_semigroup(w, T, policy);
}

Trajectory solve_backward(const FinalData& data, OverflowPolicy policy) {
    data.validate();
    const double T = data.T();
    const SpectralCoeffs y = compute_yield(data.f);
    const SpectralCoeffs w = difference(data.u_T, y);
    const SourceTerm& f = data.f;
    const std::size_t n = w.size();
    const std::size_t nodes = f.grid.node_count();

    Trajectory traj;
    traj.basis = w.basis;
    traj.grid = f.grid;
    traj.states.resize(n * nodes);
    traj.provenance = Provenance::backward;
    traj.mode_overflow.assign(n, 0);
    traj.source_hash = source_fingerprint(f);

    std::vector<std::size_t> offending;
    for (std::size_t k = 0; k < n; ++k) {
        const double lambda = w.basis->eigenvalues[k];
        const double mag = std::abs(w.values[k]);
        const double log_mag = mag > 0.0 ? std::log(mag) : kNegInf;
        const double arg = std::arg(w.values[k]);

        // Convolution term ∫₀^{t_m} e^{-(t_m - s)λ} f(s) ds by the forward
        // recurrence; at the terminal node it reproduces the yield bitwise.
        Complex conv{0.0, 0.0};
        bool mode_overflowed = false;
        for (std::size_t m = 0; m < nodes; ++m) {
            if (m > 0) {
                const double dt = f.grid.nodes[m] - f.grid.nodes[m - 1];
                conv = phi_step(lambda, dt, conv, f.at(k, m - 1), f.at(k, m));
            }
            if (m + 1 == nodes) {
                // e^{0}w + y_f = u_T identically; assign the data.
                traj.at(k, m) = data.u_T.values[k];
                continue;
            }
            Complex hom{0.0, 0.0};
            if (mag > 0.0) {
                const double lt = lambda * (T - f.grid.nodes[m]);
                const double exponent = lt + log_mag;
                if (exponent > kLogMax) {
                    mode_overflowed = true;
                    switch (policy) {
                        case OverflowPolicy::fail:
                            break;
                        case OverflowPolicy::zero:
                            hom = Complex{0.0, 0.0};
                            break;
                        case OverflowPolicy::saturate:
                            hom = std::polar(std::numeric_limits<double>::max(), arg);
                            break;
                    }
                } else if (lt <= 690.0) {
                    hom = w.values[k] * std::exp(lt);
                } else {
                    hom = std::polar(std::exp(exponent), arg);
                }
            }
            traj.at(k, m) = hom + conv;
        }
        if (mode_overflowed) {
            traj.mode_overflow[k] = 1;
            offending.push_back(k);
        }
    }

    if (!offending.empty() && policy == OverflowPolicy::fail) {
        std::ostringstream msg;
        msg << "solve_backward: e^{lambda (T - t)} overflows for mode(s)";
        for (std::size_t k : offending)
            msg << ' ' << k;
        throw OverflowError(msg.str(), offending);
    }
    return traj;
}

YNorm norm_Y0(const FinalData& data) {
    // ||u_T||₀ and the e^{TA}w term in ||·||₀; f in the dual norm.
    data.validate();
    const SourceTerm& f = data.f;
    const std::size_t nodes = f.grid.node_count();
    std::vector<double> g(nodes, 0.0);
    for (std::size_t m = 0; m < nodes; ++m)
        for (std::size_t k = 0; k < f.basis->truncation(); ++k)
            g[m] += std::norm(f.at(k, m)) / (1.0 + f.basis->eigenvalues[k]);
    double f_sq = 0.0;
    for (std::size_t m = 0; m + 1 < nodes; ++m)
        f_sq += 0.5 * (f.grid.nodes[m + 1] - f.grid.nodes[m]) * (g[m] + g[m + 1]);

    const SpectralCoeffs w = difference(data.u_T, compute_yield(f));
    const auto table = partial_norm_table(*w.basis, log_magnitudes(w), data.T(), 0);
    const PartialNormRow& last = table.back();

    YNorm result;
    const double uT = norm0(data.u_T);
    if (last.overflow) {
        result.divergent = true;
        result.value = std::numeric_limits<double>::max();
        result.partial_norms = table;
        return result;
    }
    const double recon_sq = last.log_value == kNegInf ? 0.0 : std::exp(2.0 * last.log_value);
    result.value = std::sqrt(f_sq + uT * uT + recon_sq);
    if (!std::isfinite(result.value)) {
        result.divergent = true;
        result.value = std::numeric_limits<double>::max();
        result.partial_norms = table;
    }
    return result;
}

YNorm norm_Y1(const FinalData& data) {
    data.validate();
    const SourceTerm& f = data.f;
    const std::size_t nodes = f.grid.node_count();
    std::vector<double> g(nodes, 0.0);
    for (std::size_t m = 0; m < nodes; ++m)
        for (std::size_t k = 0; k < f.basis->truncation(); ++k)
            g[m] += std::norm(f.at(k, m));
    double f_sq = 0.0;
    for (std::size_t m = 0; m + 1 < nodes; ++m)
        f_sq += 0.5 * (f.grid.nodes[m + 1] - f.grid.nodes[m]) * (g[m] + g[m + 1]);

    const SpectralCoeffs w = difference(data.u_T, compute_yield(f));
    const auto table = partial_norm_table(*w.basis, log_magnitudes(w), data.T(), 1);
    const PartialNormRow& last = table.back();

    YNorm result;
    const double uT = norm1(data.u_T);
    if (last.overflow) {
        result.divergent = true;
        result.value = std::numeric_limits<double>::max();
        result.partial_norms = table;
        return result;
    }
    const double recon_sq = last.log_value == kNegInf ? 0.0 : std::exp(2.0 * last.log_value);
    result.value = std::sqrt(f_sq + uT * uT + recon_sq);
    if (!std::isfinite(result.value)) {
        result.divergent = true;
        result.value = std::numeric_limits<double>::max();
        result.partial_norms = table;
    }
    return result;
}

RoundTripReport roundtrip(const SpectralCoeffs& u0, const SourceTerm& f, OverflowPolicy policy) {
    const Trajectory fwd = solve_forward(u0, f);
    const SpectralCoeffs u_T = fwd.terminal_state();
    const FinalData data{u_T, f};
    const Trajectory back = solve_backward(data, policy);

    RoundTripReport report;
    report.amplification_ceiling = std::exp(u0.basis->lambda_max() * f.grid.horizon());

    double max_f = 0.0;
    for (std::size_t m = 0; m < f.grid.node_count(); ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.basis->truncation(); ++k)
            s += std::norm(f.at(k, m));
        max_f = std::max(max_f, std::sqrt(s));
    }
    report.scale = norm0(u0) + max_f + norm0(u_T);

    for (std::size_t m = 0; m < f.grid.node_count(); ++m) {
        double s = 0.0;
        for (std::size_t k = 0; k < f.basis->truncation(); ++k)
            s += std::norm(back.at(k, m) - fwd.at(k, m));
        report.max_node_residual = std::max(report.max_node_residual, std::sqrt(s));
    }
    report.initial_residual_h1 = 0.0;
    {
        const SpectralCoeffs b0 = back.state_at(0);
        report.initial_residual_h1 = norm1(difference(b0, u0));
    }
    report.terminal_residual = norm0(difference(back.terminal_state(), u_T));
    return report;
}

StabilityReport stability_report(const std::vector<std::pair<SpectralCoeffs, SourceTerm>>& batch) {
    if (batch.empty())
        throw std::invalid_argument("stability_report: empty batch");

    StabilityReport report;
    bool any_nonzero = false;
    for (const auto& [u0, f] : batch) {
        const Trajectory traj = solve_forward(u0, f);
        const FinalData data{traj.terminal_state(), f};
        const double x1 = norm_X1(traj, f);
        const YNorm y1 = norm_Y1(data);
        if (y1.value == 0.0)
            continue;  // zero case carries no information
        any_nonzero = true;
        const double ratio = x1 / y1.value;
        report.ratios.push_back(ratio);
        report.c_max = std::max(report.c_max, ratio);
    }
    if (!any_nonzero)
        throw std::invalid_argument("stability_report: batch contains only zero data");
    return report;
}

std::vector<InstabilityRow> instability_table(const BasisPtr& basis, double T, std::size_t J) {
    if (!basis)
        throw std::invalid_argument("instability_table: missing basis");
    basis->validate();
    if (!(T >= 0.0))
        throw std::invalid_argument("instability_table: T must be >= 0");
    if (J + 1 > basis->truncation())
        throw std::invalid_argument("instability_table: J exceeds the truncation");

    std::vector<InstabilityRow> table;
    table.reserve(J);
    for (std::size_t j = 1; j <= J; ++j) {
        InstabilityRow row;
        row.j = j;
        row.lambda = basis->eigenvalues[j];
        const double exponent = row.lambda * T;
        if (exponent > kLogMax) {
            row.overflow = true;
            table.push_back(row);
            continue;
        }
        row.amplification = std::exp(exponent);

        if (T > 0.0) {
            // Reproduce the row by actually running the backward solver on
            // u_T = e_j, f = 0.
            SpectralCoeffs u_T = zero_coeffs(basis);
            u_T.values[j] = Complex{1.0, 0.0};
            const SourceTerm f = SourceTerm::zero(basis, TimeGrid::uniform(T, 8));
            const Trajectory back = solve_backward(FinalData{u_T, f}, OverflowPolicy::fail);
            const double measured = norm0(back.state_at(0));
            row.backward_check_rel_err =
                std::abs(measured - row.amplification) / row.amplification;
        }
        table.push_back(row);
    }
    return table;
}

std::vector<ChainRow> domain_chain_demo(const BasisPtr& basis, double t, double t_prime,
                                        std::optional<double> t_mid) {
    if (!basis)
        throw std::invalid_argument("domain_chain_demo: missing basis");
    basis->validate();
    if (!(t > 0.0) || !(t < t_prime))
        throw std::invalid_argument("domain_chain_demo: requires 0 < t < t'");
    const double mid = t_mid.value_or(0.5 * (t + t_prime));
    if (!(mid > t && mid < t_prime))
        throw std::invalid_argument("domain_chain_demo: t'' must lie strictly between t and t'");

    // w_k = e^{-λ_k t''}: inside D(e^{tA}) but outside D(e^{t'A}) in the
    // decay-rate sense.  Everything stays in log scale.
    std::vector<ChainRow> table(basis->truncation());
    LogSumExp acc_t, acc_tp;
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        const double lam = basis->eigenvalues[k];
        acc_t.add(2.0 * lam * (t - mid));
        acc_tp.add(2.0 * lam * (t_prime - mid));
        table[k].N = k + 1;
        table[k].log_norm_t = 0.5 * acc_t.log_value();
        table[k].log_norm_t_prime = 0.5 * acc_tp.log_value();
    }
    return table;
}

} // namespace fvheat
