// fvheat — spectral toolkit for forward and final-value (backward) heat
// problems with the homogeneous Neumann condition, plus a matrix laboratory
// for non-normal operator diagnostics.
//
// Subcommands: forward, backward, compat, instability, weyl, logconv,
// roundtrip, matrix.  Every run writes CSV tables and/or a JSON report into
// --out; reports embed the resolved configuration and the toolkit version.
// Exit codes: 0 ok, 2 malformed input, 3 configuration violation,
// 4 incompatibility or overflow under policy=fail.

#include <CLI11.hpp>

#include <complex>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "fvheat/domains.hpp"
#include "fvheat/errors.hpp"
#include "fvheat/final_value.hpp"
#include "fvheat/io.hpp"
#include "fvheat/matrix_lab.hpp"
#include "fvheat/version.hpp"

namespace fs = std::filesystem;
using namespace fvheat;

namespace {

// Signals the uniform exit-code scheme's code 4 for verdict-level failures
// (OverflowError covers the overflow flavor).
struct IncompatibleExit {
    std::string message;
};

struct CommonOpts {
    std::string basis = "interval";
    double L = std::numbers::pi;
    double Lx = 1.0;
    double Ly = 1.0;
    std::size_t N = 16;
    std::size_t Nx = 0;  // 0: fall back to N
    std::size_t Ny = 0;
    double T = 1.0;
    std::size_t steps = 16;
    double theta = 0.5;
    std::uint64_t seed = 1;
    std::string policy = "fail";
    std::string out = ".";
};

void add_common(CLI::App* cmd, CommonOpts& o) {
    cmd->add_option("--basis", o.basis, "Domain kind: interval|rectangle")
        ->check(CLI::IsMember({"interval", "rectangle"}));
    cmd->add_option("--L", o.L, "Interval length");
    cmd->add_option("--Lx", o.Lx, "Rectangle side length in x");
    cmd->add_option("--Ly", o.Ly, "Rectangle side length in y");
    cmd->add_option("--N", o.N, "Retained mode count (per axis on the rectangle)");
    cmd->add_option("--Nx", o.Nx, "Rectangle modes in x (defaults to N)");
    cmd->add_option("--Ny", o.Ny, "Rectangle modes in y (defaults to N)");
    cmd->add_option("--T", o.T, "Time horizon");
    cmd->add_option("--steps", o.steps, "Uniform time steps");
    cmd->add_option("--theta", o.theta, "Interpolation exponent in (0,1)");
    cmd->add_option("--seed", o.seed, "RNG seed for generated fixtures");
    cmd->add_option("--policy", o.policy, "Overflow policy: fail|zero|saturate")
        ->check(CLI::IsMember({"fail", "zero", "saturate"}));
    cmd->add_option("--out", o.out, "Output directory");
    static std::string config_path;
    cmd->add_option("--config", config_path, "key=value configuration file (flags win)");
}

// Expands `--config FILE` into ordinary arguments: each key=value line whose
// --key is absent from the command line is appended, so flags always win.
std::vector<std::string> expand_config_args(int argc, char** argv) {
    std::vector<std::string> args(argv, argv + argc);
    std::string config_file;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size())
            config_file = args[i + 1];
        else if (args[i].rfind("--config=", 0) == 0)
            config_file = args[i].substr(9);
    }
    if (config_file.empty())
        return args;

    std::ifstream in(config_file);
    if (!in)
        throw InputError("cannot open config file: " + config_file);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        const auto first = line.find_first_not_of(" \t");
        if (first == std::string::npos || line[first] == '#')
            continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(config_file + ":" + std::to_string(line_no) +
                              ": expected key=value");
        const std::string key = line.substr(first, eq - first);
        const std::string value = line.substr(eq + 1);
        const std::string flag = "--" + key;
        bool already = false;
        for (const std::string& a : args)
            if (a == flag || a.rfind(flag + "=", 0) == 0)
                already = true;
        if (!already) {
            args.push_back(flag);
            args.push_back(value);
        }
    }
    return args;
}

OverflowPolicy parse_policy(const std::string& s) {
    if (s == "fail")
        return OverflowPolicy::fail;
    if (s == "zero")
        return OverflowPolicy::zero;
    if (s == "saturate")
        return OverflowPolicy::saturate;
    throw ConfigError("unknown overflow policy: " + s);
}

BasisPtr make_basis(const CommonOpts& o) {
    if (!(o.T > 0.0) || o.N < 1 || o.steps < 1)
        throw ConfigError("T, N and steps must be positive");
    if (o.basis == "interval")
        return interval_basis(IntervalDomain{o.L}, o.N);
    const std::size_t nx = o.Nx ? o.Nx : o.N;
    const std::size_t ny = o.Ny ? o.Ny : o.N;
    return rectangle_basis(RectangleDomain{o.Lx, o.Ly}, nx, ny);
}

Json config_echo(const std::string& subcommand, const CommonOpts& o) {
    Json j;
    j["subcommand"] = subcommand;
    j["basis"] = o.basis;
    if (o.basis == "interval") {
        j["L"] = o.L;
    } else {
        j["Lx"] = o.Lx;
        j["Ly"] = o.Ly;
        j["Nx"] = o.Nx ? o.Nx : o.N;
        j["Ny"] = o.Ny ? o.Ny : o.N;
    }
    j["N"] = o.N;
    j["T"] = o.T;
    j["steps"] = o.steps;
    j["theta"] = o.theta;
    j["seed"] = o.seed;
    j["policy"] = o.policy;
    j["out"] = o.out;
    return j;
}

void write_report(const fs::path& path, Json j) {
    j["version"] = kVersion;
    write_text_file(path, j.dump(2) + "\n");
    std::cout << "wrote " << path.string() << "\n";
}

// Reads a coefficient file and rebinds it onto the configured basis; the file
// must carry identical eigenvalues.
SpectralCoeffs read_coeffs_for(const BasisPtr& basis, const fs::path& path) {
    SpectralCoeffs c = read_coeffs_csv(path);
    if (!same_basis(*c.basis, *basis))
        throw InputError(path.string() + ": coefficient basis disagrees with the configured basis");
    c.basis = basis;
    return c;
}

SourceTerm load_or_zero_source(const BasisPtr& basis, const CommonOpts& o,
                               const std::string& f_path) {
    if (f_path.empty())
        return SourceTerm::zero(basis, TimeGrid::uniform(o.T, o.steps));
    SourceTerm f = read_source_csv(f_path, basis);
    if (f.grid.horizon() != o.T)
        throw ConfigError("source horizon " + fmt_double(f.grid.horizon()) +
                          " disagrees with --T " + fmt_double(o.T));
    return f;
}

SpectralCoeffs random_profile_coeffs(const BasisPtr& basis, std::mt19937_64& rng, double decay) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SpectralCoeffs c = zero_coeffs(basis);
    for (std::size_t k = 0; k < c.size(); ++k)
        c.values[k] = Complex(uni(rng), uni(rng)) * std::exp(-decay * basis->eigenvalues[k]);
    return c;
}

SourceTerm random_profile_source(const BasisPtr& basis, const TimeGrid& grid,
                                 std::mt19937_64& rng, double decay) {
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    SourceTerm f = SourceTerm::zero(basis, grid);
    for (std::size_t k = 0; k < basis->truncation(); ++k) {
        const double scale = std::exp(-decay * basis->eigenvalues[k]);
        for (std::size_t m = 0; m < grid.node_count(); ++m)
            f.at(k, m) = Complex(uni(rng), uni(rng)) * scale;
    }
    return f;
}

// --- subcommand drivers -----------------------------------------------------

int run_forward(const CommonOpts& o, const std::string& u0_path, const std::string& f_path) {
    const BasisPtr basis = make_basis(o);
    const SpectralCoeffs u0 = read_coeffs_for(basis, u0_path);
    const SourceTerm f = load_or_zero_source(basis, o, f_path);

    const Trajectory traj = solve_forward(u0, f);
    const fs::path out(o.out);
    write_trajectory_csv(out / "forward_trajectory.csv", traj);
    std::cout << "wrote " << (out / "forward_trajectory.csv").string() << "\n";

    Json j;
    j["config"] = config_echo("forward", o);
    j["norm_X0"] = norm_X0(traj, f);
    j["norm_X1"] = norm_X1(traj, f);
    j["norm_X0_equivalent"] = norm_X0_equivalent(traj, f);
    j["terminal_norm_H"] = sobolev_norm(traj.terminal_state(), SobolevScale{0});
    write_report(out / "forward_norms.json", std::move(j));
    return 0;
}

int run_backward(const CommonOpts& o, const std::string& uT_path, const std::string& f_path,
                 const std::string& space, double margin_eps, double tail_rel,
                 double growth_factor, double cutoff) {
    const BasisPtr basis = make_basis(o);
    const OverflowPolicy policy = parse_policy(o.policy);
    const SpectralCoeffs u_T = read_coeffs_for(basis, uT_path);
    const SourceTerm f = load_or_zero_source(basis, o, f_path);
    const FinalData data{u_T, f};

    CompatThresholds thresholds = CompatThresholds::defaults(o.T);
    if (margin_eps > 0.0)
        thresholds.epsilon_margin = margin_eps;
    thresholds.tail_rel = tail_rel;
    thresholds.growth_factor = growth_factor;
    const TargetSpace target = space == "Y0" ? TargetSpace::Y0 : TargetSpace::Y1;
    const CompatibilityReport report = check_compatibility(data, target, thresholds);

    const fs::path out(o.out);
    Json jc = to_json(report);
    jc["config"] = config_echo("backward", o);

    if (cutoff > 0.0) {
        const BackwardResult rec = reconstruct_initial_cutoff(data, cutoff, policy);
        SpectralCoeffs u0 = rec.coeffs;
        write_coeffs_csv(out / "backward_u0_cutoff.csv", u0);
        std::cout << "wrote " << (out / "backward_u0_cutoff.csv").string() << "\n";
        jc["cutoff_reconstruction"] = {
            {"lambda_T_cap", cutoff},
            {"note", "spectral cutoff regularization: beyond the exact theory; "
                     "reconstructed from the retained modes only"},
            {"zeroed_modes", [&] {
                 Json arr = Json::array();
                 for (std::size_t k = 0; k < basis->truncation(); ++k)
                     if (basis->eigenvalues[k] * o.T > cutoff)
                         arr.push_back(k);
                 return arr;
             }()},
        };
    }

    if (report.verdict == Verdict::INCOMPATIBLE && policy == OverflowPolicy::fail) {
        write_report(out / "compat_report.json", std::move(jc));
        throw IncompatibleExit{"verdict INCOMPATIBLE under policy=fail"};
    }

    const Trajectory traj = solve_backward(data, policy);
    write_trajectory_csv(out / "backward_trajectory.csv", traj);
    std::cout << "wrote " << (out / "backward_trajectory.csv").string() << "\n";
    write_report(out / "compat_report.json", std::move(jc));

    Json jy;
    jy["config"] = config_echo("backward", o);
    const YNorm y0 = norm_Y0(data);
    const YNorm y1 = norm_Y1(data);
    jy["norm_Y0"] = {{"value", y0.value}, {"divergent", y0.divergent}};
    jy["norm_Y1"] = {{"value", y1.value}, {"divergent", y1.divergent}};
    jy["reconstruction_overflow_modes"] = [&] {
        Json arr = Json::array();
        for (std::size_t k = 0; k < traj.mode_overflow.size(); ++k)
            if (traj.mode_overflow[k])
                arr.push_back(k);
        return arr;
    }();
    write_report(out / "backward_norms.json", std::move(jy));
    return 0;
}

int run_compat(const CommonOpts& o, const std::string& uT_path, const std::string& f_path,
               const std::string& space) {
    const BasisPtr basis = make_basis(o);
    const SpectralCoeffs u_T = read_coeffs_for(basis, uT_path);
    const SourceTerm f = load_or_zero_source(basis, o, f_path);
    const FinalData data{u_T, f};
    const TargetSpace target = space == "Y0" ? TargetSpace::Y0 : TargetSpace::Y1;
    const CompatibilityReport report = check_compatibility(data, target);

    const fs::path out(o.out);
    write_margins_csv(out / "compat_margins.csv", *basis, report.margins);
    write_partial_norms_csv(out / "compat_partial_norms.csv",
                            target == TargetSpace::Y0 ? report.partial_norms_h
                                                      : report.partial_norms_h1);
    std::cout << "wrote " << (out / "compat_margins.csv").string() << "\n";
    std::cout << "wrote " << (out / "compat_partial_norms.csv").string() << "\n";

    Json j = to_json(report);
    j["config"] = config_echo("compat", o);
    write_report(out / "compat_report.json", std::move(j));
    std::cout << "verdict: " << to_string(report.verdict) << "\n";
    return 0;
}

int run_instability(const CommonOpts& o, std::size_t J) {
    const BasisPtr basis = make_basis(o);
    if (J + 1 > basis->truncation())
        throw ConfigError("J must be below the truncation");
    const auto table = instability_table(basis, o.T, J);

    const fs::path out(o.out);
    write_instability_csv(out / "instability.csv", table);
    std::cout << "wrote " << (out / "instability.csv").string() << "\n";

    Json rows = Json::array();
    for (const auto& row : table) {
        Json r;
        r["j"] = row.j;
        r["lambda"] = row.lambda;
        if (row.overflow) {
            r["amplification"] = "OVERFLOW";
        } else {
            r["amplification"] = row.amplification;
            r["backward_check_rel_err"] = row.backward_check_rel_err;
        }
        rows.push_back(r);
    }
    Json j;
    j["config"] = config_echo("instability", o);
    j["rows"] = rows;
    write_report(out / "instability.json", std::move(j));
    return 0;
}

int run_weyl(const CommonOpts& o, double lam) {
    const BasisPtr basis = make_basis(o);
    const WeylCount w = weyl_count(*basis, lam);
    Json j;
    j["config"] = config_echo("weyl", o);
    j["lambda"] = lam;
    j["count"] = w.count;
    j["leading_term"] = w.leading_term;
    j["difference"] = w.difference;
    j["truncation_limited"] = w.truncation_limited;
    write_report(fs::path(o.out) / "weyl.json", std::move(j));
    std::cout << "N(" << fmt_double(lam) << ") = " << w.count << "\n";
    return 0;
}

MatrixOperator matrix_from_flags(const std::string& matrix_path, const std::string& fixture,
                                 std::size_t adv_n, int adv_sign, const std::string& bc_left,
                                 const std::string& bc_right) {
    if (!matrix_path.empty())
        return read_matrix_csv(matrix_path);
    if (fixture == "jordan") {
        MatrixOperator op;
        op.A = Eigen::MatrixXcd::Zero(2, 2);
        op.A(0, 0) = 1.0;
        op.A(0, 1) = 1.0;
        op.A(1, 1) = 1.0;
        return op;
    }
    if (fixture == "diag") {
        MatrixOperator op;
        op.A = Eigen::MatrixXcd::Zero(2, 2);
        op.A(0, 0) = 1.0;
        op.A(1, 1) = 2.0;
        return op;
    }
    if (fixture == "advection") {
        auto parse_bc = [](const std::string& s) {
            if (s == "dirichlet")
                return BoundaryCondition{BoundaryKind::dirichlet, 0.0};
            if (s == "neumann")
                return BoundaryCondition{BoundaryKind::neumann, 0.0};
            if (s.rfind("robin:", 0) == 0)
                return BoundaryCondition{BoundaryKind::robin, std::stod(s.substr(6))};
            throw ConfigError("bad boundary condition: " + s +
                              " (use dirichlet|neumann|robin:<beta>)");
        };
        return advection_diffusion_builder(adv_n, adv_sign, parse_bc(bc_left),
                                           parse_bc(bc_right));
    }
    throw ConfigError("unknown matrix fixture: " + fixture);
}

int run_logconv(const CommonOpts& o, const std::string& matrix_path, const std::string& fixture,
                std::size_t samples, std::size_t refine, std::size_t adv_n, int adv_sign,
                const std::string& bc_left, const std::string& bc_right) {
    const MatrixOperator op =
        matrix_from_flags(matrix_path, fixture, adv_n, adv_sign, bc_left, bc_right);

    SamplerSpec spec;
    spec.count = samples;
    spec.seed = o.seed;
    spec.refine_rounds = refine;
    const CriterionResult crit = logconvexity_criterion_min(op, spec);

    const TimeGrid grid = TimeGrid::uniform(o.T, o.steps);
    const HeightCurve curve = height_curve(op, crit.argmin, grid);
    const LogConvexityCheck check = logconvexity_check(curve);

    const fs::path out(o.out);
    write_height_curve_csv(out / "height_curve.csv", curve);
    std::cout << "wrote " << (out / "height_curve.csv").string() << "\n";

    Json j;
    j["config"] = config_echo("logconv", o);
    j["samples"] = samples;
    j["refine_rounds"] = refine;
    j["criterion_min"] = crit.min_value;
    j["criterion_holds"] = crit.holds;
    j["curve_min_defect"] = check.min_defect;
    j["curve_log_convex"] = check.log_convex;
    j["detectors_agree"] = (crit.min_value < 0.0) == (check.min_defect < 0.0) ||
                           std::abs(check.min_defect) <= 1e-9 * check.scale;
    j["profile"] = to_json(coercivity_profile(op));
    j["hyponormality_gap"] = hyponormality_gap(op);
    write_report(out / "logconv.json", std::move(j));
    return 0;
}

int run_roundtrip(const CommonOpts& o, std::size_t count) {
    const BasisPtr basis = make_basis(o);
    if (basis->lambda_max() * o.T > 300.0)
        throw ConfigError("lambda_max * T exceeds the overflow budget; lower --N or --T");
    std::mt19937_64 rng(o.seed);

    double worst_node = 0.0, worst_terminal = 0.0, worst_initial = 0.0;
    double ceiling = 1.0;
    bool within = true;
    for (std::size_t i = 0; i < count; ++i) {
        const SpectralCoeffs u0 = random_profile_coeffs(basis, rng, 0.0);
        const SourceTerm f =
            random_profile_source(basis, TimeGrid::uniform(o.T, o.steps), rng, 0.0);
        const RoundTripReport r = roundtrip(u0, f, parse_policy(o.policy));
        ceiling = r.amplification_ceiling;
        worst_node = std::max(worst_node, r.max_node_residual);
        worst_terminal = std::max(worst_terminal, r.terminal_residual);
        worst_initial = std::max(worst_initial, r.initial_residual_h1);
        if (r.max_node_residual > r.amplification_ceiling * 1e-12 * r.scale)
            within = false;
    }

    Json j;
    j["config"] = config_echo("roundtrip", o);
    j["cases"] = count;
    j["amplification_ceiling"] = ceiling;
    j["max_node_residual"] = worst_node;
    j["max_terminal_residual"] = worst_terminal;
    j["max_initial_residual_h1"] = worst_initial;
    j["within_bound"] = within;
    write_report(fs::path(o.out) / "roundtrip.json", std::move(j));
    if (!within)
        throw IncompatibleExit{"round-trip residual exceeded the amplification bound"};
    return 0;
}

int run_matrix(const CommonOpts& o, const std::string& matrix_path, const std::string& fixture,
               std::size_t adv_n, int adv_sign, const std::string& bc_left,
               const std::string& bc_right) {
    const MatrixOperator op =
        matrix_from_flags(matrix_path, fixture, adv_n, adv_sign, bc_left, bc_right);
    const Eigen::Index n = op.A.rows();

    Json j;
    j["config"] = config_echo("matrix", o);
    j["n"] = n;

    const CoercivityProfile profile = coercivity_profile(op);
    j["profile"] = to_json(profile);
    j["hyponormality_gap"] = hyponormality_gap(op);

    MatrixOperator gen;
    gen.A = -op.A;
    const double abscissa = spectral_abscissa(gen);

    // Resolvent sector: omega just above the abscissa keeps the sector clean.
    const double omega = abscissa + 0.1 * std::max(1.0, std::abs(abscissa));
    const SectorCheck sector = sector_check(gen, omega, 0.9 * profile.theta);
    j["sector"] = {{"omega", omega},
                   {"theta", 0.9 * profile.theta},
                   {"sup", sector.sup},
                   {"near_singular", sector.near_singular}};

    const std::complex<double> lambda(std::max(profile.C3 + 1.0, abscissa + 1.0), 0.0);
    const LaplaceCheck laplace = laplace_identity_check(gen, lambda, 40.0 / (lambda.real() - abscissa), 4001);
    j["laplace"] = {{"lambda_re", lambda.real()},
                    {"defect", laplace.defect},
                    {"truncation_bound", laplace.truncation_bound}};

    const TranslationCheck trans = translation_check(gen, {1.0, 1.0}, 0.7);
    j["translation"] = {{"defect", trans.defect}, {"defect_rel", trans.defect_rel}};

    std::mt19937_64 rng(o.seed);
    std::normal_distribution<double> gauss(0.0, 1.0);
    auto rand_vec = [&] {
        Eigen::VectorXcd v(n);
        for (Eigen::Index i = 0; i < n; ++i)
            v(i) = Complex(gauss(rng), gauss(rng));
        return v;
    };
    const Eigen::VectorXcd v = rand_vec();
    const Eigen::VectorXcd w = rand_vec();
    const InjectivityProbe probe = injectivity_probe(gen, v, w, TimeGrid::uniform(1.0, 16));
    j["injectivity"] = {{"min_norm", probe.min_norm},
                        {"lower_bound", probe.lower_bound},
                        {"argmin_node", probe.argmin_node}};

    // Matrix final value round trip: cap T so kappa stays near e^{24} and the
    // recovery is meaningful, not just within its kappa-scaled bound.
    const double fvp_T = std::min(o.T, 12.0 / std::max(1.0, spectral_abscissa(op)));
    const TimeGrid grid = TimeGrid::uniform(fvp_T, o.steps);
    const Eigen::VectorXcd u0 = rand_vec();
    std::vector<Eigen::VectorXcd> f(grid.node_count(), Eigen::VectorXcd::Zero(n));
    Eigen::VectorXcd u_T = matrix_exponential(op, -fvp_T) * u0;
    const MatrixFvpResult fvp = matrix_fvp_solve(op, u_T, f, grid);
    j["fvp"] = {{"T", fvp_T},
                {"kappa", fvp.kappa},
                {"u0_recovery_rel_err", (fvp.u0 - u0).norm() / u0.norm()},
                {"terminal_residual", fvp.terminal_residual}};

    SamplerSpec spec;
    spec.seed = o.seed;
    const CriterionResult crit = logconvexity_criterion_min(op, spec);
    j["criterion_min"] = crit.min_value;
    j["criterion_holds"] = crit.holds;

    write_report(fs::path(o.out) / "matrix_report.json", std::move(j));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"fvheat: spectral forward/backward heat toolkit"};
    app.require_subcommand(1);

    CommonOpts common;
    std::function<int()> action;

    // forward
    {
        auto* cmd = app.add_subcommand("forward", "Solve the forward problem from u0 (and f)");
        static std::string u0_path, f_path;
        add_common(cmd, common);
        cmd->add_option("--u0", u0_path, "Initial state coefficient CSV")->required();
        cmd->add_option("--f", f_path, "Source term CSV (time,mode,re,im); zero if omitted");
        cmd->callback([&] { action = [&] { return run_forward(common, u0_path, f_path); }; });
    }
    // backward
    {
        auto* cmd = app.add_subcommand("backward", "Solve the final value problem from u_T (and f)");
        static std::string uT_path, f_path, space = "Y1";
        static double margin_eps = 0.0, tail_rel = 1e-6, growth_factor = 10.0, cutoff = 0.0;
        add_common(cmd, common);
        cmd->add_option("--uT", uT_path, "Final state coefficient CSV")->required();
        cmd->add_option("--f", f_path, "Source term CSV; zero if omitted");
        cmd->add_option("--space", space, "Target data space: Y0|Y1")
            ->check(CLI::IsMember({"Y0", "Y1"}));
        cmd->add_option("--margin-eps", margin_eps, "Decay margin (default 0.05*T)");
        cmd->add_option("--tail-rel", tail_rel, "Partial-norm tail threshold");
        cmd->add_option("--growth-factor", growth_factor, "Partial-norm growth threshold");
        cmd->add_option("--cutoff", cutoff, "Spectral cutoff cap on lambda*T (0: off)");
        cmd->callback([&] {
            action = [&] {
                return run_backward(common, uT_path, f_path, space, margin_eps, tail_rel,
                                    growth_factor, cutoff);
            };
        });
    }
    // compat
    {
        auto* cmd = app.add_subcommand("compat", "Compatibility diagnostics for (f, u_T)");
        static std::string uT_path, f_path, space = "Y1";
        add_common(cmd, common);
        cmd->add_option("--uT", uT_path, "Final state coefficient CSV")->required();
        cmd->add_option("--f", f_path, "Source term CSV; zero if omitted");
        cmd->add_option("--space", space, "Target data space: Y0|Y1")
            ->check(CLI::IsMember({"Y0", "Y1"}));
        cmd->callback([&] { action = [&] { return run_compat(common, uT_path, f_path, space); }; });
    }
    // instability
    {
        auto* cmd = app.add_subcommand("instability", "Amplification table e^{T lambda_j}");
        static std::size_t J = 3;
        add_common(cmd, common);
        cmd->add_option("--J", J, "Row count (modes 1..J)");
        cmd->callback([&] { action = [&] { return run_instability(common, J); }; });
    }
    // weyl
    {
        auto* cmd = app.add_subcommand("weyl", "Eigenvalue counting vs the Weyl leading term");
        static double lam = 10.0;
        add_common(cmd, common);
        cmd->add_option("--lam", lam, "Counting threshold lambda");
        cmd->callback([&] { action = [&] { return run_weyl(common, lam); }; });
    }
    // logconv
    {
        auto* cmd = app.add_subcommand("logconv", "Log-convexity diagnostics for a matrix operator");
        static std::string matrix_path, fixture = "jordan", bc_left = "dirichlet",
                           bc_right = "neumann";
        static std::size_t samples = 2048, refine = 24, adv_n = 16;
        static int adv_sign = 1;
        add_common(cmd, common);
        cmd->add_option("--matrix", matrix_path, "Matrix CSV (triplets or dense)");
        cmd->add_option("--fixture", fixture, "Built-in operator: jordan|diag|advection")
            ->check(CLI::IsMember({"jordan", "diag", "advection"}));
        cmd->add_option("--samples", samples, "Criterion sample count");
        cmd->add_option("--refine", refine, "Criterion refinement rounds");
        cmd->add_option("--adv-n", adv_n, "Advection fixture dimension");
        cmd->add_option("--adv-sign", adv_sign, "Advection sign: +1|-1");
        cmd->add_option("--bc-left", bc_left, "Left boundary: dirichlet|neumann|robin:<beta>");
        cmd->add_option("--bc-right", bc_right, "Right boundary: dirichlet|neumann|robin:<beta>");
        cmd->callback([&] {
            action = [&] {
                return run_logconv(common, matrix_path, fixture, samples, refine, adv_n,
                                   adv_sign, bc_left, bc_right);
            };
        });
    }
    // roundtrip
    {
        auto* cmd = app.add_subcommand("roundtrip", "Forward-backward isomorphism residuals");
        static std::size_t count = 100;
        add_common(cmd, common);
        cmd->add_option("--count", count, "Number of random cases");
        cmd->callback([&] { action = [&] { return run_roundtrip(common, count); }; });
    }
    // matrix
    {
        auto* cmd = app.add_subcommand("matrix", "Semigroup and coercivity diagnostics for a matrix");
        static std::string matrix_path, fixture = "advection", bc_left = "dirichlet",
                           bc_right = "neumann";
        static std::size_t adv_n = 16;
        static int adv_sign = 1;
        add_common(cmd, common);
        cmd->add_option("--matrix", matrix_path, "Matrix CSV (triplets or dense)");
        cmd->add_option("--fixture", fixture, "Built-in operator: jordan|diag|advection")
            ->check(CLI::IsMember({"jordan", "diag", "advection"}));
        cmd->add_option("--adv-n", adv_n, "Advection fixture dimension");
        cmd->add_option("--adv-sign", adv_sign, "Advection sign: +1|-1");
        cmd->add_option("--bc-left", bc_left, "Left boundary: dirichlet|neumann|robin:<beta>");
        cmd->add_option("--bc-right", bc_right, "Right boundary: dirichlet|neumann|robin:<beta>");
        cmd->callback([&] {
            action = [&] {
                return run_matrix(common, matrix_path, fixture, adv_n, adv_sign, bc_left,
                                  bc_right);
            };
        });
    }

    try {
        std::vector<std::string> args = expand_config_args(argc, argv);
        std::vector<char*> argv2;
        argv2.reserve(args.size());
        for (std::string& a : args)
            argv2.push_back(a.data());
        app.parse(static_cast<int>(argv2.size()), argv2.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    }

    try {
        return action ? action() : 3;
    } catch (const InputError& e) {
        std::cerr << "input error: " << e.what() << "\n";
        return 2;
    } catch (const OverflowError& e) {
        std::cerr << "overflow: " << e.what() << "\n";
        return 4;
    } catch (const IncompatibleExit& e) {
        std::cerr << "incompatible: " << e.message << "\n";
        return 4;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
