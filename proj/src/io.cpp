#include "fvheat/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>

#include "fvheat/domains.hpp"
#include "fvheat/errors.hpp"

namespace fvheat {

namespace {

std::vector<std::string> split(const std::string& line, char sep) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, sep))
        out.push_back(field);
    if (!line.empty() && line.back() == sep)
        out.emplace_back();
    return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path, std::size_t line_no) {
    try {
        std::size_t pos = 0;
        const double value = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos])))
            ++pos;
        if (pos != s.size())
            throw std::invalid_argument("trailing characters");
        return value;
    } catch (const std::exception&) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": cannot parse number '" << s << "'";
        throw InputError(msg.str());
    }
}

std::size_t parse_index(const std::string& s, const std::filesystem::path& path,
                        std::size_t line_no) {
    const double v = parse_double(s, path, line_no);
    if (v < 0.0 || v != std::floor(v)) {
        std::ostringstream msg;
        msg << path.string() << ":" << line_no << ": expected a nonnegative integer, got '" << s
            << "'";
        throw InputError(msg.str());
    }
    return static_cast<std::size_t>(v);
}

std::ifstream open_input(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw InputError("cannot open input file: " + path.string());
    return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
    if (path.has_parent_path())
        std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);  // binary keeps LF endings
    if (!out)
        throw InputError("cannot open output file: " + path.string());
    return out;
}

// Parses `key=value` tokens from a `#` metadata line.
std::map<std::string, std::string> parse_metadata(const std::string& line) {
    std::map<std::string, std::string> meta;
    std::istringstream ss(line.substr(1));
    std::string token;
    while (ss >> token) {
        const auto eq = token.find('=');
        if (eq != std::string::npos)
            meta[token.substr(0, eq)] = token.substr(eq + 1);
    }
    return meta;
}

} // namespace

std::string fmt_double(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

void write_coeffs_csv(const std::filesystem::path& path, const SpectralCoeffs& coeffs) {
    coeffs.validate();
    std::ofstream out = open_output(path);
    out << "# domain=" << coeffs.basis->domain_tag << "\n";
    out << "mode,lambda,re,im\n";
    for (std::size_t k = 0; k < coeffs.size(); ++k)
        out << k << ',' << fmt_double(coeffs.basis->eigenvalues[k]) << ','
            << fmt_double(coeffs.values[k].real()) << ',' << fmt_double(coeffs.values[k].imag())
            << "\n";
}

SpectralCoeffs read_coeffs_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);

    std::map<std::string, std::string> meta;
    std::vector<double> lambdas;
    std::vector<Complex> values;
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            auto m = parse_metadata(line);
            meta.insert(m.begin(), m.end());
            continue;
        }
        if (!header_seen) {
            if (line != "mode,lambda,re,im")
                throw InputError(path.string() + ": expected header 'mode,lambda,re,im'");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 4 fields");
        const std::size_t mode = parse_index(fields[0], path, line_no);
        if (mode != lambdas.size())
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": modes must be ascending from 0");
        lambdas.push_back(parse_double(fields[1], path, line_no));
        values.emplace_back(parse_double(fields[2], path, line_no),
                            parse_double(fields[3], path, line_no));
    }
    if (!header_seen || lambdas.empty())
        throw InputError(path.string() + ": no coefficient rows found");

    BasisPtr basis;
    const auto domain = meta.find("domain");
    try {
        if (domain != meta.end() && domain->second == "interval" && meta.count("L")) {
            basis = interval_basis(IntervalDomain{std::stod(meta.at("L"))}, lambdas.size());
        } else if (domain != meta.end() && domain->second == "rectangle" && meta.count("Lx") &&
                   meta.count("Ly") && meta.count("Nx") && meta.count("Ny")) {
            basis = rectangle_basis(
                RectangleDomain{std::stod(meta.at("Lx")), std::stod(meta.at("Ly"))},
                std::stoul(meta.at("Nx")), std::stoul(meta.at("Ny")));
        } else {
            basis = make_custom_basis(lambdas);
        }
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": bad basis metadata: " + e.what());
    }
    if (basis->truncation() != lambdas.size())
        throw InputError(path.string() + ": metadata truncation disagrees with row count");
    for (std::size_t k = 0; k < lambdas.size(); ++k)
        if (basis->eigenvalues[k] != lambdas[k])
            throw InputError(path.string() + ": lambda column disagrees with basis metadata at mode " +
                             std::to_string(k));
    try {
        return make_coeffs(basis, std::move(values));
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
}

void write_time_series_csv(const std::filesystem::path& path, const BasisPtr& basis,
                           const TimeGrid& grid, const std::vector<Complex>& mode_major_values) {
    std::ofstream out = open_output(path);
    out << "# domain=" << basis->domain_tag << "\n";
    out << "time,mode,re,im\n";
    const std::size_t nodes = grid.node_count();
    for (std::size_t m = 0; m < nodes; ++m)
        for (std::size_t k = 0; k < basis->truncation(); ++k) {
            const Complex& c = mode_major_values[k * nodes + m];
            out << fmt_double(grid.nodes[m]) << ',' << k << ',' << fmt_double(c.real()) << ','
                << fmt_double(c.imag()) << "\n";
        }
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
    write_time_series_csv(path, traj.basis, traj.grid, traj.states);
}

void write_source_csv(const std::filesystem::path& path, const SourceTerm& f) {
    f.validate();
    write_time_series_csv(path, f.basis, f.grid, f.samples);
}

SourceTerm read_source_csv(const std::filesystem::path& path, const BasisPtr& basis) {
    std::ifstream in = open_input(path);

    std::vector<double> times;
    std::vector<std::vector<Complex>> per_time;  // [time][mode]
    std::string line;
    std::size_t line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#')
            continue;
        if (!header_seen) {
            if (line != "time,mode,re,im")
                throw InputError(path.string() + ": expected header 'time,mode,re,im'");
            header_seen = true;
            continue;
        }
        const auto fields = split(line, ',');
        if (fields.size() != 4)
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": expected 4 fields");
        const double t = parse_double(fields[0], path, line_no);
        const std::size_t mode = parse_index(fields[1], path, line_no);
        const Complex value(parse_double(fields[2], path, line_no),
                            parse_double(fields[3], path, line_no));
        if (times.empty() || t != times.back()) {
            if (!times.empty() && t <= times.back())
                throw InputError(path.string() + ":" + std::to_string(line_no) +
                                 ": time blocks must be strictly increasing");
            times.push_back(t);
            per_time.emplace_back();
        }
        if (mode != per_time.back().size())
            throw InputError(path.string() + ":" + std::to_string(line_no) +
                             ": modes must run 0..N-1 inside each time block");
        per_time.back().push_back(value);
    }
    if (times.size() < 2)
        throw InputError(path.string() + ": needs at least two time blocks");

    const std::size_t n = basis->truncation();
    for (const auto& block : per_time)
        if (block.size() != n)
            throw InputError(path.string() + ": mode count disagrees with the basis truncation");

    SourceTerm f;
    f.basis = basis;
    f.grid.nodes = times;
    try {
        f.grid.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    f.samples.resize(n * times.size());
    for (std::size_t m = 0; m < times.size(); ++m)
        for (std::size_t k = 0; k < n; ++k)
            f.at(k, m) = per_time[m][k];
    try {
        f.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return f;
}

void write_matrix_csv(const std::filesystem::path& path, const MatrixOperator& op) {
    op.validate();
    std::ofstream out = open_output(path);
    out << "# n=" << op.dim() << "\n";
    out << "row,col,re,im\n";
    for (Eigen::Index i = 0; i < op.A.rows(); ++i)
        for (Eigen::Index j = 0; j < op.A.cols(); ++j) {
            const Complex c = op.A(i, j);
            if (c == Complex{0.0, 0.0})
                continue;
            out << i << ',' << j << ',' << fmt_double(c.real()) << ',' << fmt_double(c.imag())
                << "\n";
        }
}

MatrixOperator read_matrix_csv(const std::filesystem::path& path) {
    std::ifstream in = open_input(path);

    std::string line;
    std::size_t line_no = 0;
    std::size_t dim = 0;
    bool triplet_mode = false;
    bool header_seen = false;
    struct Triplet {
        std::size_t r, c;
        Complex v;
    };
    std::vector<Triplet> triplets;
    std::vector<std::vector<double>> dense;

    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (line.empty())
            continue;
        if (line[0] == '#') {
            const auto meta = parse_metadata(line);
            if (meta.count("n"))
                dim = std::stoul(meta.at("n"));
            continue;
        }
        if (!header_seen && line == "row,col,re,im") {
            triplet_mode = true;
            header_seen = true;
            continue;
        }
        header_seen = true;
        const auto fields = split(line, ',');
        if (triplet_mode) {
            if (fields.size() != 4)
                throw InputError(path.string() + ":" + std::to_string(line_no) +
                                 ": expected 4 fields");
            Triplet t;
            t.r = parse_index(fields[0], path, line_no);
            t.c = parse_index(fields[1], path, line_no);
            t.v = Complex(parse_double(fields[2], path, line_no),
                          parse_double(fields[3], path, line_no));
            triplets.push_back(t);
        } else {
            std::vector<double> row;
            row.reserve(fields.size());
            for (const auto& fstr : fields)
                row.push_back(parse_double(fstr, path, line_no));
            if (!dense.empty() && row.size() != dense.front().size())
                throw InputError(path.string() + ":" + std::to_string(line_no) +
                                 ": ragged dense matrix row");
            dense.push_back(std::move(row));
        }
    }

    MatrixOperator op;
    if (triplet_mode) {
        std::size_t max_index = 0;
        for (const auto& t : triplets)
            max_index = std::max({max_index, t.r, t.c});
        const std::size_t n = std::max(dim, triplets.empty() ? 0 : max_index + 1);
        if (n == 0)
            throw InputError(path.string() + ": empty matrix");
        op.A = Eigen::MatrixXcd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
        for (const auto& t : triplets) {
            if (t.r >= n || t.c >= n)
                throw InputError(path.string() + ": triplet index outside the declared dimension");
            op.A(static_cast<Eigen::Index>(t.r), static_cast<Eigen::Index>(t.c)) = t.v;
        }
    } else {
        if (dense.empty() || dense.size() != dense.front().size())
            throw InputError(path.string() + ": dense matrix must be square and nonempty");
        const auto n = static_cast<Eigen::Index>(dense.size());
        op.A = Eigen::MatrixXcd::Zero(n, n);
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < n; ++j)
                op.A(i, j) = dense[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    }
    try {
        op.validate();
    } catch (const std::invalid_argument& e) {
        throw InputError(path.string() + ": " + e.what());
    }
    return op;
}

void write_samples_csv(const std::filesystem::path& path, const std::vector<double>& xs,
                       const std::vector<Complex>& values) {
    if (xs.size() != values.size())
        throw std::invalid_argument("write_samples_csv: size mismatch");
    std::ofstream out = open_output(path);
    out << "x,value_re,value_im\n";
    for (std::size_t i = 0; i < xs.size(); ++i)
        out << fmt_double(xs[i]) << ',' << fmt_double(values[i].real()) << ','
            << fmt_double(values[i].imag()) << "\n";
}

namespace {

Json json_number(double x) {
    if (std::isfinite(x))
        return x;
    return nullptr;  // -inf margins of zero modes serialize as null
}

} // namespace

Json to_json(const DecayEstimate& decay) {
    Json j;
    j["rho"] = decay.determined ? Json(decay.rho) : Json(nullptr);
    j["residual"] = decay.determined ? Json(decay.fit_residual) : Json(nullptr);
    j["determined"] = decay.determined;
    j["modes_used"] = decay.modes_used;
    j["first_mode"] = decay.first_mode;
    j["last_mode"] = decay.last_mode;
    return j;
}

Json to_json(const CompatibilityReport& report) {
    Json j;
    j["verdict"] = to_string(report.verdict);
    j["target_space"] = to_string(report.target_space);
    j["thresholds"] = {
        {"epsilon_margin", report.thresholds.epsilon_margin},
        {"tail_rel", report.thresholds.tail_rel},
        {"growth_factor", report.thresholds.growth_factor},
        {"decay_tail_fraction", report.thresholds.decay_tail_fraction},
    };
    j["T"] = report.T;
    j["tail_converged"] = report.tail_converged;
    j["monotone_growth"] = report.monotone_growth;
    // Per-mode margins need the basis; callers append lambda via the CSV
    // table.  Here margins travel with their mode index.
    Json per_mode = Json::array();
    for (std::size_t k = 0; k < report.margins.size(); ++k)
        per_mode.push_back({{"mode", k}, {"margin", json_number(report.margins[k])}});
    j["per_mode"] = per_mode;

    const auto& table =
        report.target_space == TargetSpace::Y0 ? report.partial_norms_h : report.partial_norms_h1;
    Json partial = Json::array();
    for (const PartialNormRow& row : table)
        partial.push_back({{"N", row.N},
                           {"value", row.value},
                           {"log_value", json_number(row.log_value)},
                           {"overflow", row.overflow}});
    j["partial_norms"] = partial;
    j["decay"] = to_json(report.decay);
    return j;
}

Json to_json(const RoundTripReport& report) {
    return Json{{"max_node_residual", report.max_node_residual},
                {"initial_residual_h1", report.initial_residual_h1},
                {"terminal_residual", report.terminal_residual},
                {"amplification_ceiling", report.amplification_ceiling},
                {"scale", report.scale}};
}

Json to_json(const CoercivityProfile& profile) {
    return Json{{"C3", profile.C3}, {"C4", profile.C4}, {"k", profile.k}, {"theta", profile.theta}};
}

void write_margins_csv(const std::filesystem::path& path, const SpectralBasis& basis,
                       const std::vector<double>& margins) {
    std::ofstream out = open_output(path);
    out << "mode,lambda,margin\n";
    for (std::size_t k = 0; k < margins.size(); ++k) {
        out << k << ',' << fmt_double(basis.eigenvalues[k]) << ',';
        if (std::isfinite(margins[k]))
            out << fmt_double(margins[k]);
        else
            out << "-inf";
        out << "\n";
    }
}

void write_partial_norms_csv(const std::filesystem::path& path,
                             const std::vector<PartialNormRow>& table) {
    std::ofstream out = open_output(path);
    out << "N,value,log_value,overflow\n";
    for (const PartialNormRow& row : table) {
        out << row.N << ',' << fmt_double(row.value) << ',';
        if (std::isfinite(row.log_value))
            out << fmt_double(row.log_value);
        else
            out << "-inf";
        out << ',' << (row.overflow ? 1 : 0) << "\n";
    }
}

void write_instability_csv(const std::filesystem::path& path,
                           const std::vector<InstabilityRow>& rows) {
    std::ofstream out = open_output(path);
    out << "j,lambda,amplification,overflow,backward_check_rel_err\n";
    for (const InstabilityRow& row : rows) {
        out << row.j << ',' << fmt_double(row.lambda) << ',';
        if (row.overflow)
            out << "OVERFLOW,1,";
        else
            out << fmt_double(row.amplification) << ",0," << fmt_double(row.backward_check_rel_err);
        out << "\n";
    }
}

void write_chain_csv(const std::filesystem::path& path, const std::vector<ChainRow>& rows) {
    std::ofstream out = open_output(path);
    out << "N,log_norm_t,log_norm_t_prime\n";
    for (const ChainRow& row : rows)
        out << row.N << ',' << fmt_double(row.log_norm_t) << ','
            << fmt_double(row.log_norm_t_prime) << "\n";
}

void write_height_curve_csv(const std::filesystem::path& path, const HeightCurve& curve) {
    std::ofstream out = open_output(path);
    const bool fd = !curve.fd_residual_dh.empty();
    out << "t,h,dh,ddh" << (fd ? ",fd_residual_dh,fd_residual_ddh" : "") << "\n";
    for (std::size_t m = 0; m < curve.t.size(); ++m) {
        out << fmt_double(curve.t[m]) << ',' << fmt_double(curve.h[m]) << ','
            << fmt_double(curve.dh[m]) << ',' << fmt_double(curve.ddh[m]);
        if (fd)
            out << ',' << fmt_double(curve.fd_residual_dh[m]) << ','
                << fmt_double(curve.fd_residual_ddh[m]);
        out << "\n";
    }
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out = open_output(path);
    out << content;
}

} // namespace fvheat
