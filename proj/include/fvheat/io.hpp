#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "fvheat/evolution.hpp"
#include "fvheat/final_value.hpp"
#include "fvheat/matrix_lab.hpp"
#include "fvheat/spectral.hpp"

namespace fvheat {

using Json = nlohmann::ordered_json;

// Fixed 17-significant-digit formatting; doubles round-trip exactly, so two
// runs of the same build produce byte-identical files.
std::string fmt_double(double x);

// Coefficient files: `mode,lambda,re,im`, one row per mode ascending, with
// `#`-prefixed metadata lines carrying the generating geometry, e.g.
//   # domain=interval L=3.141592653589793 N=64
void write_coeffs_csv(const std::filesystem::path& path, const SpectralCoeffs& coeffs);
SpectralCoeffs read_coeffs_csv(const std::filesystem::path& path);

// Trajectory and source files share the schema `time,mode,re,im`, time-major.
void write_time_series_csv(const std::filesystem::path& path, const BasisPtr& basis,
                           const TimeGrid& grid, const std::vector<Complex>& mode_major_values);
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
void write_source_csv(const std::filesystem::path& path, const SourceTerm& f);
SourceTerm read_source_csv(const std::filesystem::path& path, const BasisPtr& basis);

// Matrix files: triplets `row,col,re,im` with a `# n=<dim>` metadata line, or
// headerless dense rows of real entries.
void write_matrix_csv(const std::filesystem::path& path, const MatrixOperator& op);
MatrixOperator read_matrix_csv(const std::filesystem::path& path);

// Grid sample files: `x[,y],value_re,value_im`.
void write_samples_csv(const std::filesystem::path& path, const std::vector<double>& xs,
                       const std::vector<Complex>& values);

Json to_json(const CompatibilityReport& report);
Json to_json(const DecayEstimate& decay);
Json to_json(const RoundTripReport& report);
Json to_json(const CoercivityProfile& profile);

// Margin and partial-norm tables as CSV, for plotting.
void write_margins_csv(const std::filesystem::path& path, const SpectralBasis& basis,
                       const std::vector<double>& margins);
void write_partial_norms_csv(const std::filesystem::path& path,
                             const std::vector<PartialNormRow>& table);
void write_instability_csv(const std::filesystem::path& path,
                           const std::vector<InstabilityRow>& rows);
void write_chain_csv(const std::filesystem::path& path, const std::vector<ChainRow>& rows);
void write_height_curve_csv(const std::filesystem::path& path, const HeightCurve& curve);

void write_text_file(const std::filesystem::path& path, const std::string& content);

} // namespace fvheat
