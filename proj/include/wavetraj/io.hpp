#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "wavetraj/dynamics.hpp"
#include "wavetraj/scenarios.hpp"

namespace wavetraj {

/// Parses `key = value` lines. `#` starts a comment; blank lines are skipped.
/// Throws ConfigParse naming the offending line.
Overrides parse_config_text(std::string_view text, std::string_view origin = "config");
Overrides read_config_file(const std::filesystem::path& path);

/// Renders settings back into the format read by parse_config_text.
std::string format_config(const std::map<std::string, std::string>& settings);

/// Scientific notation with 9 significant digits ("%.8e"), locale independent.
std::string format_csv_number(double v);

inline constexpr std::string_view kTrajectoryHeader = "t,ray_id,x,z,px,pz,R,W,H_drift,flags";
inline constexpr std::string_view kMetricsHeader =
    "t,z_axis,envelope_plus,envelope_minus,rms_width,peak_intensity,axial_pz";

std::string trajectories_csv(const TrajectoryLog& log);
std::string metrics_csv(const std::vector<BeamMetrics>& metrics);

/// One row of trajectories.csv.
struct TrajectoryRow {
  double t = 0.0;
  int ray_id = 0;
  double x = 0.0;
  double z = 0.0;
  double px = 0.0;
  double pz = 0.0;
  double R = 0.0;
  double W = 0.0;
  double h_drift = 0.0;
  unsigned flags = 0;
};

/// Throws MalformedCsv on a wrong header, a short row or an unparsable field.
std::vector<TrajectoryRow> parse_trajectories_csv(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary file in the same directory and renames it into
/// place. Throws IoFailure.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

std::string sha256_hex(std::string_view data);

/// x/w0 against z/w0 for every ray; the rays launched closest to x = +-1 are
/// drawn heavy.
std::string trajectories_svg(const std::vector<TrajectoryRow>& rows);

/// R^2 against x/w0 for the first and last recorded fronts (one curve when
/// they coincide).
std::string intensity_svg(const std::vector<TrajectoryRow>& rows);

/// Both panels side by side in one document.
std::string combined_svg(const std::vector<TrajectoryRow>& rows);

}  // namespace wavetraj
