#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tmsq/analysis.hpp"
#include "tmsq/dynamics.hpp"
#include "tmsq/gaussian.hpp"
#include "tmsq/hilbert.hpp"
#include "tmsq/model.hpp"
#include "tmsq/protocol.hpp"
#include "tmsq/protocol_types.hpp"

namespace tmsq {

using Json = nlohmann::json;

// Parses JSON text; // and /* */ comments are allowed. Throws ConfigError.
Json parse_json_text(const std::string& text, const std::string& origin = "<input>");
Json load_json_file(const std::string& path);

// Keys omega1_hz, omega2_hz, g1_hz, g2_hz, delta1_hz, delta2_hz, gamma_e_hz
// (linear frequency, ×2π on load), r_a_hz (arrivals per second, no 2π) and
// tau_s. Throws ConfigError naming the offending key.
PhysicalParams params_from_json(const Json& j);
Json params_to_json(const PhysicalParams& p);

Json derived_to_json(const DerivedParams& d);
Json regime_to_json(const RegimeReport& r);
Json report_to_json(const SqueezingReport& r);
SqueezingReport report_from_json(const Json& j);

Json protocol_to_json(const ProtocolSpec& spec);
ProtocolSpec protocol_from_json(const Json& j);

// {space: [A, N1, N2], re: [...], im: [...]}, row-major.
Json operator_to_json(const Operator& op);
Operator operator_from_json(const Json& j);
Json state_to_json(const StateVector& psi);
StateVector state_from_json(const Json& j);

// {mean: [4], cov: [[4×4]]}
Json gaussian_to_json(const GaussianState& s);
GaussianState gaussian_from_json(const Json& j);

// %.17g
std::string format_number(double x);

// Header "t,<names>", one row per sample, LF line endings.
void write_csv(std::ostream& out, const Trajectory& traj);
std::string trajectory_csv(const Trajectory& traj);
// Generic table with the same formatting.
void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows);

struct PlotSeries {
  std::string name;
  std::vector<double> y;
};

// Minimal SVG line chart; every series shares x.
std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                          const std::vector<PlotSeries>& series);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace tmsq
