#include "tmsq/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "tmsq/errors.hpp"

namespace tmsq {

namespace {

double number_at(const Json& j, const std::string& key) {
  if (!j.is_object()) throw ConfigError("expected a JSON object holding '" + key + "'");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError("missing key '" + key + "'");
  if (!it->is_number()) throw ConfigError("key '" + key + "' must be a number");
  const double v = it->get<double>();
  if (!std::isfinite(v)) throw ConfigError("key '" + key + "' must be finite");
  return v;
}

template <class T>
T value_or(const Json& j, const std::string& key, T fallback) {
  const auto it = j.find(key);
  if (it == j.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError("key '" + key + "' has the wrong type");
  }
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

Json parse_json_text(const std::string& text, const std::string& origin) {
  try {
    return Json::parse(text, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(origin + ": " + e.what());
  }
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_json_text(ss.str(), path);
}

PhysicalParams params_from_json(const Json& j) {
  PhysicalParams p;
  p.omega1 = kTwoPi * number_at(j, "omega1_hz");
  p.omega2 = kTwoPi * number_at(j, "omega2_hz");
  p.g1 = kTwoPi * number_at(j, "g1_hz");
  p.g2 = kTwoPi * number_at(j, "g2_hz");
  p.delta1 = kTwoPi * number_at(j, "delta1_hz");
  p.delta2 = kTwoPi * number_at(j, "delta2_hz");
  p.gamma_e = kTwoPi * number_at(j, "gamma_e_hz");
  p.r_a = number_at(j, "r_a_hz");
  p.tau = number_at(j, "tau_s");
  try {
    p.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

Json params_to_json(const PhysicalParams& p) {
  Json j;
  j["omega1_hz"] = p.omega1 / kTwoPi;
  j["omega2_hz"] = p.omega2 / kTwoPi;
  j["g1_hz"] = p.g1 / kTwoPi;
  j["g2_hz"] = p.g2 / kTwoPi;
  j["delta1_hz"] = p.delta1 / kTwoPi;
  j["delta2_hz"] = p.delta2 / kTwoPi;
  j["gamma_e_hz"] = p.gamma_e / kTwoPi;
  j["r_a_hz"] = p.r_a;
  j["tau_s"] = p.tau;
  return j;
}

Json derived_to_json(const DerivedParams& d) {
  Json j;
  j["theta1_rad_s"] = d.theta1;
  j["theta2_rad_s"] = d.theta2;
  j["theta1_over_2pi_hz"] = d.theta1 / kTwoPi;
  j["theta2_over_2pi_hz"] = d.theta2 / kTwoPi;
  j["r"] = d.r;
  j["epsilon"] = d.epsilon;
  j["theta_b_rad_s"] = d.theta_b;
  j["theta_b_over_2pi_hz"] = d.theta_b / kTwoPi;
  j["gamma_per_s"] = d.gamma;
  j["channel"] = channel_name(d.channel);
  j["atom_state"] = std::string(1, level_name(channel_atom_state(d.channel)));
  return j;
}

Json regime_to_json(const RegimeReport& r) {
  Json checks = Json::array();
  for (const auto& c : r.checks) {
    checks.push_back({{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"pass", c.pass}});
  }
  return {{"checks", checks}, {"all_pass", r.all_pass()}};
}

Json report_to_json(const SqueezingReport& r) {
  return {{"epsilon_target", r.epsilon_target}, {"v_squeezed", r.v_squeezed},
          {"v_antisqueezed", r.v_antisqueezed}, {"duan_sum", r.duan_sum},
          {"n1_mean", r.n1_mean},               {"n2_mean", r.n2_mean},
          {"fidelity", r.fidelity},             {"truncation_leak", r.truncation_leak}};
}

SqueezingReport report_from_json(const Json& j) {
  SqueezingReport r;
  r.epsilon_target = number_at(j, "epsilon_target");
  r.v_squeezed = number_at(j, "v_squeezed");
  r.v_antisqueezed = number_at(j, "v_antisqueezed");
  r.duan_sum = number_at(j, "duan_sum");
  r.n1_mean = number_at(j, "n1_mean");
  r.n2_mean = number_at(j, "n2_mean");
  r.fidelity = number_at(j, "fidelity");
  r.truncation_leak = number_at(j, "truncation_leak");
  return r;
}

Json protocol_to_json(const ProtocolSpec& spec) {
  Json steps = Json::array();
  for (const auto& s : spec.steps) {
    steps.push_back({{"params", params_to_json(s.params)},
                     {"atom_state", std::string(1, level_name(s.atom_state))},
                     {"duration_s", s.duration},
                     {"channel", channel_name(s.channel)}});
  }
  return {{"engine", engine_name(spec.engine)},
          {"seed", spec.seed},
          {"truncation", {spec.n1, spec.n2}},
          {"samples_per_step", spec.samples_per_step},
          {"gamma_dt", spec.gamma_dt},
          {"trajectories", spec.trajectories},
          {"policy", policy_name(spec.policy)},
          {"include_stark", spec.include_stark},
          {"steps", steps}};
}

ProtocolSpec protocol_from_json(const Json& j) {
  if (!j.is_object()) throw ConfigError("protocol must be a JSON object");
  ProtocolSpec spec;
  try {
    spec.engine = parse_engine(value_or<std::string>(j, "engine", engine_name(spec.engine)));
    spec.policy = parse_policy(value_or<std::string>(j, "policy", policy_name(spec.policy)));
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  spec.seed = value_or<std::uint64_t>(j, "seed", spec.seed);
  if (j.contains("truncation")) {
    const Json& t = j["truncation"];
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() || !t[1].is_number_integer()) {
      throw ConfigError("key 'truncation' must be [N1, N2]");
    }
    spec.n1 = t[0].get<int>();
    spec.n2 = t[1].get<int>();
  }
  spec.samples_per_step = value_or<int>(j, "samples_per_step", spec.samples_per_step);
  spec.gamma_dt = value_or<double>(j, "gamma_dt", spec.gamma_dt);
  spec.trajectories = value_or<int>(j, "trajectories", spec.trajectories);
  spec.include_stark = value_or<bool>(j, "include_stark", spec.include_stark);
  if (!j.contains("steps") || !j["steps"].is_array()) throw ConfigError("missing key 'steps'");
  for (const Json& s : j["steps"]) {
    if (!s.contains("params")) throw ConfigError("missing key 'params' in a step");
    ProtocolStep step = make_step(params_from_json(s["params"]), number_at(s, "duration_s"));
    if (s.contains("atom_state")) {
      try {
        step.atom_state = parse_level(s["atom_state"].get<std::string>());
      } catch (const std::exception& e) {
        throw ConfigError(std::string("key 'atom_state': ") + e.what());
      }
    }
    spec.steps.push_back(step);
  }
  try {
    spec.validate();
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
  return spec;
}

Json operator_to_json(const Operator& op) {
  const SpaceDescriptor& s = op.space();
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index r = 0; r < s.dim(); ++r) {
    for (Eigen::Index c = 0; c < s.dim(); ++c) {
      re.push_back(op.matrix()(r, c).real());
      im.push_back(op.matrix()(r, c).imag());
    }
  }
  return {{"space", {s.atom_levels(), s.n1(), s.n2()}}, {"re", re}, {"im", im}};
}

namespace {

SpaceDescriptor space_from_json(const Json& j) {
  if (!j.contains("space") || !j["space"].is_array() || j["space"].size() != 3) {
    throw ConfigError("key 'space' must be [A, N1, N2]");
  }
  try {
    return {j["space"][0].get<int>(), j["space"][1].get<int>(), j["space"][2].get<int>()};
  } catch (const InvalidArgument& e) {
    throw ConfigError(std::string("key 'space': ") + e.what());
  }
}

std::vector<double> numbers(const Json& j, const char* key, std::size_t expected) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != expected) {
    throw ConfigError(std::string("key '") + key + "' must hold " + std::to_string(expected) + " numbers");
  }
  return j[key].get<std::vector<double>>();
}

}  // namespace

Operator operator_from_json(const Json& j) {
  const SpaceDescriptor s = space_from_json(j);
  const auto n = static_cast<std::size_t>(s.dim() * s.dim());
  const auto re = numbers(j, "re", n);
  const auto im = numbers(j, "im", n);
  Matrix m(s.dim(), s.dim());
  for (Eigen::Index r = 0; r < s.dim(); ++r)
    for (Eigen::Index c = 0; c < s.dim(); ++c) {
      const auto k = static_cast<std::size_t>(r * s.dim() + c);
      m(r, c) = Complex(re[k], im[k]);
    }
  return {s, std::move(m)};
}

Json state_to_json(const StateVector& psi) {
  const SpaceDescriptor& s = psi.space();
  Json re = Json::array();
  Json im = Json::array();
  for (Eigen::Index i = 0; i < s.dim(); ++i) {
    re.push_back(psi.amplitudes()(i).real());
    im.push_back(psi.amplitudes()(i).imag());
  }
  return {{"space", {s.atom_levels(), s.n1(), s.n2()}}, {"re", re}, {"im", im}};
}

StateVector state_from_json(const Json& j) {
  const SpaceDescriptor s = space_from_json(j);
  const auto re = numbers(j, "re", static_cast<std::size_t>(s.dim()));
  const auto im = numbers(j, "im", static_cast<std::size_t>(s.dim()));
  Vector v(s.dim());
  for (Eigen::Index i = 0; i < s.dim(); ++i) v(i) = Complex(re[i], im[i]);
  return {s, std::move(v)};
}

Json gaussian_to_json(const GaussianState& s) {
  Json cov = Json::array();
  for (int i = 0; i < 4; ++i) {
    Json row = Json::array();
    for (int k = 0; k < 4; ++k) row.push_back(s.cov()(i, k));
    cov.push_back(row);
  }
  return {{"mean", {s.mean()(0), s.mean()(1), s.mean()(2), s.mean()(3)}}, {"cov", cov}};
}

GaussianState gaussian_from_json(const Json& j) {
  const auto mean = numbers(j, "mean", 4);
  if (!j.contains("cov") || !j["cov"].is_array() || j["cov"].size() != 4) {
    throw ConfigError("key 'cov' must be a 4x4 array");
  }
  Mat4 cov;
  for (int i = 0; i < 4; ++i) {
    const Json& row = j["cov"][i];
    if (!row.is_array() || row.size() != 4) throw ConfigError("key 'cov' must be a 4x4 array");
    for (int k = 0; k < 4; ++k) cov(i, k) = row[k].get<double>();
  }
  try {
    return {Vec4(mean[0], mean[1], mean[2], mean[3]), cov};
  } catch (const InvalidArgument& e) {
    throw ConfigError(e.what());
  }
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void write_csv(std::ostream& out, const Trajectory& traj) {
  out << 't';
  for (const auto& n : traj.names()) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out << format_number(traj.times()[i]);
    for (double v : traj.records()[i]) out << ',' << format_number(v);
    out << '\n';
  }
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream ss;
  write_csv(ss, traj);
  return ss.str();
}

void write_table_csv(std::ostream& out, const std::vector<std::string>& header,
                     const std::vector<std::vector<double>>& rows) {
  for (std::size_t i = 0; i < header.size(); ++i) out << (i ? "," : "") << header[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_number(row[i]);
    out << '\n';
  }
}

std::string svg_line_plot(const std::string& title, const std::string& x_label, const std::vector<double>& x,
                          const std::vector<PlotSeries>& series) {
  constexpr double kWidth = 640, kHeight = 400, kLeft = 70, kRight = 20, kTop = 40, kBottom = 50;
  static const char* const kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (double v : x) x0 = std::min(x0, v), x1 = std::max(x1, v);
  for (const auto& s : series)
    for (double v : s.y)
      if (std::isfinite(v)) y0 = std::min(y0, v), y1 = std::max(y1, v);
  if (!(x1 > x0)) x1 = x0 + 1.0;
  if (!(y1 > y0)) y1 = y0 + 1.0;
  const double pw = kWidth - kLeft - kRight, ph = kHeight - kTop - kBottom;
  auto px = [&](double v) { return kLeft + (v - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return kTop + (1.0 - (v - y0) / (y1 - y0)) * ph; };

  std::ostringstream out;
  char buf[128];
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kWidth / 2 << "\" y=\"24\" text-anchor=\"middle\" font-size=\"16\">" << xml_escape(title)
      << "</text>\n";
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << pw << "\" height=\"" << ph
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double xv = x0 + (x1 - x0) * k / 4.0;
    const double yv = y0 + (y1 - y0) * k / 4.0;
    std::snprintf(buf, sizeof buf, "%.3g", xv);
    out << "<text x=\"" << px(xv) << "\" y=\"" << kHeight - kBottom + 18 << "\" text-anchor=\"middle\" font-size=\"11\">"
        << buf << "</text>\n";
    std::snprintf(buf, sizeof buf, "%.3g", yv);
    out << "<text x=\"" << kLeft - 6 << "\" y=\"" << py(yv) + 4 << "\" text-anchor=\"end\" font-size=\"11\">" << buf
        << "</text>\n";
  }
  out << "<text x=\"" << kLeft + pw / 2 << "\" y=\"" << kHeight - 10 << "\" text-anchor=\"middle\" font-size=\"13\">"
      << xml_escape(x_label) << "</text>\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const char* color = kColors[s % 5];
    out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < x.size() && i < series[s].y.size(); ++i) {
      if (!std::isfinite(series[s].y[i])) continue;
      std::snprintf(buf, sizeof buf, "%.2f,%.2f ", px(x[i]), py(series[s].y[i]));
      out << buf;
    }
    out << "\"/>\n";
    out << "<text x=\"" << kLeft + 10 << "\" y=\"" << kTop + 16 + 16 * s << "\" font-size=\"12\" fill=\"" << color
        << "\">" << xml_escape(series[s].name) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path + "'");
  out << content;
  if (!out) throw Error("failed writing '" + path + "'");
}

}  // namespace tmsq
