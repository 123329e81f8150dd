#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "crlab/ambient.hpp"
#include "crlab/asymptotics.hpp"
#include "crlab/catalog.hpp"
#include "crlab/functionals.hpp"
#include "crlab/immersion.hpp"
#include "crlab/moebius.hpp"
#include "crlab/quadrature.hpp"
#include "crlab/rng.hpp"

namespace crlab::cli {
namespace {

using nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// option plumbing

struct ChartOptions {
  std::string chart;
  int m = 2;
  int n = 2;
  std::string b;  // comma-separated components
  double amplitude = 0.0;
  int mode = 1;
  int res = 48;
};

std::vector<double> parse_doubles(const std::string& text, const std::string& what) {
  std::vector<double> values;
  std::stringstream stream(text);
  std::string item;
  while (std::getline(stream, item, ',')) {
    std::size_t used = 0;
    double value = 0.0;
    try {
      value = std::stod(item, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("cannot parse " + what + " component '" + item + "'");
    }
    while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
    if (used != item.size()) {
      throw std::invalid_argument("cannot parse " + what + " component '" + item + "'");
    }
    values.push_back(value);
  }
  if (values.empty()) throw std::invalid_argument(what + " needs at least one component");
  return values;
}

ImmersionChart build_chart(const ChartOptions& options) {
  ChartParams params;
  params.m = options.m;
  params.n = options.n;
  params.amplitude = options.amplitude;
  params.mode = options.mode;
  if (!options.b.empty()) {
    const std::vector<double> values = parse_doubles(options.b, "--b");
    params.b = Eigen::Map<const Eigen::VectorXd>(values.data(),
                                                 static_cast<long>(values.size()));
  }
  return make_chart(options.chart, params);
}

// Midpoint of the chart domain, the default evaluation point.
Eigen::VectorXd domain_midpoint(const ImmersionChart& chart) {
  Eigen::VectorXd u(chart.m());
  for (int i = 0; i < chart.m(); ++i) {
    const AxisDomain& axis = chart.domain()[static_cast<std::size_t>(i)];
    u[i] = 0.5 * (axis.lo + axis.hi);
  }
  return u;
}

Eigen::VectorXd parse_point(const std::string& text, const ImmersionChart& chart) {
  if (text.empty()) return domain_midpoint(chart);
  const std::vector<double> values = parse_doubles(text, "--point");
  if (static_cast<int>(values.size()) != chart.m()) {
    throw std::invalid_argument("--point needs exactly m components");
  }
  return Eigen::Map<const Eigen::VectorXd>(values.data(), static_cast<long>(values.size()));
}

void add_chart_options(CLI::App* cmd, ChartOptions& options, bool with_res) {
  cmd->add_option("--chart", options.chart, "catalog chart name")
      ->required()
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--m", options.m, "intrinsic dimension")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--n", options.n, "complex dimension of the ambient ball")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--b", options.b, "Moebius parameter, comma-separated")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--amplitude", options.amplitude, "perturbed torus amplitude")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  cmd->add_option("--mode", options.mode, "perturbed torus mode")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  if (with_res) {
    cmd->add_option("--res", options.res, "grid resolution per axis")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  }
}

ordered_json chart_params_json(const ChartOptions& options) {
  ordered_json params;
  params["m"] = options.m;
  params["n"] = options.n;
  if (!options.b.empty()) {
    params["b"] = parse_doubles(options.b, "--b");
  } else {
    params["b"] = ordered_json::array();
  }
  params["amplitude"] = options.amplitude;
  params["mode"] = options.mode;
  return params;
}

void write_report(const std::string& path, const ordered_json& doc) {
  if (path.empty()) return;
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
  file << doc.dump(2) << "\n";
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty()) return;
  std::ofstream file(path);
  if (!file) throw std::invalid_argument("cannot open output file '" + path + "'");
  file << text;
}

std::string format_vector(const Eigen::VectorXd& v) {
  std::ostringstream s;
  s << std::setprecision(12) << "(";
  for (long i = 0; i < v.size(); ++i) {
    if (i) s << ", ";
    s << v[i];
  }
  s << ")";
  return s.str();
}

std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}

// Check ledger for the verify subcommands: prints one line per check and
// accumulates the machine report.
struct CheckList {
  std::ostream& out;
  int failures = 0;
  ordered_json items = ordered_json::array();

  explicit CheckList(std::ostream& stream) : out(stream) {}

  void check(const std::string& name, double value, double bound) {
    const bool ok = std::isfinite(value) && std::abs(value) <= bound;
    out << (ok ? "[ OK ] " : "[FAIL] ") << name << ": |" << std::setprecision(6) << value
        << "| <= " << bound << "\n";
    ordered_json item;
    item["name"] = name;
    item["value"] = value;
    item["bound"] = bound;
    item["passed"] = ok;
    items.push_back(item);
    if (!ok) ++failures;
  }

  int finish(const std::string& label) {
    if (failures == 0) {
      out << label << ": all " << items.size() << " checks passed\n";
      return 0;
    }
    out << label << ": " << failures << " of " << items.size() << " checks FAILED\n";
    return 3;
  }
};

// ---------------------------------------------------------------------------
// subcommand runners

int run_volume(const ChartOptions& options, const std::string& out_path, std::ostream& out) {
  const ImmersionChart chart = build_chart(options);
  const QuadratureGrid grid = build_grid(chart, options.res);
  const double value = volume(chart, grid);
  out << std::setprecision(12);
  out << "chart: " << options.chart << " (m=" << chart.m() << ", n=" << chart.n() << ")\n";
  out << "resolution: " << options.res << "\n";
  out << "volume: " << value << "\n";

  ordered_json doc;
  doc["command"] = "volume";
  doc["chart"] = options.chart;
  doc["params"] = chart_params_json(options);
  doc["params"]["res"] = options.res;
  doc["results"]["volume"] = value;
  write_report(out_path, doc);
  return 0;
}

int run_energies(const ChartOptions& options, int genus, const std::string& out_path,
                 std::ostream& out) {
  const ImmersionChart chart = build_chart(options);
  const QuadratureGrid grid = build_grid(chart, options.res);
  const EnergyReport report = energies(chart, grid, genus);
  out << std::setprecision(12);
  out << "chart: " << options.chart << " (m=" << chart.m() << ", n=" << chart.n() << ")\n";
  out << "resolution: " << options.res << ", genus: " << genus << "\n";
  out << "volume:      " << report.volume << "\n";
  out << "w_cr:        " << report.w_cr << "\n";
  out << "w_classical: " << report.w_classical << "\n";
  out << "u_cr:        " << report.u_cr << "\n";
  out << "b_cr:        " << report.b_cr << "\n";
  out << "gauss_bonnet_residual: " << report.gauss_bonnet_residual << "\n";

  ordered_json doc;
  doc["command"] = "energies";
  doc["chart"] = options.chart;
  doc["params"] = chart_params_json(options);
  doc["params"]["res"] = options.res;
  doc["params"]["genus"] = genus;
  doc["results"]["volume"] = report.volume;
  doc["results"]["w_cr"] = report.w_cr;
  doc["results"]["w_classical"] = report.w_classical;
  doc["results"]["u_cr"] = report.u_cr;
  doc["results"]["b_cr"] = report.b_cr;
  doc["results"]["gauss_bonnet_residual"] = report.gauss_bonnet_residual;
  write_report(out_path, doc);
  return 0;
}

int run_cr_volume(const ChartOptions& options, std::uint64_t seed, const std::string& out_path,
                  std::ostream& out) {
  const ImmersionChart chart = build_chart(options);
  const QuadratureGrid grid = build_grid(chart, options.res);
  OptimizerConfig config;
  config.seed = seed;
  const CrVolumeResult result = cr_volume(chart, grid, config);
  out << std::setprecision(12);
  out << "chart: " << options.chart << " (m=" << chart.m() << ", n=" << chart.n() << ")\n";
  out << "resolution: " << options.res << ", seed: " << seed << "\n";
  out << "cr_volume: " << result.value << "\n";
  out << "argmax b: " << format_vector(result.argmax) << "  |b| = " << result.argmax.norm()
      << "\n";
  out << "attained: " << (result.attained ? "yes" : "no")
      << ", evaluations: " << result.evaluations << ", starts: " << result.starts << "\n";

  ordered_json doc;
  doc["command"] = "cr-volume";
  doc["chart"] = options.chart;
  doc["params"] = chart_params_json(options);
  doc["params"]["res"] = options.res;
  doc["params"]["seed"] = seed;
  doc["results"]["value"] = result.value;
  doc["results"]["argmax"] = to_std(result.argmax);
  doc["results"]["argmax_norm"] = result.argmax.norm();
  doc["results"]["attained"] = result.attained;
  doc["results"]["evaluations"] = result.evaluations;
  doc["results"]["starts"] = result.starts;
  write_report(out_path, doc);
  return 0;
}

int run_balance(const ChartOptions& options, const std::string& out_path, std::ostream& out) {
  const ImmersionChart chart = build_chart(options);
  const QuadratureGrid grid = build_grid(chart, options.res);
  const BalanceResult result = balance_point(chart, grid);
  out << std::setprecision(12);
  out << "chart: " << options.chart << " (m=" << chart.m() << ", n=" << chart.n() << ")\n";
  out << "resolution: " << options.res << "\n";
  out << "balance b: " << format_vector(result.b) << "\n";
  out << "residual: " << result.residual << ", iterations: " << result.iterations
      << ", converged: " << (result.converged ? "yes" : "no") << "\n";

  ordered_json doc;
  doc["command"] = "balance";
  doc["chart"] = options.chart;
  doc["params"] = chart_params_json(options);
  doc["params"]["res"] = options.res;
  doc["results"]["b"] = to_std(result.b);
  doc["results"]["residual"] = result.residual;
  doc["results"]["iterations"] = result.iterations;
  doc["results"]["converged"] = result.converged;
  write_report(out_path, doc);
  return 0;
}

int run_normalize(const ChartOptions& options, const std::string& point_text,
                  const std::string& out_path, std::ostream& out) {
  const ImmersionChart chart = build_chart(options);
  const Eigen::VectorXd u = parse_point(point_text, chart);
  const auto [stages, report] = normalize_at_point(chart, u);
  const ImmersionChart normalized = apply_stages(chart, stages);
  const AmbientVector final_point = normalized.map(u);

  out << std::setprecision(12);
  out << "chart: " << options.chart << " (m=" << chart.m() << ", n=" << chart.n() << ")\n";
  out << "point: " << format_vector(u) << "\n";
  out << std::setprecision(4) << std::scientific;
  for (std::size_t k = 0; k < report.h_norm.size(); ++k) {
    out << "stage " << k << ": |H_hat| = " << report.h_hat_norm[k]
        << "  |H| = " << report.h_norm[k] << "  |div J H_N| = " << report.div_j_h_n[k] << "\n";
  }
  out.unsetf(std::ios::floatfield);
  out << std::setprecision(12);
  out << "final point: " << format_vector(final_point) << "\n";

  ordered_json doc;
  doc["command"] = "normalize";
  doc["chart"] = options.chart;
  doc["params"] = chart_params_json(options);
  doc["params"]["point"] = to_std(u);
  ordered_json stage_list = ordered_json::array();
  for (const AutStage& stage : stages) {
    ordered_json item;
    item["moebius"] = to_std(stage.moebius.b());
    std::vector<std::vector<double>> rows;
    for (long r = 0; r < stage.unitary.mat().rows(); ++r) {
      rows.push_back(to_std(stage.unitary.mat().row(r).transpose()));
    }
    item["unitary"] = rows;
    stage_list.push_back(item);
  }
  doc["results"]["stages"] = stage_list;
  doc["results"]["h_hat_norm"] = report.h_hat_norm;
  doc["results"]["h_norm"] = report.h_norm;
  doc["results"]["div_j_h_n"] = report.div_j_h_n;
  doc["results"]["final_point"] = to_std(final_point);
  write_report(out_path, doc);
  return 0;
}

std::string scan_csv(const std::vector<ScanSample>& samples) {
  std::ostringstream csv;
  csv << "t,value,resolution,converged\n";
  csv << std::setprecision(17);
  for (const ScanSample& s : samples) {
    csv << s.t << "," << s.value << "," << s.resolution << "," << (s.converged ? 1 : 0) << "\n";
  }
  return csv.str();
}

int run_asymptotics(const ChartOptions& options, const std::string& point_text, double t_min,
                    double t_max, int samples, bool fit, const std::string& out_path,
                    std::ostream& out) {
  const ImmersionChart chart = build_chart(options);
  const Eigen::VectorXd u = parse_point(point_text, chart);
  const std::vector<double> ts = log_spaced(t_min, t_max, samples);
  const std::vector<ScanSample> scan = degeneration_scan(chart, u, ts);

  out << std::setprecision(12);
  out << "chart: " << options.chart << " (m=" << chart.m() << ", n=" << chart.n() << ")\n";
  out << "point: " << format_vector(u) << ", t in [" << t_min << ", " << t_max << "], "
      << samples << " samples\n";
  for (const ScanSample& s : scan) {
    out << "t = " << std::setw(14) << s.t << "  value = " << std::setw(18) << s.value
        << "  res = " << s.resolution << (s.converged ? "" : "  (not converged)") << "\n";
  }

  if (!fit) {
    write_text(out_path, scan_csv(scan));
    return 0;
  }

  const ExpansionFit fitted = fit_expansion(chart.m(), scan);
  const FundamentalData data = fundamental_data(chart, u);
  const double alpha = alpha_coefficient(data);
  const int m = chart.m();
  const double predicted_c1 =
      0.25 * sphere_measure(m) * alpha * (m == 2 ? 1.0 : 2.0 / (m - 2));
  out << "c0 = " << fitted.c0 << "\n";
  out << "c1 = " << fitted.c1 << "  (predicted " << predicted_c1 << ")\n";
  out << "c2 = " << fitted.c2 << "\n";
  out << "rms residual = " << fitted.residual << "\n";
  out << "alpha = " << alpha << "\n";

  ordered_json doc;
  doc["command"] = "asymptotics fit";
  doc["chart"] = options.chart;
  doc["params"] = chart_params_json(options);
  doc["params"]["point"] = to_std(u);
  doc["params"]["t_min"] = t_min;
  doc["params"]["t_max"] = t_max;
  doc["params"]["samples"] = samples;
  doc["results"]["c0"] = fitted.c0;
  doc["results"]["c1"] = fitted.c1;
  doc["results"]["c2"] = fitted.c2;
  doc["results"]["rms_residual"] = fitted.residual;
  doc["results"]["alpha"] = alpha;
  doc["results"]["predicted_c1"] = predicted_c1;
  ordered_json rows = ordered_json::array();
  for (const ScanSample& s : scan) {
    ordered_json row;
    row["t"] = s.t;
    row["value"] = s.value;
    row["resolution"] = s.resolution;
    row["converged"] = s.converged;
    rows.push_back(row);
  }
  doc["results"]["samples"] = rows;
  write_report(out_path, doc);
  return 0;
}

// Max FD curl of the torsion one-form beta over coordinate pairs; beta is
// closed for horizontal immersions.
double beta_curl(const ImmersionChart& chart, const Eigen::VectorXd& u, double step = 1e-5) {
  const int m = chart.m();
  double worst = 0.0;
  auto beta_at = [&](const Eigen::VectorXd& v) { return fundamental_data(chart, v).beta; };
  for (int i = 0; i < m; ++i) {
    for (int j = i + 1; j < m; ++j) {
      Eigen::VectorXd up = u, um = u;
      up[i] += step;
      um[i] -= step;
      const double dbj = (beta_at(up)[j] - beta_at(um)[j]) / (2.0 * step);
      up = u;
      um = u;
      up[j] += step;
      um[j] -= step;
      const double dbi = (beta_at(up)[i] - beta_at(um)[i]) / (2.0 * step);
      worst = std::max(worst, std::abs(dbj - dbi));
    }
  }
  return worst;
}

int run_verify_identities(const std::string& out_path, std::ostream& out) {
  CheckList checks(out);
  out << "catalog expected values and pointwise identities\n";
  for (const CatalogEntry& entry : catalog_entries()) {
    const ImmersionChart chart = make_chart(entry.name, entry.params);
    const QuadratureGrid grid = build_grid(chart, entry.resolution);
    const EnergyReport report = energies(chart, grid, entry.genus);
    for (const ExpectedValue& expected : entry.expected) {
      double value = 0.0;
      if (expected.quantity == "volume") value = report.volume;
      else if (expected.quantity == "w_cr") value = report.w_cr;
      else if (expected.quantity == "u_cr") value = report.u_cr;
      else if (expected.quantity == "b_cr") value = report.b_cr;
      else throw std::runtime_error("unknown catalog quantity " + expected.quantity);
      checks.check(entry.name + " " + expected.quantity + " - expected",
                   value - expected.value, expected.tol);
    }
    if (chart.m() == 2) {
      checks.check(entry.name + " gauss-bonnet residual", report.gauss_bonnet_residual, 1e-4);
    }
    checks.check(entry.name + " horizontality",
                 horizontality_residual(chart, build_grid(chart, 12)), 1e-10);

    Sampler sampler(101);
    for (int trial = 0; trial < 3; ++trial) {
      Eigen::VectorXd u(chart.m());
      for (int i = 0; i < chart.m(); ++i) {
        const AxisDomain& axis = chart.domain()[static_cast<std::size_t>(i)];
        u[i] = axis.lo + (0.12 + 0.76 * sampler.uniform()) * (axis.hi - axis.lo);
      }
      const std::string tag = entry.name + " pt" + std::to_string(trial);
      const FundamentalData data = fundamental_data(chart, u);
      // sigma is fully symmetric in its three slots.
      double sym = 0.0;
      const int m = chart.m();
      for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
          for (int k = 0; k < m; ++k) {
            const double base = data.sigma[static_cast<std::size_t>((i * m + j) * m + k)];
            sym = std::max(sym, std::abs(base - data.sigma[static_cast<std::size_t>(
                                                    (j * m + i) * m + k)]));
            sym = std::max(sym, std::abs(base - data.sigma[static_cast<std::size_t>(
                                                    (i * m + k) * m + j)]));
          }
      checks.check(tag + " sigma symmetry", sym, 1e-10);
      checks.check(tag + " <H, reeb>", data.h_reeb, 1e-10);
      const double u2 = sym2_norm2(data.u_tensor, data.inverse_metric);
      const double an2 = sym2_norm2(data.a_normal, data.inverse_metric);
      const double hn2 = data.h_normal.squaredNorm();
      checks.check(tag + " |U|^2 decomposition", u2 - (an2 - 3.0 / (m + 2) * hn2),
                   1e-10 * std::max(1.0, an2));
      checks.check(tag + " scalar curvature identity", scalar_curvature_residual(chart, u),
                   1e-4);
      checks.check(tag + " beta closedness", beta_curl(chart, u), 1e-6);
    }
  }
  const int code = checks.finish("verify identities");
  ordered_json doc;
  doc["command"] = "verify identities";
  doc["results"]["checks"] = checks.items;
  doc["results"]["failures"] = checks.failures;
  write_report(out_path, doc);
  return code;
}

int run_verify_appendix(int cases, std::uint64_t seed, const std::string& out_path,
                        std::ostream& out) {
  CheckList checks(out);
  out << "appendix integral identities: " << cases << " seeded cases, seed " << seed
      << ", tolerance 1e-10 relative\n";
  Sampler sampler(seed);
  for (int c = 0; c < cases; ++c) {
    const int k = static_cast<int>(sampler.uniform() * 5.0);        // 0..4
    const int l = 1 + static_cast<int>(sampler.uniform() * 7.0);    // 1..7
    const double tau = 0.05 + 1.95 * sampler.uniform();
    const double a = 0.2 + 0.8 * sampler.uniform();
    const double recursive = j_integral(k, l, tau, a);
    const double oracle = j_integral_quadrature(k, l, tau, a);
    std::ostringstream name;
    name << "J(k=" << k << ",l=" << l << ",tau=" << std::setprecision(3) << tau
         << ",a=" << a << ")";
    checks.check(name.str(), (recursive - oracle) / std::max(1.0, std::abs(oracle)), 1e-10);
  }
  for (int c = 0; c < cases; ++c) {
    const int k = 1 + static_cast<int>(sampler.uniform() * 4.0);    // 1..4
    const int l = 1 + static_cast<int>(sampler.uniform() * 7.0);    // 1..7
    const double t = 0.05 + 0.9 * sampler.uniform();
    const double eps = 0.05 + 0.4 * sampler.uniform();
    const double closed = i_integral(k, l, t, eps);
    const double oracle = i_integral_quadrature(k, l, t, eps);
    std::ostringstream name;
    name << "I(k=" << k << ",l=" << l << ",t=" << std::setprecision(3) << t << ",eps=" << eps
         << ")";
    checks.check(name.str(), (closed - oracle) / std::max(1.0, std::abs(oracle)), 1e-10);
  }

  // boundary-coefficient recursions, checked on every convergent pair
  for (int k = 2; k <= 4; ++k) {
    for (int l = 3; l <= std::min(7, 2 * k - 1); ++l) {
      const double c = c_coefficient(k, l);
      if (2 * k > l) {
        const double rhs = c_coefficient(k - 1, l - 2) - c_coefficient(k, l - 2);
        std::ostringstream name;
        name << "C(" << k << "," << l << ") difference recursion";
        checks.check(name.str(), c - rhs, 1e-9);
      }
      const double parts = (l - 2.0) / (2.0 * (k - 1.0)) * c_coefficient(k - 1, l - 2);
      std::ostringstream name;
      name << "C(" << k << "," << l << ") parts recursion";
      checks.check(name.str(), c - parts, 1e-9);
    }
  }
  checks.check("C(3,4) = 1/2", c_coefficient(3, 4) - 0.5, 1e-8);
  checks.check("C(4,7)/C(4,5) = 5", c_coefficient(4, 7) / c_coefficient(4, 5) - 5.0, 1e-6);
  const double pi = std::acos(-1.0);
  const std::vector<std::tuple<int, int, double>> table = {
      {1, 1, pi},        {2, 1, pi / 2},  {3, 1, 3 * pi / 8}, {4, 1, 5 * pi / 16},
      {2, 2, 1.0},       {3, 2, 0.5},     {4, 2, 1.0 / 3},    {2, 3, pi / 2},
      {3, 3, pi / 8},    {4, 3, pi / 16}, {3, 4, 0.5},        {4, 5, pi / 16},
      {3, 5, 3 * pi / 8},{4, 7, 5 * pi / 16}};
  for (const auto& [k, l, expected] : table) {
    std::ostringstream name;
    name << "C(" << k << "," << l << ") table value";
    checks.check(name.str(), c_coefficient(k, l) - expected, 1e-7);
  }

  const int code = checks.finish("verify appendix");
  ordered_json doc;
  doc["command"] = "verify appendix";
  doc["params"]["cases"] = cases;
  doc["params"]["seed"] = seed;
  doc["params"]["relative_tolerance"] = 1e-10;
  doc["results"]["checks"] = checks.items;
  doc["results"]["failures"] = checks.failures;
  write_report(out_path, doc);
  return code;
}

int run_verify_sextic(long samples, std::uint64_t seed, const std::string& out_path,
                      std::ostream& out) {
  CheckList checks(out);
  out << "sextic moment identity: quadrature for m <= 3, Monte Carlo (" << samples
      << " samples, seed " << seed << ") for m = 4, 5\n";
  Sampler sampler(seed);
  for (int m = 1; m <= 3; ++m) {
    for (int trial = 0; trial < 3; ++trial) {
      SymmetricCubic cubic(m);
      for (int a = 0; a < m; ++a)
        for (int b = a; b < m; ++b)
          for (int c = b; c < m; ++c) cubic.set(a, b, c, sampler.uniform(-1.0, 1.0));
      const SexticResult result = sextic_identity_residual(cubic, SexticMethod::quadrature);
      std::ostringstream name;
      name << "m=" << m << " trial " << trial << " quadrature residual";
      checks.check(name.str(), result.residual / std::max(1.0, std::abs(result.rhs)), 1e-10);
    }
  }
  for (int m = 4; m <= 5; ++m) {
    SymmetricCubic cubic(m);
    for (int a = 0; a < m; ++a)
      for (int b = a; b < m; ++b)
        for (int c = b; c < m; ++c) cubic.set(a, b, c, sampler.uniform(-1.0, 1.0));
    const SexticResult result = sextic_identity_residual(cubic, SexticMethod::monte_carlo,
                                                         seed + static_cast<std::uint64_t>(m),
                                                         samples);
    std::ostringstream name;
    name << "m=" << m << " monte carlo residual / (3 std errors)";
    checks.check(name.str(), result.residual / (3.0 * result.std_error), 1.0);
  }
  const int code = checks.finish("verify sextic");
  ordered_json doc;
  doc["command"] = "verify sextic";
  doc["params"]["samples"] = samples;
  doc["params"]["seed"] = seed;
  doc["results"]["checks"] = checks.items;
  doc["results"]["failures"] = checks.failures;
  write_report(out_path, doc);
  return code;
}

int run_lambda1(const std::string& v1_text, const std::string& v2_text,
                const std::string& out_path, std::ostream& out) {
  auto parse2 = [](const std::string& text, const char* what) {
    const std::vector<double> values = parse_doubles(text, what);
    if (values.size() != 2) throw std::invalid_argument(std::string(what) + " needs 2 numbers");
    return Eigen::Vector2d(values[0], values[1]);
  };
  // Default lattice: the hexagonal lattice normalized to cell area 4 sqrt(3) pi^2 / 3.
  const double pi = std::acos(-1.0);
  const double ell = 2.0 * pi * std::sqrt(2.0 / 3.0);
  Eigen::Vector2d v1(ell, 0.0);
  Eigen::Vector2d v2(0.5 * ell, 0.5 * std::sqrt(3.0) * ell);
  if (!v1_text.empty()) v1 = parse2(v1_text, "--v1");
  if (!v2_text.empty()) v2 = parse2(v2_text, "--v2");

  const double lambda1 = lambda1_flat_torus(v1, v2);
  const double area = std::abs(v1.x() * v2.y() - v1.y() * v2.x());
  out << std::setprecision(12);
  out << "lattice: v1 = (" << v1.x() << ", " << v1.y() << "), v2 = (" << v2.x() << ", "
      << v2.y() << ")\n";
  out << "lambda1: " << lambda1 << "\n";
  out << "cell area: " << area << "\n";
  out << "lambda1 * area / 2: " << 0.5 * lambda1 * area << "\n";

  ordered_json doc;
  doc["command"] = "lambda1";
  doc["params"]["v1"] = {v1.x(), v1.y()};
  doc["params"]["v2"] = {v2.x(), v2.y()};
  doc["results"]["lambda1"] = lambda1;
  doc["results"]["cell_area"] = area;
  doc["results"]["half_lambda1_times_area"] = 0.5 * lambda1 * area;
  write_report(out_path, doc);
  return 0;
}

// ---------------------------------------------------------------------------
// config-file injection

// Keys each command path accepts from a config file.
const std::map<std::string, std::set<std::string>>& config_keys() {
  static const std::map<std::string, std::set<std::string>> table = {
      {"volume", {"chart", "m", "n", "b", "amplitude", "mode", "res", "out"}},
      {"energies", {"chart", "m", "n", "b", "amplitude", "mode", "res", "genus", "out"}},
      {"cr-volume", {"chart", "m", "n", "b", "amplitude", "mode", "res", "seed", "out"}},
      {"balance", {"chart", "m", "n", "b", "amplitude", "mode", "res", "out"}},
      {"normalize", {"chart", "m", "n", "b", "amplitude", "mode", "point", "out"}},
      {"asymptotics scan",
       {"chart", "m", "n", "b", "amplitude", "mode", "point", "t-min", "t-max", "samples",
        "out"}},
      {"asymptotics fit",
       {"chart", "m", "n", "b", "amplitude", "mode", "point", "t-min", "t-max", "samples",
        "out"}},
      {"verify identities", {"out"}},
      {"verify appendix", {"cases", "seed", "out"}},
      {"verify sextic", {"samples", "seed", "out"}},
      {"lambda1", {"v1", "v2", "out"}}};
  return table;
}

bool is_option_token(const std::string& token) {
  return !token.empty() && token[0] == '-';
}

// Flat key=value config support: values are injected as --key=value right
// after the subcommand tokens, so explicit flags (parsed last) win.
std::vector<std::string> inject_config(const std::vector<std::string>& args) {
  std::string config_path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
    else if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
  }
  if (config_path.empty()) return args;

  std::ifstream file(config_path);
  if (!file) throw std::invalid_argument("cannot read config file '" + config_path + "'");

  // locate the subcommand path and the insertion point
  std::size_t insert_at = args.size();
  std::string path;
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (is_option_token(args[i])) {
      if (args[i] == "--config") ++i;  // skip its value
      continue;
    }
    if (path.empty()) {
      path = args[i];
      insert_at = i + 1;
      if (path != "asymptotics" && path != "verify") break;
    } else {
      path += " " + args[i];
      insert_at = i + 1;
      break;
    }
  }
  const auto accepted = config_keys().find(path);
  if (accepted == config_keys().end()) return args;

  std::vector<std::string> injected;
  std::string line;
  int line_number = 0;
  while (std::getline(file, line)) {
    ++line_number;
    const std::size_t begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const std::size_t end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    if (line.empty() || line[0] == '#') continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_number) +
                                  " is not key=value");
    }
    std::string key = line.substr(0, eq);
    std::string value = line.substr(eq + 1);
    const std::size_t key_end = key.find_last_not_of(" \t");
    key = key_end == std::string::npos ? "" : key.substr(0, key_end + 1);
    const std::size_t value_begin = value.find_first_not_of(" \t");
    value = value_begin == std::string::npos ? "" : value.substr(value_begin);
    if (accepted->second.count(key) == 0) continue;
    injected.push_back("--" + key + "=" + value);
  }

  std::vector<std::string> result(args.begin(),
                                  args.begin() + static_cast<long>(insert_at));
  result.insert(result.end(), injected.begin(), injected.end());
  result.insert(result.end(), args.begin() + static_cast<long>(insert_at), args.end());
  return result;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CR-geometric invariants of horizontal submanifolds of odd spheres"};
  app.require_subcommand(1);

  int exit_code = 0;
  std::string out_path;
  std::string config_path;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_path, "write the machine-readable report here")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--config", config_path, "flat key=value config file")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  };

  ChartOptions chart_options;

  CLI::App* volume_cmd = app.add_subcommand("volume", "round-metric volume of a chart");
  add_chart_options(volume_cmd, chart_options, true);
  add_common(volume_cmd);
  volume_cmd->callback([&] { exit_code = run_volume(chart_options, out_path, out); });

  int genus = -1;
  CLI::App* energies_cmd = app.add_subcommand("energies", "curvature energy integrals");
  add_chart_options(energies_cmd, chart_options, true);
  energies_cmd->add_option("--genus", genus, "genus for the Gauss-Bonnet residual")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(energies_cmd);
  energies_cmd->callback([&] {
    int g = genus;
    if (g < 0) {
      g = 0;
      for (const CatalogEntry& entry : catalog_entries()) {
        if (entry.name == chart_options.chart) {
          g = entry.genus;
          break;
        }
      }
    }
    exit_code = run_energies(chart_options, g, out_path, out);
  });

  std::uint64_t seed = 12345;
  CLI::App* cr_cmd =
      app.add_subcommand("cr-volume", "supremum of the weighted volume over the ball");
  add_chart_options(cr_cmd, chart_options, true);
  cr_cmd->add_option("--seed", seed, "random-start seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(cr_cmd);
  cr_cmd->callback([&] { exit_code = run_cr_volume(chart_options, seed, out_path, out); });

  CLI::App* balance_cmd = app.add_subcommand("balance", "balance point of a chart");
  add_chart_options(balance_cmd, chart_options, true);
  add_common(balance_cmd);
  balance_cmd->callback([&] { exit_code = run_balance(chart_options, out_path, out); });

  std::string point_text;
  CLI::App* normalize_cmd =
      app.add_subcommand("normalize", "three-stage point normalization");
  add_chart_options(normalize_cmd, chart_options, false);
  normalize_cmd->add_option("--point", point_text, "chart coordinates, comma-separated")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(normalize_cmd);
  normalize_cmd->callback(
      [&] { exit_code = run_normalize(chart_options, point_text, out_path, out); });

  double t_min = 1e-4, t_max = 1e-2;
  int scan_samples = 10;
  CLI::App* asym_cmd = app.add_subcommand("asymptotics", "degeneration family studies");
  asym_cmd->require_subcommand(1);
  for (const char* sub : {"scan", "fit"}) {
    CLI::App* cmd = asym_cmd->add_subcommand(
        sub, sub == std::string("scan") ? "weighted volumes along the degeneration family"
                                        : "fit the t -> 0 expansion");
    add_chart_options(cmd, chart_options, false);
    cmd->add_option("--point", point_text, "chart coordinates, comma-separated")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--t-min", t_min, "smallest degeneration parameter")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--t-max", t_max, "largest degeneration parameter")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    cmd->add_option("--samples", scan_samples, "number of log-spaced samples")
        ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    add_common(cmd);
    const bool fit = sub == std::string("fit");
    cmd->callback([&, fit] {
      exit_code = run_asymptotics(chart_options, point_text, t_min, t_max, scan_samples, fit,
                                  out_path, out);
    });
  }

  int cases = 50;
  std::uint64_t verify_seed = 7;
  long mc_samples = 1000000;
  CLI::App* verify_cmd = app.add_subcommand("verify", "identity and oracle suites");
  verify_cmd->require_subcommand(1);
  CLI::App* identities_cmd =
      verify_cmd->add_subcommand("identities", "catalog values and pointwise identities");
  add_common(identities_cmd);
  identities_cmd->callback([&] { exit_code = run_verify_identities(out_path, out); });
  CLI::App* appendix_cmd =
      verify_cmd->add_subcommand("appendix", "integral recursions against quadrature");
  appendix_cmd->add_option("--cases", cases, "seeded cases per family")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  appendix_cmd->add_option("--seed", verify_seed, "case generator seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(appendix_cmd);
  appendix_cmd->callback(
      [&] { exit_code = run_verify_appendix(cases, verify_seed, out_path, out); });
  CLI::App* sextic_cmd = verify_cmd->add_subcommand("sextic", "sextic moment identity");
  sextic_cmd->add_option("--samples", mc_samples, "Monte Carlo samples for m = 4, 5")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  sextic_cmd->add_option("--seed", verify_seed, "Monte Carlo seed")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(sextic_cmd);
  sextic_cmd->callback(
      [&] { exit_code = run_verify_sextic(mc_samples, verify_seed, out_path, out); });

  std::string v1_text, v2_text;
  CLI::App* lambda_cmd =
      app.add_subcommand("lambda1", "first Laplace eigenvalue of a flat torus");
  lambda_cmd->add_option("--v1", v1_text, "first lattice vector x,y")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  lambda_cmd->add_option("--v2", v2_text, "second lattice vector x,y")
      ->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
  add_common(lambda_cmd);
  lambda_cmd->callback([&] { exit_code = run_lambda1(v1_text, v2_text, out_path, out); });

  try {
    std::vector<std::string> final_args = inject_config(args);
    std::reverse(final_args.begin(), final_args.end());
    app.parse(final_args);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e, out, err);
    return 0;
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 1;
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::domain_error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << "numerical failure: " << e.what() << "\n";
    return 2;
  }
  return exit_code;
}

}  // namespace crlab::cli
