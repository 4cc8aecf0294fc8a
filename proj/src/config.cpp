#include "acsim/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "acsim/io.hpp"

namespace acsim {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid number for key '" + key + "': " + value);
  }
}

int parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const int v = std::stoi(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for key '" + key + "': " + value);
  }
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(value, &pos);
    if (pos != value.size()) throw std::invalid_argument(value);
    return v;
  } catch (const std::exception&) {
    throw ConfigError("config: invalid integer for key '" + key + "': " + value);
  }
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true" || value == "1") return true;
  if (value == "false" || value == "0") return false;
  throw ConfigError("config: invalid boolean for key '" + key + "': " + value);
}

std::vector<double> parse_double_list(const std::string& key,
                                      const std::string& value) {
  std::vector<double> out;
  if (trim(value).empty()) return out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_double(key, trim(item)));
  return out;
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::stringstream stream(text);
  std::string line;
  int line_no = 0;
  while (std::getline(stream, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: line " + std::to_string(line_no) +
                        " is not key=value: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));

    if (key == "n") cfg.n = parse_int(key, value);
    else if (key == "bc") {
      if (value == "neumann") cfg.bc = BcKind::neumann;
      else if (value == "dirichlet") cfg.bc = BcKind::dirichlet;
      else throw ConfigError("config: invalid value for 'bc': " + value);
    } else if (key == "theta") cfg.theta = parse_double(key, value);
    else if (key == "theta0") cfg.theta0 = parse_double(key, value);
    else if (key == "barrier_l") cfg.barrier = parse_double(key, value);
    else if (key == "f1_coeff") {
      cfg.f1_coeff = parse_double(key, value);
      cfg.f1_coeff_explicit = true;
    } else if (key == "tau") cfg.tau = parse_double(key, value);
    else if (key == "t_final") cfg.t_final = parse_double(key, value);
    else if (key == "eps") cfg.eps = parse_double(key, value);
    else if (key == "mode") {
      if (value == "exact_barrier") cfg.mode = BarrierMode::exact_barrier;
      else if (value == "yosida") cfg.mode = BarrierMode::yosida;
      else throw ConfigError("config: invalid value for 'mode': " + value);
    } else if (key == "yosida_lambda") cfg.yosida_lambda = parse_double(key, value);
    else if (key == "splitting") {
      if (value == "paper") cfg.splitting = Splitting::paper;
      else if (value == "convex_split") cfg.splitting = Splitting::convex_split;
      else throw ConfigError("config: invalid value for 'splitting': " + value);
    } else if (key == "newton_tol") cfg.newton_tol = parse_double(key, value);
    else if (key == "newton_max_iter") cfg.newton_max_iter = parse_int(key, value);
    else if (key == "c_noise") cfg.c_noise = parse_double(key, value);
    else if (key == "wiener_alpha") cfg.wiener_alpha = parse_double(key, value);
    else if (key == "wiener_modes") cfg.wiener_modes = parse_int(key, value);
    else if (key == "lambda_jump") cfg.lambda_jump = parse_double(key, value);
    else if (key == "sigma_track") cfg.sigma_track = parse_double(key, value);
    else if (key == "jump_amplitude") {
      if (value == "bilinear") cfg.jump_amplitude = JumpAmplitude::bilinear;
      else if (value == "affine") cfg.jump_amplitude = JumpAmplitude::affine;
      else throw ConfigError("config: invalid value for 'jump_amplitude': " + value);
    } else if (key == "jump_compensated") cfg.jump_compensated = parse_bool(key, value);
    else if (key == "f2_compensator") cfg.f2_compensator = parse_bool(key, value);
    else if (key == "scenario") {
      if (value == "random_half") cfg.scenario = Scenario::random_half;
      else if (value == "circle") cfg.scenario = Scenario::circle;
      else throw ConfigError("config: invalid value for 'scenario': " + value);
    } else if (key == "init_amplitude") cfg.init_amplitude = parse_double(key, value);
    else if (key == "circle_radius") cfg.circle_radius = parse_double(key, value);
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "snapshot_times") cfg.snapshot_times = parse_double_list(key, value);
    else if (key == "write_events") cfg.write_events = parse_bool(key, value);
    else if (key == "write_pgm") cfg.write_pgm = parse_bool(key, value);
    else if (key == "write_vtk") cfg.write_vtk = parse_bool(key, value);
    else throw ConfigError("config: unknown key '" + key + "'");
  }
  if (!cfg.f1_coeff_explicit) cfg.f1_coeff = 4.0 * cfg.theta0;
  cfg.f1_coeff_explicit = true;
  std::sort(cfg.snapshot_times.begin(), cfg.snapshot_times.end());
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config: cannot read '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string serialize_config(const RunConfig& cfg) {
  std::ostringstream out;
  out << "n = " << cfg.n << "\n";
  out << "bc = " << (cfg.bc == BcKind::neumann ? "neumann" : "dirichlet") << "\n";
  out << "theta = " << format_double(cfg.theta) << "\n";
  out << "theta0 = " << format_double(cfg.theta0) << "\n";
  out << "barrier_l = " << format_double(cfg.barrier) << "\n";
  out << "f1_coeff = " << format_double(cfg.f1_coeff) << "\n";
  out << "tau = " << format_double(cfg.tau) << "\n";
  out << "t_final = " << format_double(cfg.t_final) << "\n";
  out << "eps = " << format_double(cfg.eps) << "\n";
  out << "mode = "
      << (cfg.mode == BarrierMode::exact_barrier ? "exact_barrier" : "yosida")
      << "\n";
  out << "yosida_lambda = " << format_double(cfg.yosida_lambda) << "\n";
  out << "splitting = "
      << (cfg.splitting == Splitting::paper ? "paper" : "convex_split") << "\n";
  out << "newton_tol = " << format_double(cfg.newton_tol) << "\n";
  out << "newton_max_iter = " << cfg.newton_max_iter << "\n";
  out << "c_noise = " << format_double(cfg.c_noise) << "\n";
  out << "wiener_alpha = " << format_double(cfg.wiener_alpha) << "\n";
  out << "wiener_modes = " << cfg.wiener_modes << "\n";
  out << "lambda_jump = " << format_double(cfg.lambda_jump) << "\n";
  out << "sigma_track = " << format_double(cfg.sigma_track) << "\n";
  out << "jump_amplitude = "
      << (cfg.jump_amplitude == JumpAmplitude::bilinear ? "bilinear" : "affine")
      << "\n";
  out << "jump_compensated = " << (cfg.jump_compensated ? "true" : "false") << "\n";
  out << "f2_compensator = " << (cfg.f2_compensator ? "true" : "false") << "\n";
  out << "scenario = "
      << (cfg.scenario == Scenario::random_half ? "random_half" : "circle")
      << "\n";
  out << "init_amplitude = " << format_double(cfg.init_amplitude) << "\n";
  out << "circle_radius = " << format_double(cfg.circle_radius) << "\n";
  out << "seed = " << cfg.seed << "\n";
  out << "snapshot_times = ";
  for (std::size_t i = 0; i < cfg.snapshot_times.size(); ++i) {
    if (i) out << ",";
    out << format_double(cfg.snapshot_times[i]);
  }
  out << "\n";
  out << "write_events = " << (cfg.write_events ? "true" : "false") << "\n";
  out << "write_pgm = " << (cfg.write_pgm ? "true" : "false") << "\n";
  out << "write_vtk = " << (cfg.write_vtk ? "true" : "false") << "\n";
  return out.str();
}

void validate_config(const RunConfig& cfg) {
  if (cfg.n < 2) throw ConfigError("config: 'n' must be >= 2");
  try {
    make_potential(cfg).validate();
    RunParams params = make_run_params(cfg);
    params.scheme.validate(make_potential(cfg));
    params.wiener.validate();
    params.jump.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  if (!(cfg.init_amplitude > 0.0 && cfg.init_amplitude <= 0.49))
    throw ConfigError("config: 'init_amplitude' must be in (0, 0.49]");
  if (!(cfg.circle_radius > 0.0 && cfg.circle_radius < 0.5))
    throw ConfigError("config: 'circle_radius' must be in (0, 0.5)");
  for (double t : cfg.snapshot_times)
    if (t < 0.0 || t > cfg.t_final + 1e-12)
      throw ConfigError("config: 'snapshot_times' entries must lie in [0, t_final]");
}

PotentialSplit make_potential(const RunConfig& cfg) {
  PotentialSplit pot;
  pot.theta = cfg.theta;
  pot.theta0 = cfg.theta0;
  pot.barrier = cfg.barrier;
  pot.f1_coeff = cfg.f1_coeff_explicit ? cfg.f1_coeff : 4.0 * cfg.theta0;
  return pot;
}

RunParams make_run_params(const RunConfig& cfg) {
  RunParams params;
  params.scheme.tau = cfg.tau;
  params.scheme.t_final = cfg.t_final;
  params.scheme.eps = cfg.eps;
  params.scheme.mode = cfg.mode;
  params.scheme.yosida_lambda = cfg.yosida_lambda;
  params.scheme.splitting = cfg.splitting;
  params.scheme.newton_tol = cfg.newton_tol;
  params.scheme.newton_max_iter = cfg.newton_max_iter;
  params.wiener.c_noise = cfg.c_noise;
  params.wiener.alpha = cfg.wiener_alpha;
  params.wiener.n_modes = cfg.wiener_modes;
  params.jump.lambda_jump = cfg.lambda_jump;
  params.jump.sigma_track = cfg.sigma_track;
  params.jump.amplitude = cfg.jump_amplitude;
  params.jump.compensated = cfg.jump_compensated;
  params.jump.f2_carries_compensator = cfg.f2_compensator;
  params.scenario = cfg.scenario;
  params.init_amplitude = cfg.init_amplitude;
  params.circle_radius = cfg.circle_radius;
  params.snapshot_times = cfg.snapshot_times;
  return params;
}

}  // namespace acsim
