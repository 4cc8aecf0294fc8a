#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "acsim/config.hpp"
#include "acsim/io.hpp"

using namespace acsim;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempFile {
  std::string path;
  explicit TempFile(const std::string& name) : path("/tmp/acsim_test_" + name) {}
  ~TempFile() { std::remove(path.c_str()); }
};

}  // namespace

TEST_CASE("config parse/serialize round-trip is the identity") {
  const std::string text =
      "n = 32\n"
      "bc = dirichlet\n"
      "theta = 0.25\n"
      "tau = 0.025\n"
      "t_final = 2\n"
      "lambda_jump = 50\n"
      "jump_amplitude = affine\n"
      "jump_compensated = false\n"
      "scenario = circle\n"
      "snapshot_times = 0,0.25,1\n"
      "seed = 123456789012345\n";
  const RunConfig cfg = parse_config(text);
  CHECK(cfg.n == 32);
  CHECK(cfg.bc == BcKind::dirichlet);
  CHECK(cfg.theta == 0.25);
  CHECK(cfg.tau == 0.025);
  CHECK(cfg.lambda_jump == 50.0);
  CHECK(cfg.jump_amplitude == JumpAmplitude::affine);
  CHECK(!cfg.jump_compensated);
  CHECK(cfg.scenario == Scenario::circle);
  CHECK(cfg.seed == 123456789012345ull);
  REQUIRE(cfg.snapshot_times.size() == 3);

  const std::string once = serialize_config(cfg);
  const std::string twice = serialize_config(parse_config(once));
  CHECK(once == twice);
}

TEST_CASE("config rejects unknown keys and bad values by name") {
  CHECK_THROWS_WITH_AS(parse_config("nonsense_key = 3\n"),
                       doctest::Contains("nonsense_key"), ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("tau = fast\n"), doctest::Contains("tau"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(parse_config("bc = periodic\n"), doctest::Contains("bc"),
                       ConfigError);
  CHECK_THROWS_AS(parse_config("just a line\n"), ConfigError);
}

TEST_CASE("validation enforces the cross-module invariants") {
  {
    RunConfig cfg = parse_config("");
    CHECK_NOTHROW(validate_config(cfg));
  }
  {
    // tau f1_coeff theta0 >= 1 breaks the implicit Jacobian
    RunConfig cfg = parse_config("tau = 0.3\n");
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  {
    RunConfig cfg = parse_config("theta = 1.5\n");  // theta >= theta0
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  {
    RunConfig cfg = parse_config("sigma_track = 0\n");
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  {
    RunConfig cfg = parse_config("snapshot_times = 99\n");
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
  {
    RunConfig cfg = parse_config("n = 1\n");
    CHECK_THROWS_AS(validate_config(cfg), ConfigError);
  }
}

TEST_CASE("f1 coefficient defaults to 4 theta0 unless given") {
  const RunConfig defaulted = parse_config("theta0 = 2\ntheta = 0.9\n");
  CHECK(make_potential(defaulted).f1_coeff == 8.0);
  const RunConfig explicit_cfg =
      parse_config("theta0 = 2\ntheta = 0.9\nf1_coeff = 4\n");
  CHECK(make_potential(explicit_cfg).f1_coeff == 4.0);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.05, 1.0 / 3.0, 1e-14, 123456.789, -2.5e-8, 0.0}) {
    CHECK(std::stod(format_double(v)) == v);
  }
}

TEST_CASE("manifest is deterministic byte for byte") {
  const RunConfig cfg = parse_config("n = 16\nseed = 7\n");
  TempFile a("manifest_a.txt"), b("manifest_b.txt");
  write_manifest(a.path, cfg);
  write_manifest(b.path, cfg);
  const std::string content = slurp(a.path);
  CHECK(content == slurp(b.path));
  CHECK(content.find("code_version = ") != std::string::npos);
  CHECK(content.find("seed = 7") != std::string::npos);
  CHECK(content.find("\r") == std::string::npos);  // LF endings only
}

TEST_CASE("csv writers: layout, header rows, decimal points") {
  RunRecord record;
  for (int k = 0; k <= 3; ++k) {
    record.times.push_back(0.05 * k);
    record.total_damage.push_back(0.5);
    record.u_min.push_back(0.1);
    record.u_max.push_back(0.9);
    record.free_energy.push_back(-0.25);
    record.sq_h_norm.push_back(0.3);
    if (k) {
      record.newton_iters.push_back(k);
      record.jump_counts.push_back(2 * k);
    }
  }
  TempFile rec_file("record.csv");
  write_run_record_csv(rec_file.path, record);
  const std::string text = slurp(rec_file.path);
  std::stringstream ss(text);
  std::string line;
  int lines = 0;
  while (std::getline(ss, line)) ++lines;
  CHECK(lines == 5);  // header + N+1 rows
  CHECK(text.substr(0, 4) == "time");
  CHECK(text.find(',') != std::string::npos);
  CHECK(text.find("0.05") != std::string::npos);
  CHECK(text.find("\r") == std::string::npos);

  const Mesh mesh = build_mesh(4, BcKind::neumann);
  Field u(mesh.node_count());
  for (int i = 0; i < mesh.node_count(); ++i) u[i] = i / 100.0;
  TempFile snap("snap.csv");
  write_snapshot_csv(snap.path, mesh, u);
  std::stringstream grid(slurp(snap.path));
  lines = 0;
  while (std::getline(grid, line)) {
    ++lines;
    int commas = 0;
    for (char c : line) commas += c == ',';
    CHECK(commas == 4);  // n+1 columns
  }
  CHECK(lines == 5);  // n+1 rows

  TempFile pgm("snap.pgm");
  write_snapshot_pgm(pgm.path, mesh, u);
  const std::string pgm_text = slurp(pgm.path);
  CHECK(pgm_text.substr(0, 3) == "P2\n");
  CHECK(pgm_text.find("5 5") != std::string::npos);

  TempFile vtk("snap.vtk");
  write_snapshot_vtk(vtk.path, mesh, u, 0.25);
  const std::string vtk_text = slurp(vtk.path);
  CHECK(vtk_text.find("STRUCTURED_POINTS") != std::string::npos);
  CHECK(vtk_text.find("DIMENSIONS 5 5 1") != std::string::npos);
}

TEST_CASE("snapshot filenames carry the requested time") {
  CHECK(snapshot_basename(0.25) == "snap_t0.25.csv");
  CHECK(snapshot_basename(4.0) == "snap_t4.csv");
}

TEST_CASE("stats and coupling csv writers") {
  EnsembleStats stats;
  stats.times = {0.0, 0.05};
  stats.mean_total_damage = {0.5, 0.51};
  stats.std_total_damage = {0.0, 0.01};
  stats.mean_umin = {0.1, 0.1};
  stats.min_umin = {0.05, 0.04};
  stats.mean_umax = {0.9, 0.92};
  stats.max_umax = {0.95, 0.97};
  stats.mean_sq_h_norm = {0.3, 0.31};
  TempFile sf("stats.csv");
  write_stats_csv(sf.path, stats);
  const auto text = slurp(sf.path);
  CHECK(text.substr(0, 22) == "time,mean_total_damage");
  CHECK(text.find("0.05,0.51,0.01") != std::string::npos);

  CouplingRecord rec;
  rec.times = {0.0, 0.05, 0.1};
  rec.mean_sq_distance = {0.04, 0.03, 0.02};
  TempFile cf("coupling.csv");
  write_coupling_csv(cf.path, rec);
  const auto coupling_text = slurp(cf.path);
  CHECK(coupling_text == "time,mean_sq_distance\n0,0.04\n0.05,0.03\n0.1,0.02\n");
}

TEST_CASE("identical manifests imply identical outputs") {
  const RunConfig cfg = parse_config("n = 8\nt_final = 0.25\nlambda_jump = 10\n");
  validate_config(cfg);
  const FemSystem fem = build_fem_system(cfg.n, cfg.bc);
  const PotentialSplit pot = make_potential(cfg);
  const RunParams params = make_run_params(cfg);

  TempFile a("obs_a.csv"), b("obs_b.csv");
  write_run_record_csv(a.path, run_realization(fem, pot, params, cfg.seed, 0));
  write_run_record_csv(b.path, run_realization(fem, pot, params, cfg.seed, 0));
  CHECK(slurp(a.path) == slurp(b.path));
}
