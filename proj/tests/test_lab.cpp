#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <sstream>

#include "doctest.h"
#include "sclab/lab/cli.hpp"
#include "sclab/lab/config.hpp"
#include "sclab/lab/experiments.hpp"
#include "sclab/lab/record.hpp"

using namespace sclab;
using namespace sclab::lab;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "sclab_test_lab" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig bundled(const std::string& name) { return load_config(resolve_config_path(name)); }

struct CliResult {
  int code;
  std::string out;
  std::string err;
};

CliResult cli(std::vector<std::string> args) {
  args.insert(args.begin(), "sclab");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string header(RecordKind kind) {
  std::string s;
  for (const auto& c : columns(kind)) s += (s.empty() ? "" : ",") + c;
  return s;
}

}  // namespace

TEST_CASE("config files parse sections, comments and lists") {
  const auto cfg = parse_config(
      "# comment\n[run]\nexperiment = combined_limit ; not a comment here\n"
      "[packet]\n k = 2.5 \n; another comment\n[scan]\nhbar_list = 1, 0.1 0.01\n"
      "[numerics]\nn = 256\n");
  CHECK(cfg.experiment == "combined_limit ; not a comment here");
  CHECK(cfg.k == 2.5);
  CHECK(cfg.hbar_list == std::vector<double>{1, 0.1, 0.01});
  CHECK(cfg.n == 256);

  CHECK_THROWS_AS(parse_config("[packet]\nwidth = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[packet]\nk = one\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[numerics]\nn = -4\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("[packet\nk = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse_config("k 1\n"), ConfigError);
}

TEST_CASE("missing config files are named in the error") {
  try {
    load_config("/nonexistent/dir/cfg.ini");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/dir/cfg.ini") != std::string::npos);
  }
  CHECK(fs::exists(resolve_config_path("combined_harmonic")));
}

TEST_CASE("every bundled config validates") {
  for (const auto& entry : fs::directory_iterator(SCLAB_CONFIG_DIR)) {
    if (entry.path().extension() != ".ini") continue;
    CAPTURE(entry.path().string());
    CHECK_NOTHROW(validate(load_config(entry.path())));
  }
}

TEST_CASE("config echo round-trips for random configs") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 50; ++trial) {
    RunConfig cfg;
    cfg.epsilon = std::abs(u(rng)) + 1e-300;
    cfg.r0 = u(rng) * 1e-7;
    cfg.p0 = u(rng) / 3.0;
    cfg.hbar_list = {u(rng), u(rng) * 1e-12};
    cfg.coeffs = {u(rng), 0.1, 1.0 / 3.0};
    cfg.seed = rng();
    cfg.dump_fields = trial % 2 == 0;
    std::string text;
    for (const auto& [k, v] : config_echo(cfg)) text += k + " = " + v + "\n";
    const auto back = parse_config(text);
    CHECK(config_echo(back) == config_echo(cfg));
    CHECK(back.epsilon == cfg.epsilon);
    CHECK(back.r0 == cfg.r0);
    CHECK(back.hbar_list == cfg.hbar_list);
    CHECK(back.seed == cfg.seed);
  }
}

TEST_CASE("validation rejects bad scans") {
  auto cfg = bundled("standard_harmonic");
  cfg.hbar_list = {1.0};
  CHECK_THROWS_AS(run_experiment(cfg), DomainError);
  cfg.hbar_list = {1.0, -0.1, 0.01};
  CHECK_THROWS_AS(run_experiment(cfg), DomainError);

  auto det = bundled("deterministic_harmonic");
  det.epsilon_list = {2.0, 1.0, 0.5};  // 1.0 = hbar / (m omega)
  CHECK_THROWS_AS(validate(det), ConfigError);
  det.epsilon_list = {0.1, 0.2, 0.05};
  CHECK_THROWS_AS(validate(det), ConfigError);

  RunConfig bad;
  bad.experiment = "nope";
  CHECK_THROWS_AS(validate(bad), ConfigError);
  bad = RunConfig{};
  bad.dt = 0.0123;  // does not divide t_final / snapshots
  CHECK_THROWS_AS(run_experiment(bad), ConfigError);
  bad.dt = 10.0;
  bad.potential = "harmonic";
  CHECK_THROWS_AS(run_experiment(bad), DomainError);
}

TEST_CASE("record headers are pinned") {
  CHECK(header(RecordKind::Snapshots) ==
        "run,hbar,epsilon,t,x_mean,p_mean,var_x,var_p,uncertainty_product,width,"
        "kurtosis_excess,quantum_term_norm,hj_residual_classical,hj_residual_quantum,"
        "newton_r,trajectory_deviation");
  CHECK(header(RecordKind::Detpot) == "epsilon,residual,fourier_window_norm");
  CHECK(header(RecordKind::Phj) == "t,x_mean,p_mean,newton_r,newton_p,min_jacobian,hj_residual");
  CHECK(header(RecordKind::Liouville) == "t,x_mean,p_mean,mass,l1_to_initial,newton_r,newton_p");

  RunRecord rec;
  rec.kind = RecordKind::Detpot;
  rec.rows = {{0.1, 2e-3, std::nan("")}};
  rec.add_result("verdict", "non-deterministic");
  const auto csv = to_csv(rec);
  CHECK(csv.rfind("# schema_version = 1\n# record = detpot\n# config.run.experiment = ", 0) == 0);
  CHECK(csv.find("# result.verdict = non-deterministic\n" + header(RecordKind::Detpot) +
                 "\n0.10000000000000001,0.002,nan\n") != std::string::npos);
}

TEST_CASE("records round-trip through CSV") {
  auto cfg = bundled("uncertainty_free");
  cfg.hbar_list = {1.0, 0.5};
  cfg.snapshots = 3;
  const auto rec = run_experiment(cfg);
  const auto back = parse_csv(to_csv(rec));
  CHECK(back.kind == rec.kind);
  CHECK(config_echo(back.config) == config_echo(rec.config));
  CHECK(back.results == rec.results);
  REQUIRE(back.rows.size() == rec.rows.size());
  for (std::size_t i = 0; i < rec.rows.size(); ++i) {
    for (std::size_t j = 0; j < rec.rows[i].size(); ++j) {
      const double a = rec.rows[i][j], b = back.rows[i][j];
      CHECK(((std::isnan(a) && std::isnan(b)) || a == b));
    }
  }
  CHECK(to_csv(back) == to_csv(rec));
}

TEST_CASE("identical configs give byte-identical CSVs, whatever the thread count") {
  auto cfg = bundled("standard_free");
  cfg.snapshots = 4;
  const auto a = to_csv(run_experiment(cfg));
  const auto b = to_csv(run_experiment(cfg));
  CHECK(a == b);
  cfg.threads = 3;
  const auto c = to_csv(run_experiment(cfg));
  // The thread count is part of the echo; the data rows must agree.
  CHECK(a.substr(a.find("run,hbar")) == c.substr(c.find("run,hbar")));
}

TEST_CASE("a record alone suffices to rerun") {
  auto cfg = bundled("liouville_harmonic");
  cfg.snapshots = 2;
  cfg.phase_n = 48;
  cfg.t_final = 1.0;
  const auto first = to_csv(run_experiment(cfg));
  const auto again = to_csv(run_experiment(parse_csv(first).config));
  CHECK(first == again);
}

TEST_CASE("standard limit examples") {
  const auto h = run_experiment(bundled("standard_harmonic"));
  CHECK(std::stod(h.result("quantum_term_ratio.1")) == doctest::Approx(1e-2).epsilon(0.05));
  CHECK(std::stod(h.result("quantum_term_ratio.2")) == doctest::Approx(1e-4).epsilon(0.05));
  CHECK(std::stod(h.result("quantum_term_exponent")) == doctest::Approx(2.0).epsilon(0.01));
  CHECK(h.result("residual_gaps") == "0");

  const auto f = run_experiment(bundled("standard_free"));
  CHECK(std::stod(f.result("classical_gap_max")) <= 0.02);
  // The quantum term norm shrinks with hbar at every snapshot.
  for (std::size_t i = 1; i < 3; ++i) {
    const auto prev = f.column("quantum_term_norm", i - 1);
    const auto cur = f.column("quantum_term_norm", i);
    for (std::size_t k = 0; k < cur.size(); ++k) CHECK(cur[k] < prev[k]);
  }
}

TEST_CASE("deterministic limit examples") {
  const auto f = run_experiment(bundled("deterministic_free"));
  CHECK(std::stod(f.result("width_ratio_exponent")) == doctest::Approx(-2.0).epsilon(0.025));
  CHECK(std::stod(f.result("coupling_exponent")) == doctest::Approx(-2.0).epsilon(0.05));
  for (std::size_t i = 0; i < 3; ++i) {
    const double eps = f.config.epsilon_list[i];
    const double want = eps * (1.0 + 1.0 / (eps * eps));
    CHECK(std::stod(f.result("width_final." + std::to_string(i))) ==
          doctest::Approx(want).epsilon(1e-6));
  }

  const auto h = run_experiment(bundled("deterministic_harmonic"));
  CHECK(std::stod(h.result("width_exponent")) == doctest::Approx(-1.0).epsilon(0.05));
  for (std::size_t i = 0; i < h.config.epsilon_list.size(); ++i) {
    CHECK(std::stod(h.result("width_final." + std::to_string(i))) ==
          doctest::Approx(1.0 / h.config.epsilon_list[i]).epsilon(1e-4));
  }
}

TEST_CASE("combined limit examples") {
  auto hc = bundled("combined_harmonic");
  hc.t_final = std::numbers::pi / 2;
  hc.snapshots = 4;
  hc.hbar_list = {0.1, 0.01};
  const auto h = run_experiment(hc);
  for (std::size_t i = 0; i < hc.hbar_list.size(); ++i) {
    for (double w : h.column("width", i)) CHECK(w == doctest::Approx(hc.hbar_list[i]).epsilon(1e-6));
    for (double d : h.column("trajectory_deviation", i)) CHECK(d <= 1e-4);
  }
  CHECK(h.result("detpot_verdict") == "deterministic");

  const auto f = run_experiment(bundled("combined_free"));
  for (std::size_t i = 0; i < 2; ++i) {
    const double hbar = f.config.hbar_list[i];
    const auto t = f.column("t", i);
    const auto w = f.column("width", i);
    for (std::size_t k = 0; k < t.size(); ++k) {
      CHECK(std::abs(w[k] - hbar * (1 + t[k] * t[k])) <= 1e-4 * w[k]);
    }
  }

  const auto q = run_experiment(bundled("combined_quartic"));
  for (std::size_t i = 0; i < q.config.hbar_list.size(); ++i) {
    CHECK(std::stod(q.result("kurtosis_max." + std::to_string(i))) > 1e-2);
  }
  CHECK(q.result("detpot_verdict") == "non-deterministic");
}

TEST_CASE("detpot runs") {
  CHECK(run_experiment(bundled("detpot_quadratic")).result("verdict") == "deterministic");
  const auto q = run_experiment(bundled("detpot_quartic"));
  CHECK(q.result("verdict") == "non-deterministic");
  CHECK(q.rows.size() == 3);
  const auto t = run_experiment(bundled("detpot_tabulated"));
  CHECK(t.result("verdict") == "non-deterministic");
  CHECK(t.result("potential").rfind("tabulated", 0) == 0);
}

TEST_CASE("uncertainty runs") {
  const auto c = run_experiment(bundled("uncertainty_coherent"));
  for (double u : c.column("uncertainty_product")) CHECK(std::abs(u - 0.5) <= 0.5e-6);
  CHECK(c.result("floor_holds") == "yes");

  const auto f = run_experiment(bundled("uncertainty_free"));
  for (std::size_t i = 0; i < 3; ++i) {
    const auto u = f.column("uncertainty_product", i);
    for (std::size_t k = 1; k < u.size(); ++k) CHECK(u[k] > u[k - 1]);
  }
  CHECK(std::stod(f.result("min_product_exponent")) == doctest::Approx(1.0).epsilon(1e-6));
}

TEST_CASE("phj and liouville demos") {
  const auto p = run_experiment(bundled("phj_harmonic"));
  CHECK(p.result("caustic_time") == "none");
  CHECK(std::stod(p.result("deviation_max")) <= 1e-5);
  try {
    run_experiment(bundled("phj_focus"));
    FAIL("expected a caustic");
  } catch (const CausticError& e) {
    CHECK(e.caustic_time() == doctest::Approx(1.0).epsilon(1e-6));
  }
  const auto l = run_experiment(bundled("liouville_harmonic"));
  CHECK(std::stod(l.result("l1_final")) <= 0.02);
  CHECK(std::stod(l.result("delta_ansatz_residual")) <= 1e-6);
}

TEST_CASE("cli exit codes") {
  const auto dir = scratch("cli");
  const std::string out = "--run.output_dir=" + dir.string();

  const auto ok = cli({"scan", "--config", "combined_free", out});
  CHECK(ok.code == 0);
  CHECK(ok.out.find("combined_limit: ") == 0);
  CHECK(fs::exists(dir / "combined_limit.csv"));
  CHECK(fs::exists(dir / "combined_limit_summary.txt"));

  const auto rep = cli({"report", "--input", (dir / "combined_limit.csv").string()});
  CHECK(rep.code == 0);
  CHECK(rep.out.find("experiment: combined_limit") != std::string::npos);

  const auto missing = cli({"scan", "--config", "/no/such/file.ini"});
  CHECK(missing.code == 1);
  CHECK(missing.err.find("/no/such/file.ini") != std::string::npos);

  const auto unknown = cli({"scan", "--bogus"});
  CHECK(unknown.code == 1);
  CHECK(unknown.err.find("usage:") != std::string::npos);
  CHECK(cli({"scan", "--packet.width=2"}).code == 1);
  CHECK(cli({}).code == 1);
  CHECK(cli({"detpot", "--config", "detpot_quartic", "--scan.epsilon_list=0.1,0.05", out}).code == 1);

  const auto caustic = cli({"phj", "--config", "phj_focus", out});
  CHECK(caustic.code == 2);
  CHECK(caustic.err.find("t = 1") != std::string::npos);

  const auto dump = cli({"simulate", "--config", "uncertainty_coherent", "--dump-fields",
                         "--numerics.snapshots=2", "--run.name=coh", out});
  CHECK(dump.code == 0);
  CHECK(fs::exists(dir / "coh_fields_r0_s2.csv"));
}
