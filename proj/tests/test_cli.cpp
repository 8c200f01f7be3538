#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "pag/cli.hpp"
#include "pag/catalog.hpp"
#include "pag/config.hpp"
#include "pag/io.hpp"

using namespace pag;
namespace fs = std::filesystem;

namespace {

struct Run
{
  int code = -1;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args)
{
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(args, out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

class Scratch
{
public:
  Scratch()
  {
    dir_ = fs::temp_directory_path() / ("pag_cli_" + std::to_string(::getpid()));
    fs::create_directories(dir_);
  }
  ~Scratch()
  {
    std::error_code ec;
    fs::remove_all(dir_, ec);
  }

  std::string write(const std::string & name, const std::string & text) const
  {
    const auto path = dir_ / name;
    std::ofstream(path, std::ios::binary) << text;
    return path.string();
  }

  std::string path(const std::string & name) const { return (dir_ / name).string(); }

private:
  fs::path dir_;
};

std::string slurp(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

CsvTable table(const std::string & text)
{
  std::istringstream in(text);
  return read_csv(in);
}

std::size_t count_lines(const std::string & text, const std::string & prefix)
{
  std::istringstream in(text);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.rfind(prefix, 0) == 0;
  return n;
}

}  // namespace

TEST_CASE("list-models")
{
  const auto all = run({"list-models"});
  CHECK(all.code == exit_ok);
  for (const char * tag : {"C11 ", "C12 ", "C211 ", "C212 ", "C22 ", "C231 ", "C232 ", "C233 "}) {
    CHECK(count_lines(all.out, tag) == 1);
  }
  CHECK(count_lines(all.out, "C") == 8);

  const auto one = run({"list-models", "--case", "C22"});
  CHECK(one.code == exit_ok);
  CHECK(count_lines(one.out, "C") == 1);
  CHECK(one.out.find("x2 != 0") != std::string::npos);
  CHECK(one.out.find("I3") != std::string::npos);

  const auto bad = run({"list-models", "--case", "C99"});
  CHECK(bad.code == exit_usage);
  CHECK(bad.err.find("unknown case") != std::string::npos);
}

TEST_CASE("usage errors exit 2")
{
  CHECK(run({}).code == exit_usage);
  CHECK(run({"frobnicate"}).code == exit_usage);
  CHECK(run({"integrate"}).code == exit_usage);
  CHECK(run({"integrate", "--config", "/nonexistent/pag.json"}).code == exit_usage);
  CHECK(run({"check", "--case", "C11", "--suite", "everything"}).code == exit_usage);
  CHECK(run({"check"}).code == exit_usage);
  CHECK(run({"--help"}).code == exit_ok);
}

TEST_CASE("validate")
{
  Scratch tmp;
  CHECK(run({"validate", "--case", "C231"}).code == exit_ok);
  CHECK(run({"validate", "--case", "C9"}).code == exit_usage);
  const auto good = tmp.write("good.json", R"({"model": {"case": "C12", "j0": 0.5, "g0": 2},
    "initial": {"x": [0.1, 1], "p": [0, 0.2]}, "t_span": [0, 1]})");
  CHECK(run({"validate", "--config", good}).code == exit_ok);

  const std::vector<std::string> bad_configs = {
    R"({"model": {"case": "C12", "jo": 0.5}})",
    R"({"model": {"case": "C11"}, "outptu": {}})",
    R"({"model": {"case": "C11"}, "integrator": {"method": "euler"}})",
    R"({"model": {"case": "C11"}, "integrator": {"rel_tol": -1}})",
    R"({"model": {"case": "C11"}, "output": {"stride": 0}})",
    R"({"model": {"case": "C11"}, "output": {"format": "xml"}})",
    R"({"model": {"case": "C12"}, "initial": {"x": [0.1, 0], "p": [0, 0]}})",
    R"({"model": {"case": "C11"}, "initial": {"x": [0.1, 0, 1], "p": [0, 0]}})",
    R"({"model": {"case": "C11"}, "t_span": [1, 0]})",
    R"({"model": {"case": "C22"}, "family": {}})",
    R"({"model": {"case": "C12", "g0": 0}})",
    R"({"model": {"case": "C11"})",
    R"([1, 2])",
  };
  for (const auto & text : bad_configs) {
    CAPTURE(text);
    const auto r = run({"validate", "--config", tmp.write("bad.json", text)});
    CHECK(r.code == exit_usage);
    CHECK_FALSE(r.err.empty());
  }
}

TEST_CASE("integrate: zero costate follows the drift")
{
  Scratch tmp;
  const auto cfg = tmp.write("c11.json", R"({"model": {"case": "C11", "c1": 0.7},
    "initial": {"x": [0.25, -0.5], "p": [0, 0]}, "t_span": [0, 2]})");
  const auto r = run({"integrate", "--config", cfg});
  REQUIRE(r.code == exit_ok);
  CHECK(r.err.find("stop_reason horizon") != std::string::npos);
  CHECK(r.err.find("energy 0") != std::string::npos);
  const auto t = table(r.out);
  CHECK(t.header == std::vector<std::string>{"t", "x1", "x2", "p1", "p2", "u", "H", "I1"});
  REQUIRE(t.rows.size() > 3);
  CHECK(t.rows.back()[0] == 2.0);
  for (const auto & row : t.rows) {
    CHECK(std::abs(row[t.column("x1")] - (row[0] + 0.25)) < 1e-12);
    CHECK(row[t.column("x2")] == -0.5);
  }
}

TEST_CASE("integrate: C12 k<0 blows up")
{
  Scratch tmp;
  const auto cfg = tmp.write("kneg.json", R"({"model": {"case": "C12", "j0": 0.5, "g0": 1},
    "initial": {"x": [0.2, 1], "p": [-1, 0.3]}, "t_span": [0, 20]})");
  const auto r = run({"integrate", "--config", cfg, "--out", tmp.path("kneg.csv")});
  CHECK(r.code == exit_early_stop);
  CHECK(r.out.find("stop_reason blow_up") != std::string::npos);
  const auto t = table(slurp(tmp.path("kneg.csv")));
  CHECK(t.rows.back()[0] < 20.0);
}

TEST_CASE("integrate: stride, formats and files")
{
  Scratch tmp;
  const auto cfg = tmp.write("c211.json", R"({"model": {"case": "C211", "c2": 0.3, "c3": -0.4},
    "initial": {"x": [0.1, 0.2, -0.3], "p": [0.5, -0.2, 0.1]}, "t_span": [0, 3],
    "integrator": {"method": "rk4_fixed", "step": 0.01}})");
  const auto full = run({"integrate", "--config", cfg});
  REQUIRE(full.code == exit_ok);
  const auto every = table(full.out);
  REQUIRE(every.rows.size() == 301);

  const auto strided = run({"integrate", "--config", cfg, "--stride", "10"});
  const auto sparse = table(strided.out);
  REQUIRE(sparse.rows.size() == 31);
  for (std::size_t i = 0; i < sparse.rows.size(); ++i) CHECK(sparse.rows[i] == every.rows[10 * i]);

  CHECK(run({"integrate", "--config", cfg, "--stride", "0"}).code == exit_usage);
  CHECK(run({"integrate", "--config", cfg, "--format", "yaml"}).code == exit_usage);

  const auto json_path = tmp.path("c211.json.out");
  const auto r = run({"integrate", "--config", cfg, "--format", "json", "--out", json_path});
  REQUIRE(r.code == exit_ok);
  CHECK(r.out.find("case C211") != std::string::npos);
  std::ifstream in(json_path, std::ios::binary);
  const auto stored = read_trajectory_json(in);
  CHECK(stored.tag == CaseTag::C211);
  REQUIRE(stored.traj.size() == every.rows.size());
  for (std::size_t i = 0; i < every.rows.size(); ++i) {
    CHECK(stored.traj.times[i] == every.rows[i][0]);
    CHECK(stored.traj.states[i][2] == every.rows[i][every.column("x3")]);
    CHECK(stored.traj.costates[i][0] == every.rows[i][every.column("p1")]);
  }
}

TEST_CASE("integrate output is byte-identical across reruns")
{
  Scratch tmp;
  const auto cfg = tmp.write("c22.json", R"({"model": {"case": "C22", "c1": 0.3, "g0": 1},
    "initial": {"x": [0, 1, -2], "p": [0.05, -0.1, -0.05]}, "t_span": [0, 2],
    "output": {"format": "json"}})");
  const auto a = run({"integrate", "--config", cfg});
  const auto b = run({"integrate", "--config", cfg});
  REQUIRE(a.code == exit_ok);
  CHECK(a.out == b.out);
  CHECK(a.err == b.err);
  CHECK(a.out.find('\r') == std::string::npos);
}

TEST_CASE("closed-form sampling")
{
  Scratch tmp;
  const auto line = tmp.write("line.json", R"({"model": {"case": "C11", "c1": 0},
    "family": {"c2": 1, "c3": 0}, "grid": {"t0": 0, "t1": 1, "step": 0.1}})");
  const auto r = run({"closed-form", "--config", line});
  REQUIRE(r.code == exit_ok);
  const auto t = table(r.out);
  CHECK(t.header == std::vector<std::string>{"t", "x1", "x2"});
  REQUIRE(t.rows.size() == 11);
  for (const auto & row : t.rows) CHECK(row[2] == doctest::Approx(row[0]).epsilon(1e-15));

  const auto cubic = tmp.write("cubic.json", R"({"model": {"case": "C211", "c2": 0, "c3": 0},
    "family": {"coeffs": [0, 0, 0, 1]}, "grid": {"t0": 0, "t1": 2, "step": 0.25}})");
  const auto c = run({"closed-form", "--config", cubic});
  REQUIRE(c.code == exit_ok);
  const auto ct = table(c.out);
  REQUIRE(ct.rows.size() == 9);
  for (const auto & row : ct.rows) CHECK(row[ct.column("x2")] == doctest::Approx(std::pow(row[0], 3)));

  const auto tan = tmp.write("tan.json", R"({"model": {"case": "C212", "c1": 0.4, "c3": 0.5},
    "family": {"subcase": "tan_family", "a": 1, "b": 1, "c": 0}, "grid": {"t0": 0, "t1": 2, "step": 0.1}})");
  const auto p = run({"closed-form", "--config", tan});
  CHECK(p.code == exit_early_stop);
  CHECK(p.err.find("1.5707963") != std::string::npos);
  CHECK(p.out.empty());

  const auto none = tmp.write("none.json", R"({"model": {"case": "C231"},
    "family": {}, "grid": {"t0": 0, "t1": 1, "step": 0.1}})");
  const auto n = run({"closed-form", "--config", none});
  CHECK(n.code == exit_usage);
  CHECK(n.err.find("no closed form") != std::string::npos);

  const auto json_out = tmp.path("line_out.json");
  CHECK(run({"closed-form", "--config", line, "--format", "json", "--out", json_out}).code == exit_ok);
  CHECK(slurp(json_out).find("\"states\"") != std::string::npos);
}

TEST_CASE("check suites")
{
  for (const char * tag : {"C11", "C12", "C211", "C212", "C22", "C231", "C232", "C233"}) {
    CAPTURE(tag);
    const auto r = run({"check", "--case", tag, "--suite", "all"});
    CHECK(r.code == exit_ok);
    CHECK(count_lines(r.out, "FAIL") == 0);
    CHECK(count_lines(r.out, "PASS") >= 5);
  }

  const auto appendix = run({"check", "--case", "C231", "--suite", "appendix"});
  CHECK(appendix.code == exit_ok);
  CHECK(count_lines(appendix.out, "PASS appendix.h_pde") == 2);
  CHECK(count_lines(appendix.out, "PASS appendix.schwarzian") == 1);
  CHECK(count_lines(appendix.out, "PASS appendix.char_roots") == 1);

  const auto duality = run({"check", "--case", "C12", "--suite", "duality"});
  CHECK(duality.code == exit_ok);
  CHECK(count_lines(duality.out, "PASS duality.max_error") == 1);
  CHECK(count_lines(duality.out, "PASS") == 1);

  CHECK(count_lines(run({"check", "--case", "C232", "--suite", "symmetry"}).out, "SKIP") == 1);
  CHECK(count_lines(run({"check", "--case", "C11", "--suite", "appendix"}).out, "SKIP") == 1);
}

TEST_CASE("check reads the model from a config")
{
  Scratch tmp;
  const auto cfg = tmp.write("c232.json", R"({"model": {"case": "C232", "c1": 0.2, "c3": 0.8, "c4": 1.5,
    "epsilon": 1, "g0": 1, "f20": [1, 1]}})");
  const auto r = run({"check", "--config", cfg, "--suite", "appendix"});
  CHECK(r.code == exit_ok);
  CHECK(r.out.find("case C232") != std::string::npos);
}

TEST_CASE("check is reproducible under a fixed seed")
{
  const auto a = run({"check", "--case", "C22", "--suite", "all"});
  const auto b = run({"check", "--case", "C22", "--suite", "all"});
  CHECK(a.out == b.out);
}

TEST_CASE("compare against closed forms")
{
  Scratch tmp;
  const auto c11 = tmp.write("c11.json", R"({"model": {"case": "C11", "c1": 1},
    "initial": {"x": [0, 0], "p": [0.3, 2]}, "t_span": [0, 1]})");
  const auto r = run({"compare", "--config", c11});
  CHECK(r.code == exit_ok);
  const auto pos = r.out.find("max_discrepancy ");
  REQUIRE(pos != std::string::npos);
  CHECK(std::stod(r.out.substr(pos + 16)) < 1e-8);

  const auto shifted = tmp.write("c11b.json", R"({"model": {"case": "C11", "c1": -0.5},
    "initial": {"x": [1, 0.5], "p": [0, -1]}, "t_span": [2, 3.5]})");
  CHECK(run({"compare", "--config", shifted}).code == exit_ok);

  const auto line = tmp.write("c12.json", R"({"model": {"case": "C12", "j0": 0.5, "g0": 1},
    "initial": {"x": [0.2, 1], "p": [0, -0.5]}, "t_span": [0, 1]})");
  const auto l = run({"compare", "--config", line});
  CHECK(l.code == exit_ok);
  CHECK(l.out.find("c1zero_c2zero") != std::string::npos);
  CHECK(std::stod(l.out.substr(l.out.find("max_discrepancy ") + 16)) < 1e-8);

  CHECK(run({"compare", "--config", line, "--tolerance", "0"}).code == exit_check_failed);

  const auto kneg = tmp.write("kneg.json", R"({"model": {"case": "C12", "j0": 0.5, "g0": 1},
    "initial": {"x": [0.2, 1], "p": [-1, 0.3]}, "t_span": [0, 20]})");
  CHECK(run({"compare", "--config", kneg}).code == exit_early_stop);

  const auto c22 = tmp.write("c22.json", R"({"model": {"case": "C22"},
    "initial": {"x": [0, 1, -2], "p": [0, 0, 0]}, "t_span": [0, 1]})");
  const auto n = run({"compare", "--config", c22});
  CHECK(n.code == exit_usage);
  CHECK(n.err.find("no closed form") != std::string::npos);
}

TEST_CASE("trajectory round-trips are bit-exact")
{
  for (CaseTag tag : kAllCases) {
    CAPTURE(to_string(tag));
    const auto spec = default_spec(tag);
    const auto traj = integrate(spec, default_phase_point(spec), 0.0, 1.0);

    std::ostringstream js;
    write_trajectory_json(js, spec, traj);
    std::istringstream jin(js.str());
    const auto back = read_trajectory_json(jin);
    CHECK(back.tag == tag);
    CHECK(back.traj.stop_reason == traj.stop_reason);
    REQUIRE(back.traj.size() == traj.size());
    bool same = true;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      same = same && back.traj.times[i] == traj.times[i] && back.traj.states[i] == traj.states[i] &&
             back.traj.costates[i] == traj.costates[i] && back.traj.controls[i] == traj.controls[i];
      for (std::size_t k = 0; k < traj.integral_log[i].size(); ++k) {
        same = same && back.traj.integral_log[i][k].name == traj.integral_log[i][k].name &&
               back.traj.integral_log[i][k].value == traj.integral_log[i][k].value;
      }
    }
    CHECK(same);

    std::ostringstream cs;
    write_trajectory_csv(cs, spec, traj);
    const auto t = table(cs.str());
    CHECK(t.header == trajectory_columns(spec, traj));
    REQUIRE(t.rows.size() == traj.size());
    const int n = spec.dim();
    bool csv_same = true;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      csv_same = csv_same && t.rows[i][0] == traj.times[i];
      for (int j = 0; j < n; ++j) {
        csv_same = csv_same && t.rows[i][1 + j] == traj.states[i][j] && t.rows[i][1 + n + j] == traj.costates[i][j];
      }
      csv_same = csv_same && t.rows[i][1 + 2 * n] == traj.controls[i] &&
                 t.rows[i][2 + 2 * n] == traj.integral_log[i][0].value.real();
    }
    CHECK(csv_same);

    std::ostringstream again;
    write_trajectory_json(again, spec, back.traj);
    CHECK(again.str() == js.str());
  }
}

TEST_CASE("csv reader rejects malformed input")
{
  CHECK_THROWS_AS(table(""), InvalidArgument);
  CHECK_THROWS_AS(table("t,x1\n0,1,2\n"), InvalidArgument);
  CHECK_THROWS_AS(table("t,x1\n0,abc\n"), InvalidArgument);
  CHECK_THROWS_AS(table("t,x1\n0,1\n").column("x2"), InvalidArgument);
  std::istringstream bad_json("{\"case\": \"C11\"}");
  CHECK_THROWS_AS(read_trajectory_json(bad_json), InvalidArgument);
}

TEST_CASE("grid times")
{
  CHECK(grid_times({0.0, 1.0, 0.1}).size() == 11);
  CHECK(grid_times({0.0, 1.0, 0.3}).size() == 4);
  CHECK(grid_times({2.0, 2.0, 0.5}) == std::vector<double>{2.0});
  const auto g = grid_times({-1.0, 1.0, 0.5});
  CHECK(g == std::vector<double>{-1.0, -0.5, 0.0, 0.5, 1.0});
}

TEST_CASE("omitted model constants take catalog defaults")
{
  const auto cfg = parse_run_config(R"({"model": {"case": "C233", "c1": 0.9}})");
  const auto ref = default_spec(CaseTag::C233);
  CHECK(cfg.model.params.c1 == 0.9);
  CHECK(cfg.model.params.c3 == ref.params.c3);
  CHECK(cfg.model.params.c4 == ref.params.c4);
  CHECK(cfg.model.f20 == ref.f20);
  CHECK(parse_run_config(R"({"model": {"case": "C232", "f20": [2]}})").model.f20 == std::vector<double>{2.0});
  CHECK(cfg.t0 == 0.0);
  CHECK(cfg.t1 == 1.0);
}
