#include "pag/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "pag/catalog.hpp"

namespace pag {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string & msg)
{
  throw ConfigError("config: " + msg);
}

// Rejects keys outside `allowed` so typos in constant names never pass silently.
void check_keys(const json & obj, const std::string & where, const std::set<std::string> & allowed)
{
  if (!obj.is_object()) fail(where + " must be an object");
  for (const auto & [key, _] : obj.items()) {
    if (!allowed.count(key)) fail("unknown key '" + key + "' in " + where);
  }
}

double number(const json & obj, const std::string & key, const std::string & where)
{
  const auto & v = obj.at(key);
  if (!v.is_number()) fail(where + "." + key + " must be a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) fail(where + "." + key + " must be finite");
  return d;
}

double number_or(const json & obj, const std::string & key, const std::string & where, double fallback)
{
  return obj.contains(key) ? number(obj, key, where) : fallback;
}

std::string text(const json & obj, const std::string & key, const std::string & where)
{
  const auto & v = obj.at(key);
  if (!v.is_string()) fail(where + "." + key + " must be a string");
  return v.get<std::string>();
}

Vec vector_of(const json & v, const std::string & where, int dim)
{
  if (!v.is_array()) fail(where + " must be an array");
  if (static_cast<int>(v.size()) != dim) fail(where + " must have " + std::to_string(dim) + " entries");
  Vec out(dim);
  for (int i = 0; i < dim; ++i) {
    if (!v[i].is_number()) fail(where + " entries must be numbers");
    out[i] = v[i].get<double>();
    if (!std::isfinite(out[i])) fail(where + " entries must be finite");
  }
  return out;
}

ModelSpec parse_model(const json & m)
{
  if (!m.is_object() || !m.contains("case")) fail("model.case is required");
  const std::string name = text(m, "case", "model");
  const auto tag = parse_case(name);
  if (!tag) fail("unknown case '" + name + "'");
  std::set<std::string> allowed{"case"};
  for (auto p : parameter_names(*tag)) allowed.emplace(p);
  check_keys(m, "model", allowed);

  ModelSpec spec = default_spec(*tag);
  auto & p = spec.params;
  const std::pair<const char *, double *> slots[] = {{"c1", &p.c1}, {"c2", &p.c2}, {"c3", &p.c3}, {"c4", &p.c4},
                                                     {"j0", &p.j0}, {"g0", &p.g0}, {"epsilon", &p.epsilon}};
  for (auto [key, slot] : slots) {
    if (m.contains(key)) *slot = number(m, key, "model");
  }
  if (m.contains("f20")) {
    const auto & f = m.at("f20");
    if (!f.is_array()) fail("model.f20 must be an array");
    spec.f20.clear();
    for (const auto & c : f) {
      if (!c.is_number() || !std::isfinite(c.get<double>())) fail("model.f20 entries must be finite numbers");
      spec.f20.push_back(c.get<double>());
    }
  }
  const auto errors = validate(spec);
  if (!errors.empty()) fail("invalid model: " + errors.front());
  return spec;
}

ClosedFormFamily parse_family(const ModelSpec & spec, const json & f)
{
  const std::string where = "family";
  switch (spec.tag) {
    case CaseTag::C11: {
      check_keys(f, where, {"c2", "c3", "t0"});
      return Case11Family{number_or(f, "c2", where, 0.0), number_or(f, "c3", where, 0.0),
                          number_or(f, "t0", where, 0.0)};
    }
    case CaseTag::C12: {
      check_keys(f, where, {"subcase", "c1", "k", "c3", "c4", "rate"});
      if (!f.contains("subcase")) fail("family.subcase is required for C12");
      const auto sub = parse_case12_subcase(text(f, "subcase", where));
      if (!sub) fail("unknown C12 subcase '" + text(f, "subcase", where) + "'");
      Case12Family fam;
      fam.subcase = *sub;
      fam.c1 = number_or(f, "c1", where, 0.0);
      fam.k = number_or(f, "k", where, 0.0);
      fam.c3 = number_or(f, "c3", where, 0.0);
      fam.c4 = number_or(f, "c4", where, 0.0);
      fam.rate = number_or(f, "rate", where, 0.0);
      return fam;
    }
    case CaseTag::C211: {
      check_keys(f, where, {"coeffs", "t0"});
      if (!f.contains("coeffs")) fail("family.coeffs is required for C211");
      const auto & c = f.at("coeffs");
      if (!c.is_array() || c.size() != 4) fail("family.coeffs must have 4 entries");
      Case211Family fam;
      for (std::size_t i = 0; i < 4; ++i) {
        if (!c[i].is_number() || !std::isfinite(c[i].get<double>())) fail("family.coeffs entries must be finite numbers");
        fam.coeffs[i] = c[i].get<double>();
      }
      fam.t0 = number_or(f, "t0", where, 0.0);
      return fam;
    }
    case CaseTag::C212: {
      check_keys(f, where, {"subcase", "a", "b", "c", "d", "ctilde", "t0"});
      if (!f.contains("subcase")) fail("family.subcase is required for C212");
      const auto sub = parse_case212_subcase(text(f, "subcase", where));
      if (!sub) fail("unknown C212 subcase '" + text(f, "subcase", where) + "'");
      Case212Family fam;
      fam.subcase = *sub;
      fam.a = number_or(f, "a", where, 0.0);
      fam.b = number_or(f, "b", where, 0.0);
      fam.c = number_or(f, "c", where, 0.0);
      fam.d = number_or(f, "d", where, 0.0);
      fam.ctilde = number_or(f, "ctilde", where, 0.0);
      fam.t0 = number_or(f, "t0", where, 0.0);
      return fam;
    }
    default: fail("no closed form for " + std::string(to_string(spec.tag)));
  }
}

IntegratorConfig parse_integrator(const json & j)
{
  const std::string where = "integrator";
  check_keys(j, where, {"method", "step", "abs_tol", "rel_tol", "max_steps", "blow_up_norm", "domain_margin"});
  IntegratorConfig cfg;
  if (j.contains("method")) {
    const auto m = parse_method(text(j, "method", where));
    if (!m) fail("unknown integrator.method '" + text(j, "method", where) + "'");
    cfg.method = *m;
  }
  cfg.step = number_or(j, "step", where, cfg.step);
  cfg.abs_tol = number_or(j, "abs_tol", where, cfg.abs_tol);
  cfg.rel_tol = number_or(j, "rel_tol", where, cfg.rel_tol);
  if (j.contains("max_steps")) {
    if (!j.at("max_steps").is_number_integer()) fail("integrator.max_steps must be an integer");
    cfg.max_steps = j.at("max_steps").get<long long>();
  }
  cfg.blow_up_norm = number_or(j, "blow_up_norm", where, cfg.blow_up_norm);
  cfg.domain_margin = number_or(j, "domain_margin", where, cfg.domain_margin);
  try {
    validate_config(cfg);
  } catch (const InvalidArgument & e) {
    fail(e.what());
  }
  return cfg;
}

OutputConfig parse_output(const json & j)
{
  const std::string where = "output";
  check_keys(j, where, {"path", "format", "stride"});
  OutputConfig out;
  if (j.contains("path")) out.path = text(j, "path", where);
  if (j.contains("format")) {
    const auto f = parse_output_format(text(j, "format", where));
    if (!f) fail("output.format must be csv or json");
    out.format = *f;
  }
  if (j.contains("stride")) {
    if (!j.at("stride").is_number_integer()) fail("output.stride must be an integer");
    const auto s = j.at("stride").get<long long>();
    if (s < 1 || s > 1'000'000'000) fail("output.stride must be at least 1");
    out.stride = static_cast<int>(s);
  }
  return out;
}

SampleGrid parse_grid(const json & j)
{
  const std::string where = "grid";
  check_keys(j, where, {"t0", "t1", "step"});
  SampleGrid g;
  g.t0 = number_or(j, "t0", where, g.t0);
  g.t1 = number_or(j, "t1", where, g.t1);
  g.step = number_or(j, "step", where, g.step);
  if (!(g.step > 0.0)) fail("grid.step must be positive");
  if (!(g.t1 >= g.t0)) fail("grid.t1 must not precede grid.t0");
  return g;
}

}  // namespace

std::string_view to_string(OutputFormat f)
{
  return f == OutputFormat::csv ? "csv" : "json";
}

std::optional<OutputFormat> parse_output_format(std::string_view name)
{
  if (name == "csv") return OutputFormat::csv;
  if (name == "json") return OutputFormat::json;
  return std::nullopt;
}

std::vector<double> grid_times(const SampleGrid & grid)
{
  const double n = std::floor((grid.t1 - grid.t0) / grid.step + 1e-9);
  std::vector<double> t;
  for (long long i = 0; i <= static_cast<long long>(n); ++i) t.push_back(grid.t0 + static_cast<double>(i) * grid.step);
  return t;
}

RunConfig parse_run_config(std::string_view json_text)
{
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error & e) {
    fail(std::string("not valid JSON: ") + e.what());
  }
  check_keys(doc, "config", {"model", "initial", "family", "t_span", "grid", "integrator", "output"});
  if (!doc.contains("model")) fail("model is required");

  RunConfig cfg;
  try {
    cfg.model = parse_model(doc.at("model"));
    const int n = cfg.model.dim();
    if (doc.contains("initial")) {
      const auto & init = doc.at("initial");
      check_keys(init, "initial", {"x", "p"});
      if (!init.contains("x") || !init.contains("p")) fail("initial needs both x and p");
      PhasePoint pt{vector_of(init.at("x"), "initial.x", n), vector_of(init.at("p"), "initial.p", n)};
      if (!in_domain(cfg.model, pt.x)) fail("initial.x is outside the domain of " + std::string(to_string(cfg.model.tag)));
      cfg.initial = pt;
    }
    if (doc.contains("family")) {
      cfg.family = parse_family(cfg.model, doc.at("family"));
      try {
        validate_family(cfg.model, *cfg.family);
      } catch (const InvalidArgument & e) {
        fail(e.what());
      }
    }
    if (doc.contains("t_span")) {
      const Vec span = vector_of(doc.at("t_span"), "t_span", 2);
      if (!(span[1] > span[0])) fail("t_span must be increasing");
      cfg.t0 = span[0];
      cfg.t1 = span[1];
    }
    if (doc.contains("grid")) cfg.grid = parse_grid(doc.at("grid"));
    if (doc.contains("integrator")) cfg.integrator = parse_integrator(doc.at("integrator"));
    if (doc.contains("output")) cfg.output = parse_output(doc.at("output"));
  } catch (const json::exception & e) {
    fail(e.what());
  }
  return cfg;
}

RunConfig load_run_config(const std::string & path)
{
  std::ifstream in(path, std::ios::binary);
  if (!in) fail("cannot read '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_run_config(buf.str());
}

}  // namespace pag
