#include "pag/io.hpp"

#include <charconv>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace pag {

namespace {

using nlohmann::json;

std::vector<std::size_t> selected_rows(std::size_t n, int stride)
{
  if (stride < 1) throw InvalidArgument("output: stride must be at least 1");
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < n; i += static_cast<std::size_t>(stride)) rows.push_back(i);
  return rows;
}

std::vector<double> as_vector(const Vec & v)
{
  return {v.data(), v.data() + v.size()};
}

Vec from_json_vector(const json & j, int dim)
{
  if (!j.is_array() || static_cast<int>(j.size()) != dim) throw InvalidArgument("trajectory json: bad vector size");
  Vec v(dim);
  for (int i = 0; i < dim; ++i) v[i] = j[i].get<double>();
  return v;
}

double parse_number(const std::string & cell)
{
  double v = 0.0;
  const char * first = cell.data();
  const char * last = cell.data() + cell.size();
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last) throw InvalidArgument("csv: not a number: '" + cell + "'");
  return v;
}

std::vector<std::string> split(const std::string & line)
{
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::string format_double(double v)
{
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<std::string> trajectory_columns(const ModelSpec & spec, const Trajectory & traj)
{
  const int n = spec.dim();
  std::vector<std::string> cols{"t"};
  for (int i = 1; i <= n; ++i) cols.push_back("x" + std::to_string(i));
  for (int i = 1; i <= n; ++i) cols.push_back("p" + std::to_string(i));
  cols.emplace_back("u");
  if (traj.integral_log.empty()) return cols;
  const auto & first = traj.integral_log.front();
  for (std::size_t k = 0; k < first.size(); ++k) {
    const auto & e = first[k];
    if (e.complex_valued) {
      cols.push_back(e.name + "_re");
      cols.push_back(e.name + "_im");
    } else {
      cols.push_back(e.name);
    }
  }
  return cols;
}

void write_trajectory_csv(std::ostream & out, const ModelSpec & spec, const Trajectory & traj, int stride)
{
  const auto cols = trajectory_columns(spec, traj);
  for (std::size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
  out << '\n';
  for (std::size_t r : selected_rows(traj.size(), stride)) {
    out << format_double(traj.times[r]);
    for (Eigen::Index i = 0; i < traj.states[r].size(); ++i) out << ',' << format_double(traj.states[r][i]);
    for (Eigen::Index i = 0; i < traj.costates[r].size(); ++i) out << ',' << format_double(traj.costates[r][i]);
    out << ',' << format_double(traj.controls[r]);
    const auto & set = traj.integral_log[r];
    for (std::size_t k = 0; k < set.size(); ++k) {
      out << ',' << format_double(set[k].value.real());
      if (set[k].complex_valued) out << ',' << format_double(set[k].value.imag());
    }
    out << '\n';
  }
}

void write_trajectory_json(std::ostream & out, const ModelSpec & spec, const Trajectory & traj, int stride)
{
  json doc;
  doc["case"] = std::string(to_string(spec.tag));
  doc["stop_reason"] = std::string(to_string(traj.stop_reason));
  json names = json::array();
  json complex_flags = json::array();
  if (!traj.integral_log.empty()) {
    for (const auto & e : traj.integral_log.front().entries) {
      names.push_back(e.name);
      complex_flags.push_back(e.complex_valued);
    }
  }
  doc["integral_names"] = names;
  doc["integral_complex"] = complex_flags;
  json times = json::array(), states = json::array(), costates = json::array(), controls = json::array();
  json integrals = json::array();
  for (std::size_t r : selected_rows(traj.size(), stride)) {
    times.push_back(traj.times[r]);
    states.push_back(as_vector(traj.states[r]));
    costates.push_back(as_vector(traj.costates[r]));
    controls.push_back(traj.controls[r]);
    json row = json::array();
    for (const auto & e : traj.integral_log[r].entries) row.push_back({e.value.real(), e.value.imag()});
    integrals.push_back(row);
  }
  doc["times"] = times;
  doc["states"] = states;
  doc["costates"] = costates;
  doc["controls"] = controls;
  doc["integrals"] = integrals;
  out << doc.dump(1) << '\n';
}

void write_samples_csv(std::ostream & out, int dim, const std::vector<double> & times,
                       const std::vector<StateVec> & states)
{
  out << 't';
  for (int i = 1; i <= dim; ++i) out << ",x" << i;
  out << '\n';
  for (std::size_t r = 0; r < times.size(); ++r) {
    out << format_double(times[r]);
    for (Eigen::Index i = 0; i < states[r].size(); ++i) out << ',' << format_double(states[r][i]);
    out << '\n';
  }
}

void write_samples_json(std::ostream & out, const ModelSpec & spec, const std::vector<double> & times,
                        const std::vector<StateVec> & states)
{
  json doc;
  doc["case"] = std::string(to_string(spec.tag));
  doc["times"] = times;
  json rows = json::array();
  for (const auto & x : states) rows.push_back(as_vector(x));
  doc["states"] = rows;
  out << doc.dump(1) << '\n';
}

std::size_t CsvTable::column(const std::string & name) const
{
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return i;
  }
  throw InvalidArgument("csv: no column '" + name + "'");
}

CsvTable read_csv(std::istream & in)
{
  CsvTable table;
  std::string line;
  if (!std::getline(in, line)) throw InvalidArgument("csv: missing header");
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != table.header.size()) throw InvalidArgument("csv: ragged row");
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto & c : cells) row.push_back(parse_number(c));
    table.rows.push_back(std::move(row));
  }
  return table;
}

StoredTrajectory read_trajectory_json(std::istream & in)
{
  StoredTrajectory out;
  try {
    const json doc = json::parse(in);
    const auto tag = parse_case(doc.at("case").get<std::string>());
    if (!tag) throw InvalidArgument("trajectory json: unknown case");
    out.tag = *tag;
    const auto reason = parse_stop_reason(doc.at("stop_reason").get<std::string>());
    if (!reason) throw InvalidArgument("trajectory json: unknown stop reason");
    auto & traj = out.traj;
    traj.stop_reason = *reason;
    const int n = case_dim(*tag);
    const auto names = doc.at("integral_names").get<std::vector<std::string>>();
    const auto flags = doc.at("integral_complex").get<std::vector<bool>>();
    if (names.size() != flags.size()) throw InvalidArgument("trajectory json: integral header mismatch");
    traj.times = doc.at("times").get<std::vector<double>>();
    const auto & states = doc.at("states");
    const auto & costates = doc.at("costates");
    const auto & integrals = doc.at("integrals");
    traj.controls = doc.at("controls").get<std::vector<double>>();
    const std::size_t m = traj.times.size();
    if (states.size() != m || costates.size() != m || traj.controls.size() != m || integrals.size() != m) {
      throw InvalidArgument("trajectory json: column lengths differ");
    }
    for (std::size_t r = 0; r < m; ++r) {
      traj.states.push_back(from_json_vector(states[r], n));
      traj.costates.push_back(from_json_vector(costates[r], n));
      const auto & row = integrals[r];
      if (row.size() != names.size()) throw InvalidArgument("trajectory json: integral row size");
      FirstIntegralSet set;
      for (std::size_t k = 0; k < names.size(); ++k) {
        set.entries.push_back({names[k], {row[k][0].get<double>(), row[k][1].get<double>()}, flags[k]});
      }
      traj.integral_log.push_back(std::move(set));
    }
  } catch (const json::exception & e) {
    throw InvalidArgument(std::string("trajectory json: ") + e.what());
  }
  return out;
}

}  // namespace pag
