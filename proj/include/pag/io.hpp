#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pag/integrate.hpp"

namespace pag {

/// Shortest-safe text for a double: 17 significant digits.
std::string format_double(double v);

/// t, x1.., p1.., u, H, then one column per further integral (complex ones as NAME_re, NAME_im).
std::vector<std::string> trajectory_columns(const ModelSpec & spec, const Trajectory & traj);

/// Rows 0, stride, 2 stride, ... of the trajectory. LF line endings.
void write_trajectory_csv(std::ostream & out, const ModelSpec & spec, const Trajectory & traj, int stride = 1);

/// Same rows as a JSON document carrying the case, stop reason and the logged integrals.
void write_trajectory_json(std::ostream & out, const ModelSpec & spec, const Trajectory & traj, int stride = 1);

/// State samples without costates: t, x1, x2[, x3].
void write_samples_csv(std::ostream & out, int dim, const std::vector<double> & times,
                       const std::vector<StateVec> & states);
void write_samples_json(std::ostream & out, const ModelSpec & spec, const std::vector<double> & times,
                        const std::vector<StateVec> & states);

struct CsvTable
{
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;

  /// Index of a column; throws InvalidArgument if absent.
  std::size_t column(const std::string & name) const;
};

/// Parses a numeric CSV with one header line. Throws InvalidArgument on ragged or non-numeric rows.
CsvTable read_csv(std::istream & in);

struct StoredTrajectory
{
  CaseTag tag = CaseTag::C11;
  Trajectory traj;
};

/// Inverse of write_trajectory_json (stride 1 restores the trajectory bit for bit).
StoredTrajectory read_trajectory_json(std::istream & in);

}  // namespace pag
