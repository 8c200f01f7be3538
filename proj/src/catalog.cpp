#include "pag/catalog.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numbers>
#include <string>

namespace pag {

std::uint64_t seed_from_env()
{
  const char * raw = std::getenv("PAG_SEED");
  if (raw == nullptr || *raw == '\0') return 42;
  try {
    std::size_t used = 0;
    const unsigned long long v = std::stoull(raw, &used);
    if (used != std::char_traits<char>::length(raw)) throw InvalidArgument("PAG_SEED must be an unsigned integer");
    return v;
  } catch (const std::logic_error &) {
    throw InvalidArgument("PAG_SEED must be an unsigned integer");
  }
}

ModelSpec default_spec(CaseTag tag)
{
  ModelSpec spec;
  spec.tag = tag;
  auto & p = spec.params;
  switch (tag) {
    case CaseTag::C11: p.c1 = 0.5; break;
    case CaseTag::C12:
      p.j0 = 0.5;
      p.g0 = 1.0;
      break;
    case CaseTag::C211:
      p.c2 = 1.0;
      p.c3 = 0.5;
      break;
    case CaseTag::C212:
      p.c1 = 1.0;
      p.c3 = 0.5;
      break;
    case CaseTag::C22:
      p.c1 = 0.5;
      p.g0 = 1.0;
      break;
    case CaseTag::C231:
      p.c1 = 0.5;
      p.c2 = 1.0;
      p.epsilon = 1.0;
      p.g0 = 1.0;
      break;
    case CaseTag::C232:
      p.c1 = 0.5;
      p.c3 = 0.2;
      p.c4 = 1.0;
      p.epsilon = 1.0;
      p.g0 = 1.0;
      break;
    case CaseTag::C233:
      p.c1 = 0.5;
      p.c3 = 1.0;
      p.c4 = -1.0;
      p.epsilon = -1.0;
      p.g0 = 1.0;
      break;
  }
  return spec;
}

SampleBox default_box(const ModelSpec & spec)
{
  const int n = spec.dim();
  SampleBox box{Vec::Constant(n, -1.0), Vec::Constant(n, 1.0)};
  switch (spec.tag) {
    case CaseTag::C22:
      box.lo[1] = 0.5;
      box.hi[1] = 1.5;
      break;
    case CaseTag::C232: {
      // Keep c3 x1 well inside (-pi/2, pi/2).
      const double half = std::min(1.0, (std::numbers::pi / 2.0 - 0.2) / std::abs(spec.params.c3));
      box.lo[0] = -half;
      box.hi[0] = half;
      break;
    }
    default: break;
  }
  return box;
}

std::vector<StateVec> sample_points(const ModelSpec & spec, std::size_t count, Rng & rng, double margin)
{
  const auto box = default_box(spec);
  const int n = spec.dim();
  std::vector<StateVec> out;
  out.reserve(count);
  std::size_t attempts = 0;
  const std::size_t limit = 1000 * (count + 1);
  while (out.size() < count) {
    if (++attempts > limit) throw DomainError("sample_points: default box has no admissible points");
    StateVec x(n);
    for (int i = 0; i < n; ++i) x[i] = rng.uniform(box.lo[i], box.hi[i]);
    if (in_domain(spec, x) && singular_margin(spec, x) >= margin) out.push_back(x);
  }
  return out;
}

std::vector<PhasePoint> sample_phase_points(const ModelSpec & spec, std::size_t count, Rng & rng, double margin)
{
  const int n = spec.dim();
  std::vector<PhasePoint> out;
  out.reserve(count);
  for (const auto & x : sample_points(spec, count, rng, margin)) {
    Covector p(n);
    for (int i = 0; i < n; ++i) p[i] = rng.uniform(-1.0, 1.0);
    out.push_back({x, p});
  }
  return out;
}

PhasePoint default_phase_point(const ModelSpec & spec)
{
  switch (spec.tag) {
    case CaseTag::C11: return {make_vec({0.0, 0.0}), make_vec({0.3, 0.5})};
    case CaseTag::C12: return {make_vec({0.0, 1.0}), make_vec({0.2, 0.1})};
    case CaseTag::C211: return {make_vec({0.0, 0.5, -0.2}), make_vec({0.1, 0.2, -0.3})};
    case CaseTag::C212: return {make_vec({0.0, 0.0, 1.0}), make_vec({0.0, 0.1, 0.2})};
    case CaseTag::C22: return {make_vec({0.0, 1.0, -2.0}), make_vec({0.05, -0.1, -0.05})};
    case CaseTag::C231: return {make_vec({0.1, 0.0, 0.2}), make_vec({0.1, 0.2, 0.1})};
    case CaseTag::C232: return {make_vec({-0.5, 0.0, 0.3}), make_vec({0.1, 0.1, 0.1})};
    case CaseTag::C233: return {make_vec({0.0, 0.0, 0.5}), make_vec({0.1, 0.1, 0.1})};
  }
  throw InvalidArgument("default_phase_point: unknown case");
}

}  // namespace pag
