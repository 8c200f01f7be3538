#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "pag/models.hpp"
#include "pag/pmp.hpp"

namespace pag {

/// Seeded uniform source. Doubles are built from the top 53 bits so sequences are
/// identical across standard library implementations.
class Rng
{
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
  std::mt19937_64 engine_;
};

/// PAG_SEED from the environment, or 42.
std::uint64_t seed_from_env();

/// The reference parameter set of each case, used by the check suites and the CLI.
ModelSpec default_spec(CaseTag tag);

/// Axis-aligned sampling box of a case.
struct SampleBox
{
  Vec lo;
  Vec hi;
};

SampleBox default_box(const ModelSpec & spec);

/// Rejection-samples `count` points of the default box that are in the domain and at
/// least `margin` away from the singular loci.
std::vector<StateVec> sample_points(const ModelSpec & spec, std::size_t count, Rng & rng, double margin = 0.1);

/// Same, with costates uniform in [-1, 1]^n.
std::vector<PhasePoint> sample_phase_points(const ModelSpec & spec, std::size_t count, Rng & rng,
                                            double margin = 0.1);

/// Start point for the conservation runs; its horizon-5 flow stays inside the domain.
PhasePoint default_phase_point(const ModelSpec & spec);

}  // namespace pag
