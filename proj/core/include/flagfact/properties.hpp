#pragma once

// Seeded invariant suites for every module.  Each property draws its own
// sample stream from (seed, property index), so results do not depend on
// which other properties run.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "flagfact/sampling.hpp"

namespace flagfact {

struct SweepConfig {
  std::uint64_t seed = 42;
  std::size_t trials = 200;
  std::vector<int> dense_sizes{2, 3, 4, 8, 16};
  std::vector<int> loop_matdims{1, 2};
  std::vector<int> loop_grids{64, 256};
  /// Run only properties whose "module/name" contains one of these strings.
  std::vector<std::string> filter;
};

struct TrialContext {
  Sampler& sampler;
  std::size_t trial;
  const SweepConfig& config;

  int dense_size() const;
  int loop_matdim() const;
  int loop_grid() const;
};

struct Outcome {
  bool pass = true;
  double defect = 0.0;
  std::string note;
};

struct Property {
  std::string module;
  std::string name;
  /// Pass threshold on the reported defect, pinned per property.
  double threshold;
  std::function<Outcome(TrialContext&)> check;
};

struct PropertyResult {
  std::string module;
  std::string name;
  double threshold = 0.0;
  std::size_t trials = 0;
  std::size_t failures = 0;
  double worst_defect = 0.0;
  /// Trial index and note of the first failure, empty when none.
  std::string first_failure;
};

const std::vector<Property>& all_properties();

std::vector<PropertyResult> run_properties(const SweepConfig& config);

}  // namespace flagfact
