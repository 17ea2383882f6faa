#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ideoemb/eval.hpp"
#include "ideoemb/generator.hpp"
#include "ideoemb/trainer.hpp"

namespace ideoemb::cli {

// Runs the `ideoemb` command line. Returns the process exit code: 0 on
// success, 1 on a runtime failure, 2 on a usage error. Failures print a
// single "error: ..." line to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// One synthetic configuration: generate, hold out 10% of items, fit, score.
struct SyntheticCell {
  GraphSpec graph;
  double polarization = 4.0;
  std::size_t items = 1000;
};

struct SyntheticResult {
  SyntheticCell cell;
  std::vector<double> auc;  // one per replicate
  std::vector<double> ap;
  std::vector<double> truth_auc;  // same test pairs scored with the generating table
  double seconds = 0.0;           // total wall clock
};

// Replicate r uses seed + r for generation, splitting and training.
SyntheticResult run_synthetic_cell(const SyntheticCell& cell, const GenConfig& gen, const TrainConfig& train,
                                   std::size_t replicates, std::uint64_t seed, unsigned threads);

}  // namespace ideoemb::cli
