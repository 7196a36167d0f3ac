#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace graphacl {

struct GradCheckOptions {
  uint64_t seed = 0;
  int instances = 60;       // random problem instances (N <= 8, D <= 5, h <= 4)
  double tolerance = 1e-4;  // max allowed relative error
  // Base central-difference steps; comparisons over tolerance retry at h/4
  // and h/16 before failing, so step-local artifacts (truncation, activation
  // kinks) don't mask a clean gradient.
  double step = 1e-5;       // parameters
  double pair_step = 1e-4;  // adjacency-entry perturbations
  // Negative control: flips the sign of one analytic gradient so the suite
  // must fail.
  bool inject_bad_grad = false;
};

struct GradCheckEntry {
  std::string op;  // e.g. "dgi", "eq2", "pairs-surrogate"
  double max_rel_err = 0.0;
  int comparisons = 0;
  bool pass = true;
};

struct GradCheckReport {
  std::vector<GradCheckEntry> checks;  // one per (instance, family)
  double max_rel_err = 0.0;
  int instance_count = 0;
  int comparison_count = 0;
  double tolerance = 0.0;

  bool pass() const {
    for (const GradCheckEntry& c : checks)
      if (!c.pass) return false;
    return instance_count > 0;
  }
};

// Checks every shipped analytic gradient against central finite differences
// on random small instances: the MI estimator, DGI and both composite losses
// (encoder weights, PReLU slopes, discriminator), cross-entropy, and the
// factored adjacency-entry gradients of the composite, Eq.-18, and surrogate
// objectives chained through the degree normalization.
GradCheckReport run_gradcheck(const GradCheckOptions& opts = {});

}  // namespace graphacl
