#pragma once

#include <optional>
#include <string_view>
#include <utility>

#include "sagabb/grad_memory.hpp"

namespace sagabb {

enum class Variant {
  constant,
  unstable_bb1,
  unstable_bb2,
  unstable_als,
  unstable_yk,
  stable_bb1,
  stable_bb2,
  stable_als,
  stable_yk,
};

inline constexpr Variant kAdaptiveVariants[] = {
    Variant::unstable_bb1, Variant::unstable_bb2, Variant::unstable_als, Variant::unstable_yk,
    Variant::stable_bb1,   Variant::stable_bb2,   Variant::stable_als,   Variant::stable_yk,
};

// CLI names: constant, bb1, bb2, als, yk, stable-bb1, stable-bb2, stable-als, stable-yk.
std::string_view to_string(Variant v);
Variant parse_variant(std::string_view s);

bool is_stable(Variant v);
// Variants whose update consumes s itself (sTs or ||s||), i.e. need stored points.
bool needs_displacement(Variant v);

// alpha = 2 (stable BB2), sqrt(m/2) (stable ALS/YK), m (stable BB1), 1 otherwise.
double default_alpha(Variant v, long m);

struct StepSizeConfig {
  Variant variant = Variant::stable_bb2;
  double alpha = 2.0;
  long m = 1;  // update frequency in iterations
  double eta0 = 1.0;
  std::optional<std::pair<double, double>> clamp;

  void validate() const;
};

// Window accumulators since the last update plus the current step-size.
struct StepSizeState {
  double acc_sTs = 0.0;
  double acc_sTy = 0.0;
  double acc_yTy = 0.0;
  double acc_snorm = 0.0;
  double acc_ynorm = 0.0;
  double ratio_sum_bb1 = 0.0;
  double ratio_sum_bb2 = 0.0;
  double ratio_sum_als = 0.0;
  long count_bb1 = 0;
  long count_bb2 = 0;
  long count_als = 0;
  long count = 0;  // pairs recorded this window
  double eta = 1.0;
  double eta_prev = 1.0;
  double theta = 0.0;  // eta / eta_prev at the last update; 0 before the first

  void reset_window();
};

// Per-iteration ratios with |denominator| below this are skipped.
inline constexpr double kDegenerateDenominator = 1e-300;

void record(StepSizeState& state, const CurvaturePair& pair);

// Candidate for the current window, before fallback and clamping. nullopt for
// degenerate windows (sum sTy <= 0, sum ||y|| = 0, no usable ratios).
std::optional<double> candidate(const StepSizeState& state, const StepSizeConfig& cfg);

// Every m-th iteration (k % m == 0) replaces eta with the window candidate
// (kept unchanged when degenerate), clamps it, updates theta and resets the
// window. Returns the step-size to use at iteration k.
double maybe_update(StepSizeState& state, const StepSizeConfig& cfg, long k);

class StepSizeController {
 public:
  explicit StepSizeController(const StepSizeConfig& cfg);

  void record(const CurvaturePair& pair) { sagabb::record(state_, pair); }
  double maybe_update(long k) { return sagabb::maybe_update(state_, cfg_, k); }

  double eta() const { return state_.eta; }
  const StepSizeState& state() const { return state_; }
  const StepSizeConfig& config() const { return cfg_; }

 private:
  StepSizeConfig cfg_;
  StepSizeState state_;
};

}  // namespace sagabb
