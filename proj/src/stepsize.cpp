#include "sagabb/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sagabb {

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::constant: return "constant";
    case Variant::unstable_bb1: return "bb1";
    case Variant::unstable_bb2: return "bb2";
    case Variant::unstable_als: return "als";
    case Variant::unstable_yk: return "yk";
    case Variant::stable_bb1: return "stable-bb1";
    case Variant::stable_bb2: return "stable-bb2";
    case Variant::stable_als: return "stable-als";
    case Variant::stable_yk: return "stable-yk";
  }
  return "?";
}

Variant parse_variant(std::string_view s) {
  for (auto v : {Variant::constant, Variant::unstable_bb1, Variant::unstable_bb2, Variant::unstable_als,
                 Variant::unstable_yk, Variant::stable_bb1, Variant::stable_bb2, Variant::stable_als,
                 Variant::stable_yk}) {
    if (to_string(v) == s) return v;
  }
  throw Error(Errc::invalid_argument, "unknown step-size variant '" + std::string(s) + "'");
}

bool is_stable(Variant v) {
  return v == Variant::stable_bb1 || v == Variant::stable_bb2 || v == Variant::stable_als ||
         v == Variant::stable_yk;
}

bool needs_displacement(Variant v) {
  return v != Variant::constant && v != Variant::stable_bb2 && v != Variant::unstable_bb2;
}

double default_alpha(Variant v, long m) {
  if (m < 1) throw Error(Errc::invalid_argument, "update frequency must be >= 1");
  switch (v) {
    case Variant::stable_bb2: return 2.0;
    case Variant::stable_als:
    case Variant::stable_yk: return std::sqrt(static_cast<double>(m) / 2.0);
    case Variant::stable_bb1: return static_cast<double>(m);
    default: return 1.0;
  }
}

void StepSizeConfig::validate() const {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw Error(Errc::invalid_argument, "alpha must be positive");
  if (m < 1) throw Error(Errc::invalid_argument, "update frequency must be >= 1");
  if (!(eta0 > 0.0) || !std::isfinite(eta0)) throw Error(Errc::invalid_argument, "eta0 must be positive");
  if (clamp) {
    auto [lo, hi] = *clamp;
    if (!(lo > 0.0) || !(hi >= lo) || !std::isfinite(hi)) {
      throw Error(Errc::invalid_argument, "clamp bounds must be positive and ordered");
    }
  }
}

void StepSizeState::reset_window() {
  acc_sTs = acc_sTy = acc_yTy = acc_snorm = acc_ynorm = 0.0;
  ratio_sum_bb1 = ratio_sum_bb2 = ratio_sum_als = 0.0;
  count_bb1 = count_bb2 = count_als = count = 0;
}

void record(StepSizeState& st, const CurvaturePair& pair) {
  ++st.count;
  st.acc_yTy += pair.yTy;
  st.acc_ynorm += pair.y_norm;
  if (pair.sTs) st.acc_sTs += *pair.sTs;
  if (pair.sTy) st.acc_sTy += *pair.sTy;
  if (pair.s_norm) st.acc_snorm += *pair.s_norm;

  if (pair.sTs && pair.sTy && std::abs(*pair.sTy) >= kDegenerateDenominator) {
    st.ratio_sum_bb1 += *pair.sTs / *pair.sTy;
    ++st.count_bb1;
  }
  if (pair.sTy && std::abs(pair.yTy) >= kDegenerateDenominator) {
    st.ratio_sum_bb2 += *pair.sTy / pair.yTy;
    ++st.count_bb2;
  }
  if (pair.s_norm && std::abs(pair.y_norm) >= kDegenerateDenominator) {
    st.ratio_sum_als += *pair.s_norm / pair.y_norm;
    ++st.count_als;
  }
}

namespace {

std::optional<double> mean_ratio(double sum, long count, double alpha) {
  if (count == 0) return std::nullopt;
  return sum / static_cast<double>(count) / alpha;
}

std::optional<double> yk_cap(const StepSizeState& st, std::optional<double> c) {
  if (!c) return c;
  return std::min(std::sqrt(1.0 + st.theta) * st.eta, *c);
}

}  // namespace

std::optional<double> candidate(const StepSizeState& st, const StepSizeConfig& cfg) {
  const double a = cfg.alpha;
  switch (cfg.variant) {
    case Variant::constant: return std::nullopt;
    case Variant::stable_bb1:
      if (!(st.acc_sTy > 0.0)) return std::nullopt;
      return st.acc_sTs / (a * st.acc_sTy);
    case Variant::stable_bb2:
      if (!(st.acc_sTy > 0.0) || !(st.acc_yTy > 0.0)) return std::nullopt;
      return st.acc_sTy / (a * st.acc_yTy);
    case Variant::stable_als:
      if (!(st.acc_ynorm > 0.0)) return std::nullopt;
      return st.acc_snorm / (a * st.acc_ynorm);
    case Variant::stable_yk:
      if (!(st.acc_ynorm > 0.0)) return std::nullopt;
      return yk_cap(st, st.acc_snorm / (a * st.acc_ynorm));
    case Variant::unstable_bb1: return mean_ratio(st.ratio_sum_bb1, st.count_bb1, a);
    case Variant::unstable_bb2: return mean_ratio(st.ratio_sum_bb2, st.count_bb2, a);
    case Variant::unstable_als: return mean_ratio(st.ratio_sum_als, st.count_als, a);
    case Variant::unstable_yk: return yk_cap(st, mean_ratio(st.ratio_sum_als, st.count_als, a));
  }
  return std::nullopt;
}

double maybe_update(StepSizeState& st, const StepSizeConfig& cfg, long k) {
  if (cfg.variant == Variant::constant || k % cfg.m != 0) return st.eta;
  const double old = st.eta;
  double next = old;
  if (auto c = candidate(st, cfg); c && *c > 0.0 && std::isfinite(*c)) next = *c;
  if (cfg.clamp) next = std::clamp(next, cfg.clamp->first, cfg.clamp->second);
  st.eta_prev = old;
  st.eta = next;
  st.theta = next / old;
  st.reset_window();
  return st.eta;
}

StepSizeController::StepSizeController(const StepSizeConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  state_.eta = cfg_.clamp ? std::clamp(cfg_.eta0, cfg_.clamp->first, cfg_.clamp->second) : cfg_.eta0;
  state_.eta_prev = state_.eta;
}

}  // namespace sagabb
