// Coarse-then-fine coordinate sweeps over DesignParams.
//
// Objective: |dBz/dz| at the effective null, lexicographically after
// feasibility. Constraints: null residual <= null_threshold, per-axis
// approach maxima <= compensable_limit, separation >= min_clearance.
// Candidates are evaluated concurrently and reduced in grid order, so the
// trace and incumbent do not depend on the worker count.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "halbach/analysis.hpp"
#include "halbach/design.hpp"
#include "halbach/errors.hpp"
#include "halbach/parallel.hpp"

namespace halbach {

enum class SweepParam { separation, axial_offset_upper, spacing, br_upper, rhombus_axial };

constexpr std::string_view to_string(SweepParam p) {
  switch (p) {
    case SweepParam::separation: return "separation";
    case SweepParam::axial_offset_upper: return "axial_offset_upper";
    case SweepParam::spacing: return "spacing";
    case SweepParam::br_upper: return "br_upper";
    case SweepParam::rhombus_axial: return "rhombus_diagonals.d_axial";
  }
  return "?";
}

inline double& param_ref(DesignParams& p, SweepParam which) {
  switch (which) {
    case SweepParam::separation: return p.separation;
    case SweepParam::axial_offset_upper: return p.axial_offset_upper;
    case SweepParam::spacing: return p.spacing;
    case SweepParam::br_upper: return p.br_upper;
    case SweepParam::rhombus_axial: return p.rhombus_diagonals.axial;
  }
  return p.separation;
}

inline double param_value(DesignParams p, SweepParam which) { return param_ref(p, which); }

struct SweepAxis {
  SweepParam param = SweepParam::separation;
  double lower = 0.0;
  double upper = 0.0;
  double coarse_step = 0.0;
  double fine_step = 0.0;
};

inline void validate(const SweepAxis& ax) {
  if (!(ax.lower <= ax.upper)) throw Error(ErrorKind::InvalidParams, "sweep axis needs lower <= upper");
  if (!(ax.coarse_step > 0.0) || !(ax.fine_step > 0.0))
    throw Error(ErrorKind::InvalidParams, "sweep steps must be positive");
  if (ax.fine_step > ax.coarse_step) throw Error(ErrorKind::InvalidParams, "fine step exceeds coarse step");
}

struct Objective {
  double null_threshold = 1e-4;     // 1 G
  double compensable_limit = 6e-3;  // 60 G
  double min_clearance = 1.0e-3;
  std::pair<double, double> null_window{0.05e-3, 6e-3};
  double approach_from_z = 10e-3;
  double scan_pitch = 10e-6;
};

inline void validate(const Objective& o) {
  if (!(o.null_threshold > 0 && o.compensable_limit > 0 && o.min_clearance > 0 && o.scan_pitch > 0))
    throw Error(ErrorKind::InvalidParams, "objective thresholds must be positive");
}

struct CandidateEval {
  DesignParams params;
  std::optional<NullReport> null;
  double gradient = 0.0;  // dBz/dz at the null, T/m
  ApproachOffsets approach;
  bool feasible = false;
  std::string reason;  // "ok" or the first violated constraint

  double objective() const { return std::abs(gradient); }
};

/// Builds the design and applies every constraint. Never throws for
/// builder or analysis failures; those become infeasible-with-reason.
inline CandidateEval evaluate_candidate(const DesignParams& params, const Objective& obj = {}) {
  CandidateEval ev;
  ev.params = params;
  try {
    validate(obj);
    if (params.separation < obj.min_clearance) {
      ev.reason = "clearance";
      return ev;
    }
    const Assembly a = build_dual_layer(params);
    NullSearchOptions nopt;
    nopt.scan_pitch = obj.scan_pitch;
    nopt.null_threshold = obj.null_threshold;
    const NullReport nr = find_null(a, params.ion_height, obj.null_window, nopt);
    ev.null = nr;
    ev.gradient = axial_gradient_at_null(a, nr);
    ev.approach = approach_offsets(a, params.ion_height, obj.approach_from_z, nr, obj.scan_pitch);
    if (!(nr.residual_mag <= obj.null_threshold))
      ev.reason = "residual";
    else if (std::max({ev.approach.max_bx, ev.approach.max_by, ev.approach.max_bz}) > obj.compensable_limit)
      ev.reason = "approach";
    else
      ev.reason = "ok";
    ev.feasible = ev.reason == "ok";
  } catch (const Error& e) {
    ev.feasible = false;
    ev.reason = std::string(to_string(e.kind()));
  }
  return ev;
}

using Evaluator = std::function<CandidateEval(const DesignParams&)>;

struct TraceEntry {
  CandidateEval eval;
  SweepParam param = SweepParam::separation;
  double value = 0.0;
  int round = 0;
  bool fine_stage = false;
};

struct SweepResult {
  std::vector<TraceEntry> trace;
  std::optional<std::size_t> incumbent;  // index into trace

  bool has_incumbent() const { return incumbent.has_value(); }
  const TraceEntry& best() const {
    if (!incumbent) throw Error(ErrorKind::NoFeasiblePoint, "no feasible candidate in the sweep");
    return trace[*incumbent];
  }
};

namespace detail {

/// `a` is strictly better than `b`: higher objective, then smaller value.
inline bool better(const TraceEntry& a, const TraceEntry& b) {
  if (a.eval.objective() != b.eval.objective()) return a.eval.objective() > b.eval.objective();
  return a.value < b.value;
}

inline std::vector<double> grid(double lo, double hi, double step) {
  std::vector<double> out;
  const double eps = 1e-9 * step;
  for (std::size_t i = 0;; ++i) {
    const double v = lo + static_cast<double>(i) * step;
    if (v > hi + eps) break;
    out.push_back(std::min(v, hi));
  }
  if (out.back() < hi - eps) out.push_back(hi);
  return out;
}

/// Evaluation memo shared across the stages of one search so an identical
/// parameter set is never evaluated twice.
class EvalCache {
 public:
  explicit EvalCache(Evaluator eval) : eval_(std::move(eval)) {}

  std::vector<CandidateEval> evaluate(const std::vector<DesignParams>& ps) {
    std::vector<std::optional<CandidateEval>> found(ps.size());
    std::vector<std::size_t> missing;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      if (const auto* hit = lookup(ps[i]))
        found[i] = *hit;
      else
        missing.push_back(i);
    }
    const auto fresh = parallel_map(missing.size(), [&](std::size_t k) { return eval_(ps[missing[k]]); });
    for (std::size_t k = 0; k < missing.size(); ++k) {
      found[missing[k]] = fresh[k];
      memo_.push_back(fresh[k]);
    }
    std::vector<CandidateEval> out;
    out.reserve(ps.size());
    for (auto& f : found) out.push_back(std::move(*f));
    return out;
  }

 private:
  const CandidateEval* lookup(const DesignParams& p) const {
    for (const auto& e : memo_)
      if (e.params == p) return &e;
    return nullptr;
  }

  Evaluator eval_;
  std::vector<CandidateEval> memo_;
};

inline SweepResult sweep_1d_cached(const DesignParams& base, const SweepAxis& axis, EvalCache& cache, int round) {
  validate(axis);
  SweepResult res;
  auto run_stage = [&](const std::vector<double>& values, bool fine) {
    std::vector<DesignParams> ps;
    for (double v : values) {
      DesignParams p = base;
      param_ref(p, axis.param) = v;
      ps.push_back(p);
    }
    const auto evals = cache.evaluate(ps);
    for (std::size_t i = 0; i < values.size(); ++i) res.trace.push_back({evals[i], axis.param, values[i], round, fine});
  };
  auto pick = [&] {
    std::optional<std::size_t> best;
    for (std::size_t i = 0; i < res.trace.size(); ++i)
      if (res.trace[i].eval.feasible && (!best || better(res.trace[i], res.trace[*best]))) best = i;
    return best;
  };

  run_stage(grid(axis.lower, axis.upper, axis.coarse_step), false);
  if (const auto coarse_best = pick()) {
    const double c = res.trace[*coarse_best].value;
    std::vector<double> fine;
    const auto k = static_cast<long>(std::floor(axis.coarse_step / axis.fine_step + 1e-9));
    for (long j = -k; j <= k; ++j) {
      const double v = c + static_cast<double>(j) * axis.fine_step;
      if (v < axis.lower - 1e-12 || v > axis.upper + 1e-12) continue;
      bool dup = false;
      for (const auto& t : res.trace) dup = dup || std::abs(t.value - v) <= 1e-6 * axis.fine_step;
      if (!dup) fine.push_back(v);
    }
    run_stage(fine, true);
  }
  res.incumbent = pick();
  return res;
}

}  // namespace detail

/// One-parameter sweep: coarse grid over [lower, upper], then a fine grid
/// spanning +-1 coarse step around the best feasible coarse point.
inline SweepResult sweep_1d(const DesignParams& base, const SweepAxis& axis, Evaluator eval) {
  detail::EvalCache cache(std::move(eval));
  return detail::sweep_1d_cached(base, axis, cache, 0);
}

inline SweepResult sweep_1d(const DesignParams& base, const SweepAxis& axis, const Objective& obj = {}) {
  return sweep_1d(base, axis, [obj](const DesignParams& p) { return evaluate_candidate(p, obj); });
}

struct DescentOptions {
  int max_rounds = 4;
  double min_improvement = 0.005;  // relative, per full round
};

/// Repeats sweep_1d over the axes in order, carrying the incumbent forward,
/// until a round improves the objective by less than min_improvement.
/// Round 0 in the trace is the base evaluation.
inline SweepResult coordinate_descent(const DesignParams& base, const std::vector<SweepAxis>& axes, Evaluator eval,
                                      const DescentOptions& opt = {}) {
  if (axes.empty()) throw Error(ErrorKind::InvalidParams, "coordinate descent needs at least one axis");
  for (const auto& ax : axes) validate(ax);
  detail::EvalCache cache(std::move(eval));
  SweepResult res;
  const auto base_eval = cache.evaluate({base});
  res.trace.push_back({base_eval[0], axes.front().param, param_value(base, axes.front().param), 0, false});
  if (base_eval[0].feasible) res.incumbent = 0;

  DesignParams current = base;
  for (int round = 1; round <= opt.max_rounds; ++round) {
    const double before = res.incumbent ? res.trace[*res.incumbent].eval.objective() : -1.0;
    for (const auto& ax : axes) {
      SweepResult s = detail::sweep_1d_cached(current, ax, cache, round);
      const std::size_t offset = res.trace.size();
      for (auto& t : s.trace) res.trace.push_back(std::move(t));
      if (s.incumbent) {
        const std::size_t idx = offset + *s.incumbent;
        if (!res.incumbent || res.trace[idx].eval.objective() > res.trace[*res.incumbent].eval.objective()) {
          res.incumbent = idx;
          current = res.trace[idx].eval.params;
        }
      }
    }
    const double after = res.incumbent ? res.trace[*res.incumbent].eval.objective() : -1.0;
    if (before >= 0.0 && after - before < opt.min_improvement * before) break;
    if (before < 0.0 && after < 0.0) break;  // nothing feasible anywhere on these axes
  }
  return res;
}

inline SweepResult coordinate_descent(const DesignParams& base, const std::vector<SweepAxis>& axes,
                                      const Objective& obj = {}, const DescentOptions& opt = {}) {
  return coordinate_descent(base, axes, [obj](const DesignParams& p) { return evaluate_candidate(p, obj); }, opt);
}

/// The four axes swept by hand for the optimized design, in the same order:
/// vertical separation, relative axial offset, intra-array spacing, upper remanence.
inline std::vector<SweepAxis> default_descent_axes() {
  return {{SweepParam::separation, 1.5e-3, 3.5e-3, 0.25e-3, 0.05e-3},
          {SweepParam::axial_offset_upper, -0.5e-3, 0.5e-3, 0.1e-3, 0.02e-3},
          {SweepParam::spacing, 1.0e-3, 2.0e-3, 0.25e-3, 0.05e-3},
          {SweepParam::br_upper, 0.0, 1.0, 0.1, 0.02}};
}

}  // namespace halbach
