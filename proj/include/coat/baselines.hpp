#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "coat/tuner.hpp"

namespace coat {

/// Unconstrained acquisition: argmax mu + sqrt(beta) sigma over the whole
/// grid, ties to the lowest flat index. Never consults the threshold.
std::int64_t gp_ucb_step(const Posterior& post, double beta);

/// Safe-set acquisition: candidates are potential maximizers (u >= best
/// certified lower bound inside the safe set) plus potential expanders
/// (points whose upper bound could certify something outside the safe set);
/// picks the widest interval among them, ties to the lowest flat index.
/// Always returns a member of `safe`.
std::int64_t safe_opt_step(const IndexMask& safe, const ConfidenceState& cs, double lipschitz,
                           double tau, const ParamGrid& g, const Metric& m);

/// Budget-driven GP-UCB loop under the shared protocol (first measurement
/// pinned to the first seed, recentered observations, identical records).
/// Recommends the best measured point.
std::pair<std::vector<RunRecord>, RunSummary> run_gp_ucb(const TunerConfig& cfg,
                                                          const ParamGrid& g, const Metric& m,
                                                          std::vector<std::int64_t> seed,
                                                          const Evaluator& eval);

/// Budget-driven SafeOpt-style loop: the safe set grows by one pessimistic
/// application per round and sampling stays inside it. Recommends the best
/// certified lower bound.
std::pair<std::vector<RunRecord>, RunSummary> run_safe_opt(const TunerConfig& cfg,
                                                            const ParamGrid& g, const Metric& m,
                                                            std::vector<std::int64_t> seed,
                                                            const Evaluator& eval);

}  // namespace coat
