#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nclab/protocol.hpp"

namespace nclab {

/// Default epochs between the feature-norm crossing and collapse used by the
/// simple predictor rule predicted_T_NC = T_cross + lead.
inline constexpr std::size_t kDefaultCrossingLead = 62;

struct CrossingReport {
    double fn_star_ref = 0.0;
    std::optional<std::size_t> t_cross;       // first Phase-2 epoch with fn < ref
    std::optional<std::size_t> t_nc;
    std::size_t lead = kDefaultCrossingLead;
    std::optional<std::size_t> predicted_t_nc;  // t_cross + lead
    std::optional<double> abs_error;            // |predicted - t_nc|
    bool ordering_confirmed = false;            // t_cross < t_nc, both present
};

CrossingReport detect_crossing(const RunRecord& record, double fn_star_ref,
                               std::size_t lead = kDefaultCrossingLead);

struct PredictorSummary {
    std::size_t n_runs = 0;
    std::size_t n_collapsed = 0;
    std::size_t n_confirmed_ordering = 0;
    double mean_gap = 0.0;  // mean of T_NC - T_cross over confirmed runs
    double mae = 0.0;       // of T_cross + lead vs T_NC over collapsed runs with a crossing
    std::vector<CrossingReport> reports;  // in input order, group by group
};

/// Evaluates the crossing rule per group: each group's fn_star_ref is the
/// mean fn at T_NC over that group's collapsed runs (the cohort convention).
/// Throws MetricError when no group has a collapsed run.
PredictorSummary predictor_eval(
    const std::vector<std::vector<const RunRecord*>>& groups,
    std::size_t lead = kDefaultCrossingLead);

/// Multiplies the final hidden layer's weights and biases by alpha. Under
/// ReLU this rescales every penultimate feature row by exactly alpha.
void rescale_features(MlpModel& model, double alpha);

struct InterventionCondition {
    double alpha = 1.0;
    double fn_after_rescale = 0.0;  // mean over seeds, measured before any step
    std::vector<RunRecord> records;
    std::optional<double> p_t_nc_vs_control;  // Welch two-sided, absent for control
};

struct InterventionResult {
    std::vector<InterventionCondition> conditions;  // in alphas order
    std::size_t control_index = 0;                  // condition with alpha == 1.0
};

/// For every seed: train Phase 1 once, then launch one Phase-2 run per alpha
/// from that same checkpoint after rescaling. Conditions differ only in
/// alpha. If checkpoints is non-null it receives the per-seed phase-1 models.
InterventionResult run_intervention(const ProtocolConfig& base, const Dataset& data,
                                    std::span<const double> alphas,
                                    std::span<const std::uint64_t> seeds,
                                    std::vector<MlpModel>* checkpoints = nullptr);

}  // namespace nclab
