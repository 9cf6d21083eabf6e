#include "nclab/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include "nclab/stats.hpp"

namespace nclab {

CrossingReport detect_crossing(const RunRecord& record, double fn_star_ref,
                               std::size_t lead) {
    CrossingReport report;
    report.fn_star_ref = fn_star_ref;
    report.lead = lead;
    report.t_nc = record.t_nc;
    for (const auto& snap : record.snapshots) {
        if (snap.phase != 2) continue;
        if (snap.fn < fn_star_ref) {
            report.t_cross = snap.epoch;
            break;
        }
    }
    if (report.t_cross) {
        report.predicted_t_nc = *report.t_cross + lead;
        if (report.t_nc) {
            report.abs_error = std::fabs(static_cast<double>(*report.predicted_t_nc) -
                                         static_cast<double>(*report.t_nc));
        }
    }
    report.ordering_confirmed =
        report.t_cross && report.t_nc && *report.t_cross < *report.t_nc;
    return report;
}

PredictorSummary predictor_eval(
    const std::vector<std::vector<const RunRecord*>>& groups, std::size_t lead) {
    PredictorSummary summary;
    double gap_total = 0.0;
    double err_total = 0.0;
    std::size_t err_count = 0;
    for (const auto& group : groups) {
        std::vector<double> fn_values;
        for (const RunRecord* record : group) {
            if (record->fn_at_tnc) fn_values.push_back(*record->fn_at_tnc);
        }
        for (const RunRecord* record : group) {
            ++summary.n_runs;
            if (record->status != RunStatus::Collapsed) {
                summary.reports.push_back(
                    detect_crossing(*record, fn_values.empty()
                                                 ? 0.0
                                                 : mean_of(fn_values),
                                    lead));
                continue;
            }
            ++summary.n_collapsed;
            const double ref = mean_of(fn_values);
            CrossingReport report = detect_crossing(*record, ref, lead);
            if (report.ordering_confirmed) {
                ++summary.n_confirmed_ordering;
                gap_total += static_cast<double>(*report.t_nc) -
                             static_cast<double>(*report.t_cross);
            }
            if (report.abs_error) {
                err_total += *report.abs_error;
                ++err_count;
            }
            summary.reports.push_back(std::move(report));
        }
    }
    if (summary.n_collapsed == 0) {
        throw MetricError("predictor_eval: no collapsed runs in any group");
    }
    if (summary.n_confirmed_ordering > 0) {
        summary.mean_gap = gap_total / static_cast<double>(summary.n_confirmed_ordering);
    }
    if (err_count > 0) summary.mae = err_total / static_cast<double>(err_count);
    return summary;
}

void rescale_features(MlpModel& model, double alpha) {
    if (!(alpha > 0.0)) throw std::invalid_argument("rescale_features: alpha > 0");
    if (model.layers.size() < 2) {
        throw std::invalid_argument("rescale_features: model needs a hidden layer");
    }
    Layer& hidden = model.last_hidden();
    scale_inplace(hidden.w, alpha);
    for (double& b : hidden.b) b *= alpha;
}

namespace {

double measured_fn(const MlpModel& model, const Dataset& data, std::size_t batch_size) {
    FeatureAccumulator acc(data.k, model.config.width);
    BatchStream stream(data, batch_size);
    Batch batch;
    while (stream.next(batch)) {
        acc.add(forward(model, batch.x).features(), batch.y);
    }
    return acc.mean_norm();
}

}  // namespace

InterventionResult run_intervention(const ProtocolConfig& base, const Dataset& data,
                                    std::span<const double> alphas,
                                    std::span<const std::uint64_t> seeds,
                                    std::vector<MlpModel>* checkpoints) {
    if (alphas.empty() || seeds.empty()) {
        throw std::invalid_argument("run_intervention: alphas and seeds non-empty");
    }
    InterventionResult result;
    result.conditions.resize(alphas.size());
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        if (!(alphas[a] > 0.0)) {
            throw std::invalid_argument("run_intervention: alpha > 0");
        }
        result.conditions[a].alpha = alphas[a];
    }
    const auto control = std::find(alphas.begin(), alphas.end(), 1.0);
    result.control_index = control == alphas.end()
                               ? alphas.size()
                               : static_cast<std::size_t>(control - alphas.begin());

    std::vector<double> fn_after(alphas.size(), 0.0);
    for (std::uint64_t seed : seeds) {
        ProtocolConfig config = base;
        config.seed = seed;
        // Phase 1 once per seed; every condition resumes from this model.
        ProtocolConfig phase1_config = config;
        phase1_config.phase2_epochs = 0;
        MlpModel boundary_model;
        run_two_phase(phase1_config, data, &boundary_model);
        if (checkpoints) checkpoints->push_back(boundary_model);
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            MlpModel model = boundary_model;
            rescale_features(model, alphas[a]);
            fn_after[a] += measured_fn(model, data, config.batch_size);
            result.conditions[a].records.push_back(
                resume_phase2(std::move(model), config, data));
        }
    }
    for (std::size_t a = 0; a < alphas.size(); ++a) {
        result.conditions[a].fn_after_rescale =
            fn_after[a] / static_cast<double>(seeds.size());
    }

    if (result.control_index < alphas.size()) {
        std::vector<double> control_t_nc;
        for (const auto& r : result.conditions[result.control_index].records) {
            if (r.t_nc) control_t_nc.push_back(static_cast<double>(*r.t_nc));
        }
        for (std::size_t a = 0; a < alphas.size(); ++a) {
            if (a == result.control_index) continue;
            std::vector<double> t_nc;
            for (const auto& r : result.conditions[a].records) {
                if (r.t_nc) t_nc.push_back(static_cast<double>(*r.t_nc));
            }
            if (control_t_nc.size() >= 2 && t_nc.size() >= 2) {
                result.conditions[a].p_t_nc_vs_control =
                    t_test_two_sample(t_nc, control_t_nc).p;
            }
        }
    }
    return result;
}

}  // namespace nclab
