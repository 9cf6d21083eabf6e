#include "nclab/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <thread>

#include "nclab/stats.hpp"

namespace nclab {

std::string to_string(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::Depth: return "depth";
        case SweepAxis::Width: return "width";
        case SweepAxis::WeightDecay: return "wd";
        case SweepAxis::Activation: return "activation";
    }
    return "?";
}

SweepAxis sweep_axis_from_string(const std::string& name) {
    if (name == "depth") return SweepAxis::Depth;
    if (name == "width") return SweepAxis::Width;
    if (name == "wd" || name == "weight_decay") return SweepAxis::WeightDecay;
    if (name == "activation") return SweepAxis::Activation;
    throw DataError("unknown sweep axis: " + name);
}

namespace {

std::size_t parse_count(const std::string& value, const char* what) {
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc{} || ptr != value.data() + value.size() || out == 0) {
        throw DataError(std::string(what) + ": bad value '" + value + "'");
    }
    return out;
}

double parse_nonneg(const std::string& value, const char* what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(value, &used);
        if (used != value.size() || !(v >= 0.0)) throw DataError("");
        return v;
    } catch (...) {
        throw DataError(std::string(what) + ": bad value '" + value + "'");
    }
}

}  // namespace

void SweepSpec::validate() const {
    if (values.empty()) throw DataError("sweep: values must be non-empty");
    if (seeds.empty()) throw DataError("sweep: seeds must be non-empty");
    for (const auto& v : values) {
        apply_axis(base, axis, v);  // type-checks each value
    }
}

ExperimentManifest apply_axis(const ExperimentManifest& base, SweepAxis axis,
                              const std::string& value) {
    ExperimentManifest m = base;
    switch (axis) {
        case SweepAxis::Depth:
            m.protocol.model.depth = parse_count(value, "depth");
            break;
        case SweepAxis::Width:
            m.protocol.model.width = parse_count(value, "width");
            break;
        case SweepAxis::WeightDecay:
            m.protocol.optimizer.set_weight_decay(parse_nonneg(value, "wd"));
            break;
        case SweepAxis::Activation:
            m.protocol.model.activation = activation_from_string(value);
            break;
    }
    return m;
}

SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                       const std::filesystem::path& data_dir) {
    spec.validate();
    SweepOutcome outcome;
    for (const auto& value : spec.values) {
        for (std::uint64_t seed : spec.seeds) {
            SweepRun run;
            run.value = value;
            run.condition = to_string(spec.axis) + "=" + value;
            run.seed = seed;
            run.dir = out_dir / (to_string(spec.axis) + "_" + value) /
                      ("seed_" + std::to_string(seed));
            outcome.runs.push_back(std::move(run));
        }
    }

    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
        while (true) {
            const std::size_t idx = next.fetch_add(1);
            if (idx >= outcome.runs.size()) return;
            SweepRun& run = outcome.runs[idx];
            try {
                ExperimentManifest manifest = apply_axis(spec.base, spec.axis, run.value);
                manifest.experiment = run.condition + "/seed_" + std::to_string(run.seed);
                manifest.protocol.seed = run.seed;
                MlpModel phase1_model;
                run.record = execute_manifest(manifest, data_dir, &phase1_model);
                manifest.dataset_hash =
                    dataset_content_hash(manifest.dataset.realize(data_dir));
                write_run_dir(RunPaths{run.dir}, manifest, run.record,
                              manifest.mode == RunMode::TwoPhase ? &phase1_model
                                                                 : nullptr,
                              spec.force);
            } catch (const std::exception& e) {
                run.failed = true;
                run.error = e.what();
            }
        }
    };

    const std::size_t n_workers =
        std::max<std::size_t>(1, std::min(spec.workers, outcome.runs.size()));
    if (n_workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }

    for (const auto& value : spec.values) {
        SweepAggregateRow row;
        row.condition = to_string(spec.axis) + "=" + value;
        std::vector<double> t_nc, fn;
        for (const auto& run : outcome.runs) {
            if (run.value != value) continue;
            ++row.n;
            if (run.failed) {
                ++row.n_failed;
                continue;
            }
            row.nc1_threshold = run.record.config.nc1_threshold;
            switch (run.record.status) {
                case RunStatus::Collapsed:
                    ++row.n_collapsed;
                    t_nc.push_back(static_cast<double>(*run.record.t_nc));
                    fn.push_back(*run.record.fn_at_tnc);
                    break;
                case RunStatus::DNF: ++row.n_dnf; break;
                case RunStatus::Diverged: ++row.n_diverged; break;
            }
        }
        if (!t_nc.empty()) {
            row.t_nc_mean = mean_of(t_nc);
            row.fn_mean = mean_of(fn);
            row.t_nc_std = t_nc.size() >= 2 ? sample_std(t_nc) : 0.0;
            row.fn_std = fn.size() >= 2 ? sample_std(fn) : 0.0;
        } else {
            row.t_nc_mean = row.t_nc_std = row.fn_mean = row.fn_std = std::nan("");
        }
        outcome.rows.push_back(std::move(row));
    }
    return outcome;
}

std::string aggregate_csv(const SweepOutcome& outcome) {
    std::string out =
        "condition,n,nc1_threshold,t_nc_mean,t_nc_std,fn_at_tnc_mean,fn_at_tnc_std,"
        "collapsed,dnf,diverged,failed\n";
    auto fmt = [](double v) {
        if (std::isnan(v)) return std::string();
        char buf[40];
        auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
        (void)ec;
        return std::string(buf, ptr);
    };
    for (const auto& row : outcome.rows) {
        out += row.condition;
        out += ',' + std::to_string(row.n);
        out += ',' + fmt(row.nc1_threshold);
        out += ',' + fmt(row.t_nc_mean);
        out += ',' + fmt(row.t_nc_std);
        out += ',' + fmt(row.fn_mean);
        out += ',' + fmt(row.fn_std);
        out += ',' + std::to_string(row.n_collapsed);
        out += ',' + std::to_string(row.n_dnf);
        out += ',' + std::to_string(row.n_diverged);
        out += ',' + std::to_string(row.n_failed);
        out += '\n';
    }
    return out;
}

}  // namespace nclab
