#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "nclab/runio.hpp"

namespace nclab {

enum class SweepAxis { Depth, Width, WeightDecay, Activation };

std::string to_string(SweepAxis axis);
SweepAxis sweep_axis_from_string(const std::string& name);

struct SweepSpec {
    SweepAxis axis = SweepAxis::Depth;
    std::vector<std::string> values;  // parsed per axis; type-checked up front
    ExperimentManifest base;
    std::vector<std::uint64_t> seeds;
    std::size_t workers = 1;
    bool force = false;

    void validate() const;
};

struct SweepRun {
    std::string condition;  // "<axis>=<value>"
    std::string value;
    std::uint64_t seed = 0;
    std::filesystem::path dir;
    bool failed = false;
    std::string error;
    RunRecord record;  // valid when !failed
};

struct SweepAggregateRow {
    std::string condition;
    std::size_t n = 0;
    double nc1_threshold = 0.0;
    std::size_t n_collapsed = 0;
    std::size_t n_dnf = 0;
    std::size_t n_diverged = 0;
    std::size_t n_failed = 0;
    // over collapsed runs; absent (NaN) when none collapsed
    double t_nc_mean = 0.0, t_nc_std = 0.0;
    double fn_mean = 0.0, fn_std = 0.0;
};

struct SweepOutcome {
    std::vector<SweepRun> runs;            // (value-major, seed-minor) order
    std::vector<SweepAggregateRow> rows;   // one per value
};

/// Applies an axis value to a manifest (depth/width/weight-decay/activation).
ExperimentManifest apply_axis(const ExperimentManifest& base, SweepAxis axis,
                              const std::string& value);

/// One run per (value, seed), executed in a bounded worker pool: each run
/// owns its output directory out_dir/<axis>_<value>/seed_<seed>, so workers
/// share nothing mutable and results are independent of pool size. Per-run
/// failures are recorded and the aggregate is still produced.
SweepOutcome run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                       const std::filesystem::path& data_dir);

std::string aggregate_csv(const SweepOutcome& outcome);

}  // namespace nclab
