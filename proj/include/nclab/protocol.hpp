#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "nclab/dataio.hpp"
#include "nclab/model.hpp"
#include "nclab/ncmetrics.hpp"
#include "nclab/optim.hpp"

namespace nclab {

/// Post-hoc run classification rule: a run that never collapsed and shows
/// nc1 > nc1_limit at any epoch past after_epoch is excluded as diverged.
struct DivergenceRule {
    double nc1_limit = 0.5;
    std::size_t after_epoch = 300;
};

enum class RunStatus { Collapsed, DNF, Diverged };

std::string to_string(RunStatus status);

struct OptimizerChoice {
    enum class Kind { Adam, Sgd };
    Kind kind = Kind::Adam;
    AdamConfig adam;
    SgdConfig sgd;

    double base_lr() const {
        return kind == Kind::Adam ? adam.base_lr : sgd.base_lr;
    }
    double weight_decay() const {
        return kind == Kind::Adam ? adam.weight_decay : sgd.weight_decay;
    }
    void set_weight_decay(double wd) {
        adam.weight_decay = wd;
        sgd.weight_decay = wd;
    }
};

struct ScheduleChoice {
    enum class Kind { Cosine, MultiStep };
    Kind kind = Kind::Cosine;
    double eta_min = 0.0;
    std::vector<std::size_t> milestones;  // in-phase epochs, strictly increasing
    double gamma = 0.1;
    /// false: the schedule restarts at the phase boundary with T_max equal to
    /// the phase length. true: one cosine arc spans both phases.
    bool span_phases = false;
};

struct ProtocolConfig {
    MlpConfig model;
    std::size_t phase1_epochs = 200;
    std::size_t phase2_epochs = 0;
    double nc1_threshold = 0.01;
    std::size_t batch_size = 128;
    OptimizerChoice optimizer;
    ScheduleChoice schedule;
    std::uint64_t seed = 0;
    double terminal_acc = 0.99;
    DivergenceRule divergence;
    std::size_t eval_every = 1;  // metric cadence; T_NC granularity ±cadence

    void validate() const;
};

struct RunRecord {
    ProtocolConfig config;
    std::vector<NcSnapshot> snapshots;
    RunStatus status = RunStatus::DNF;
    std::optional<std::size_t> t_nc;       // global epoch, first nc1 < threshold
    std::optional<double> fn_at_tnc;
    bool phase1_reached_terminal = false;
    double wall_seconds = 0.0;
};

/// First epoch whose snapshot has a non-degenerate nc1 below eps; degenerate
/// snapshots are skipped, never counted as crossings.
std::optional<std::size_t> detect_t_nc(const std::vector<NcSnapshot>& snapshots,
                                       double eps);

RunStatus classify_status(const std::vector<NcSnapshot>& snapshots, double eps,
                          const DivergenceRule& rule);

/// Phase 1 trains with cross-entropy, Phase 2 continues from the same
/// parameters with one-hot MSE. Optimizer moments reset and the lr schedule
/// restarts at the boundary (unless span_phases). One NcSnapshot per evaluated
/// epoch, computed on the full training set in insertion order.
/// If phase1_model_out is non-null it receives the parameters at the exact
/// phase boundary, before any MSE step.
RunRecord run_two_phase(const ProtocolConfig& config, const Dataset& data,
                        MlpModel* phase1_model_out = nullptr);

/// Single-phase CE control with identical instrumentation; trains for
/// phase1_epochs and ignores phase2_epochs.
RunRecord run_ce_only(const ProtocolConfig& config, const Dataset& data);

/// Phase 2 alone, resumed from a phase-1-end model (possibly modified by an
/// intervention). Global epoch numbering continues at phase1_epochs + 1; the
/// returned record holds only Phase-2 snapshots.
RunRecord resume_phase2(MlpModel model, const ProtocolConfig& config,
                        const Dataset& data);

/// FNV-1a 64 over all parameter bytes, layer by layer.
std::uint64_t model_param_hash(const MlpModel& model);

// Checkpoint container: versioned binary, little-endian, raw IEEE doubles so
// the round-trip is bit-exact. Layout: magic "NCLABCP1", u32 version, u64
// seed, model config (u64 input_dim/depth/width/num_classes, u8 activation),
// u64 layer count, then per layer u64 rows, u64 cols, rows*cols doubles,
// u64 bias length, bias doubles.
void save_checkpoint(const MlpModel& model, std::uint64_t seed,
                     const std::filesystem::path& path);

struct LoadedCheckpoint {
    MlpModel model;
    std::uint64_t seed = 0;
};

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path);

}  // namespace nclab
