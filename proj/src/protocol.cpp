#include "nclab/protocol.hpp"

#include <chrono>
#include <cmath>
#include <cstring>
#include <fstream>

namespace nclab {

std::string to_string(RunStatus status) {
    switch (status) {
        case RunStatus::Collapsed: return "collapsed";
        case RunStatus::DNF: return "dnf";
        case RunStatus::Diverged: return "diverged";
    }
    return "?";
}

void ProtocolConfig::validate() const {
    model.validate();
    if (phase1_epochs == 0) throw std::invalid_argument("phase1_epochs >= 1");
    if (nc1_threshold <= 0.0) throw std::invalid_argument("nc1_threshold > 0");
    if (batch_size == 0) throw std::invalid_argument("batch_size >= 1");
    if (eval_every == 0) throw std::invalid_argument("eval_every >= 1");
    for (std::size_t i = 1; i < schedule.milestones.size(); ++i) {
        if (schedule.milestones[i] <= schedule.milestones[i - 1]) {
            throw std::invalid_argument("milestones must be strictly increasing");
        }
    }
}

std::optional<std::size_t> detect_t_nc(const std::vector<NcSnapshot>& snapshots,
                                       double eps) {
    for (const auto& snap : snapshots) {
        if (snap.nc1 && *snap.nc1 < eps) return snap.epoch;
    }
    return std::nullopt;
}

RunStatus classify_status(const std::vector<NcSnapshot>& snapshots, double eps,
                          const DivergenceRule& rule) {
    const auto t_nc = detect_t_nc(snapshots, eps);
    for (const auto& snap : snapshots) {
        if (snap.epoch <= rule.after_epoch) continue;
        if (snap.nc1 && *snap.nc1 > rule.nc1_limit) {
            // A collapse that happened first stands.
            if (t_nc && *t_nc <= snap.epoch) break;
            return RunStatus::Diverged;
        }
    }
    return t_nc ? RunStatus::Collapsed : RunStatus::DNF;
}

namespace {

struct Optimizer {
    OptimizerChoice::Kind kind;
    std::optional<AdamState> adam;
    std::optional<SgdState> sgd;

    Optimizer(const MlpModel& model, const OptimizerChoice& choice)
        : kind(choice.kind) {
        if (kind == OptimizerChoice::Kind::Adam) {
            adam.emplace(model, choice.adam);
        } else {
            sgd.emplace(model, choice.sgd);
        }
    }

    void step(MlpModel& model, const Gradients& grads, double lr) {
        if (adam) {
            adam->step(model, grads, lr);
        } else {
            sgd->step(model, grads, lr);
        }
    }
};

LrSchedule build_schedule(const ScheduleChoice& choice, std::size_t span_epochs) {
    if (choice.kind == ScheduleChoice::Kind::Cosine) {
        return CosineSchedule{span_epochs, choice.eta_min};
    }
    return MultiStepSchedule{choice.milestones, choice.gamma};
}

NcSnapshot evaluate_epoch(const MlpModel& model, const Dataset& data,
                          std::size_t batch_size, LossKind loss_kind,
                          std::size_t epoch, int phase, double lr) {
    FeatureAccumulator acc(data.k, model.config.width);
    double loss_total = 0.0;
    std::size_t correct = 0;
    BatchStream stream(data, batch_size);  // insertion order
    Batch batch;
    while (stream.next(batch)) {
        ForwardTrace trace = forward(model, batch.x);
        acc.add(trace.features(), batch.y);
        loss_total += loss_value(trace.logits(), batch.y, loss_kind) *
                      static_cast<double>(batch.x.rows());
        const Matrix& logits = trace.logits();
        for (std::size_t i = 0; i < logits.rows(); ++i) {
            auto row = logits.row(i);
            std::size_t best = 0;
            for (std::size_t c = 1; c < logits.cols(); ++c) {
                if (row[c] > row[best]) best = c;
            }
            if (static_cast<int>(best) == batch.y[i]) ++correct;
        }
    }
    NcSnapshot snap;
    snap.epoch = epoch;
    snap.phase = phase;
    snap.lr = lr;
    snap.loss = loss_total / static_cast<double>(data.size());
    snap.train_acc = static_cast<double>(correct) / static_cast<double>(data.size());
    snap.fn = acc.mean_norm();
    try {
        const FeatureStats stats = acc.finalize();
        snap.nc1 = nc1(stats);
        snap.nc2 = nc2(stats);
        snap.nc3 = nc3(stats, model.head().w);
    } catch (const MetricError&) {
        // Snapshot stays marked degenerate; the run continues.
    }
    return snap;
}

/// Runs one training phase. Returns false if the phase aborted on divergence
/// (non-finite loss or gradients); snapshots gathered so far are kept.
bool train_phase(MlpModel& model, const ProtocolConfig& config, const Dataset& data,
                 LossKind loss_kind, int phase, std::size_t phase_epochs,
                 std::size_t first_global_epoch, const LrSchedule& schedule,
                 std::size_t schedule_offset, std::vector<NcSnapshot>& out) {
    Optimizer opt(model, config.optimizer);
    for (std::size_t e = 0; e < phase_epochs; ++e) {
        const std::size_t global_epoch = first_global_epoch + e;
        const double lr = lr_at(schedule, schedule_offset + e,
                                config.optimizer.base_lr());
        bool diverged = false;
        BatchStream stream(data, config.batch_size, config.seed, global_epoch);
        Batch batch;
        while (stream.next(batch)) {
            ForwardTrace trace = forward(model, batch.x);
            LossGrad lg;
            try {
                lg = loss_and_grad(trace, batch.y, loss_kind, model);
                if (!std::isfinite(lg.loss)) throw DivergenceError("non-finite loss");
                opt.step(model, lg.grads, lr);
            } catch (const DivergenceError&) {
                diverged = true;
                break;
            }
        }
        if (diverged) return false;
        if (global_epoch % config.eval_every == 0 || e + 1 == phase_epochs) {
            out.push_back(evaluate_epoch(model, data, config.batch_size, loss_kind,
                                         global_epoch, phase, lr));
        }
    }
    return true;
}

void finalize_record(RunRecord& record, bool aborted) {
    record.t_nc = detect_t_nc(record.snapshots, record.config.nc1_threshold);
    if (aborted && !record.t_nc) {
        record.status = RunStatus::Diverged;
    } else {
        record.status = classify_status(record.snapshots, record.config.nc1_threshold,
                                        record.config.divergence);
    }
    if (record.status != RunStatus::Collapsed) {
        record.t_nc.reset();
        record.fn_at_tnc.reset();
        return;
    }
    for (const auto& snap : record.snapshots) {
        if (snap.epoch == *record.t_nc) {
            record.fn_at_tnc = snap.fn;
            break;
        }
    }
}

bool reached_terminal(const std::vector<NcSnapshot>& snapshots, int phase,
                      double terminal_acc) {
    for (const auto& snap : snapshots) {
        if (snap.phase == phase && snap.train_acc >= terminal_acc) return true;
    }
    return false;
}

}  // namespace

RunRecord run_two_phase(const ProtocolConfig& config, const Dataset& data,
                        MlpModel* phase1_model_out) {
    config.validate();
    data.validate();
    if (data.dim() != config.model.input_dim || data.k != config.model.num_classes) {
        throw std::invalid_argument("run_two_phase: dataset does not match model dims");
    }
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord record;
    record.config = config;

    RngState rng(config.seed);
    MlpModel model = build_mlp(config.model, rng);

    const std::size_t span = config.schedule.span_phases
                                 ? config.phase1_epochs + config.phase2_epochs
                                 : config.phase1_epochs;
    const LrSchedule phase1_schedule = build_schedule(config.schedule, span);
    bool ok = train_phase(model, config, data, LossKind::CrossEntropy, 1,
                          config.phase1_epochs, 1, phase1_schedule, 0,
                          record.snapshots);
    record.phase1_reached_terminal =
        reached_terminal(record.snapshots, 1, config.terminal_acc);
    if (phase1_model_out && ok) *phase1_model_out = model;

    if (ok && config.phase2_epochs > 0) {
        const std::size_t span2 = config.schedule.span_phases
                                      ? config.phase1_epochs + config.phase2_epochs
                                      : config.phase2_epochs;
        const LrSchedule phase2_schedule = build_schedule(config.schedule, span2);
        const std::size_t offset =
            config.schedule.span_phases ? config.phase1_epochs : 0;
        ok = train_phase(model, config, data, LossKind::MseOneHot, 2,
                         config.phase2_epochs, config.phase1_epochs + 1,
                         phase2_schedule, offset, record.snapshots);
    }

    finalize_record(record, !ok);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

RunRecord run_ce_only(const ProtocolConfig& config, const Dataset& data) {
    config.validate();
    data.validate();
    if (data.dim() != config.model.input_dim || data.k != config.model.num_classes) {
        throw std::invalid_argument("run_ce_only: dataset does not match model dims");
    }
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord record;
    record.config = config;

    RngState rng(config.seed);
    MlpModel model = build_mlp(config.model, rng);
    const LrSchedule schedule = build_schedule(config.schedule, config.phase1_epochs);
    const bool ok = train_phase(model, config, data, LossKind::CrossEntropy, 1,
                                config.phase1_epochs, 1, schedule, 0,
                                record.snapshots);
    record.phase1_reached_terminal =
        reached_terminal(record.snapshots, 1, config.terminal_acc);
    finalize_record(record, !ok);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

RunRecord resume_phase2(MlpModel model, const ProtocolConfig& config,
                        const Dataset& data) {
    config.validate();
    data.validate();
    if (config.phase2_epochs == 0) {
        throw std::invalid_argument("resume_phase2: phase2_epochs >= 1");
    }
    const auto t0 = std::chrono::steady_clock::now();

    RunRecord record;
    record.config = config;

    const std::size_t span = config.schedule.span_phases
                                 ? config.phase1_epochs + config.phase2_epochs
                                 : config.phase2_epochs;
    const LrSchedule schedule = build_schedule(config.schedule, span);
    const std::size_t offset = config.schedule.span_phases ? config.phase1_epochs : 0;
    const bool ok = train_phase(model, config, data, LossKind::MseOneHot, 2,
                                config.phase2_epochs, config.phase1_epochs + 1,
                                schedule, offset, record.snapshots);
    finalize_record(record, !ok);
    record.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return record;
}

std::uint64_t model_param_hash(const MlpModel& model) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix = [&h](const void* ptr, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(ptr);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    };
    for (const auto& layer : model.layers) {
        mix(layer.w.data(), layer.w.size() * sizeof(double));
        mix(layer.b.data(), layer.b.size() * sizeof(double));
    }
    return h;
}

namespace {

constexpr char kCheckpointMagic[8] = {'N', 'C', 'L', 'A', 'B', 'C', 'P', '1'};

template <typename T>
void write_pod(std::ostream& out, const T& value) {
    out.write(reinterpret_cast<const char*>(&value), sizeof(T));
}

template <typename T>
T read_pod(std::istream& in, const char* what) {
    T value{};
    in.read(reinterpret_cast<char*>(&value), sizeof(T));
    if (!in) throw DataError(std::string("checkpoint: truncated ") + what);
    return value;
}

}  // namespace

void save_checkpoint(const MlpModel& model, std::uint64_t seed,
                     const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write checkpoint " + path.string());
    out.write(kCheckpointMagic, sizeof(kCheckpointMagic));
    write_pod<std::uint32_t>(out, 1);
    write_pod<std::uint64_t>(out, seed);
    write_pod<std::uint64_t>(out, model.config.input_dim);
    write_pod<std::uint64_t>(out, model.config.depth);
    write_pod<std::uint64_t>(out, model.config.width);
    write_pod<std::uint64_t>(out, model.config.num_classes);
    write_pod<std::uint8_t>(out, static_cast<std::uint8_t>(model.config.activation));
    write_pod<std::uint64_t>(out, model.layers.size());
    for (const auto& layer : model.layers) {
        write_pod<std::uint64_t>(out, layer.w.rows());
        write_pod<std::uint64_t>(out, layer.w.cols());
        out.write(reinterpret_cast<const char*>(layer.w.data()),
                  static_cast<std::streamsize>(layer.w.size() * sizeof(double)));
        write_pod<std::uint64_t>(out, layer.b.size());
        out.write(reinterpret_cast<const char*>(layer.b.data()),
                  static_cast<std::streamsize>(layer.b.size() * sizeof(double)));
    }
    if (!out) throw DataError("short write on checkpoint " + path.string());
}

LoadedCheckpoint load_checkpoint(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint " + path.string());
    char magic[8];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kCheckpointMagic, sizeof(magic)) != 0) {
        throw DataError("not a checkpoint file: " + path.string());
    }
    const auto version = read_pod<std::uint32_t>(in, "version");
    if (version != 1) {
        throw DataError("unsupported checkpoint version " + std::to_string(version));
    }
    LoadedCheckpoint loaded;
    loaded.seed = read_pod<std::uint64_t>(in, "seed");
    loaded.model.config.input_dim = read_pod<std::uint64_t>(in, "input_dim");
    loaded.model.config.depth = read_pod<std::uint64_t>(in, "depth");
    loaded.model.config.width = read_pod<std::uint64_t>(in, "width");
    loaded.model.config.num_classes = read_pod<std::uint64_t>(in, "num_classes");
    loaded.model.config.activation =
        static_cast<ActivationKind>(read_pod<std::uint8_t>(in, "activation"));
    const auto n_layers = read_pod<std::uint64_t>(in, "layer count");
    for (std::uint64_t l = 0; l < n_layers; ++l) {
        const auto rows = read_pod<std::uint64_t>(in, "layer rows");
        const auto cols = read_pod<std::uint64_t>(in, "layer cols");
        Matrix w(rows, cols);
        in.read(reinterpret_cast<char*>(w.data()),
                static_cast<std::streamsize>(w.size() * sizeof(double)));
        if (!in) throw DataError("checkpoint: truncated weights");
        const auto blen = read_pod<std::uint64_t>(in, "bias length");
        std::vector<double> b(blen);
        in.read(reinterpret_cast<char*>(b.data()),
                static_cast<std::streamsize>(blen * sizeof(double)));
        if (!in) throw DataError("checkpoint: truncated biases");
        loaded.model.layers.push_back({std::move(w), std::move(b)});
    }
    return loaded;
}

}  // namespace nclab
