#include "nclab/runio.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>

#include "nclab/dynamics.hpp"

namespace nclab {

namespace {

std::string format_double(double v) {
    char buf[40];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, ptr);
}

double parse_double(std::string_view token, std::size_t line) {
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), v);
    if (ec != std::errc{} || ptr != token.data() + token.size()) {
        throw DataError("log.csv line " + std::to_string(line) + ": bad number '" +
                        std::string(token) + "'");
    }
    return v;
}

std::string now_iso8601() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    char buf[32];
    std::tm tm_utc{};
    gmtime_r(&t, &tm_utc);
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
    return buf;
}

}  // namespace

Dataset DatasetSpec::realize(const std::filesystem::path& data_dir) const {
    if (kind == Kind::Blobs) {
        RngState rng(blob_seed);
        return make_blobs(rng, k, per_class, dim, separation, noise_sigma);
    }
    auto resolve = [&data_dir](const std::string& p) {
        std::filesystem::path path(p);
        return path.is_absolute() || data_dir.empty() ? path : data_dir / path;
    };
    Dataset data = load_idx(resolve(images), resolve(labels));
    if (subset > 0 && subset < data.size()) data = take_first(data, subset);
    return data;
}

std::string DatasetSpec::describe() const {
    if (kind == Kind::Blobs) {
        return "blobs(k=" + std::to_string(k) + ",per_class=" + std::to_string(per_class) +
               ",dim=" + std::to_string(dim) + ",sep=" + format_double(separation) +
               ",noise=" + format_double(noise_sigma) + ",seed=" +
               std::to_string(blob_seed) + ")";
    }
    std::string s = "idx(" + images + "," + labels;
    if (subset > 0) s += ",first" + std::to_string(subset);
    return s + ")";
}

std::string to_string(RunMode mode) {
    switch (mode) {
        case RunMode::TwoPhase: return "two_phase";
        case RunMode::CeOnly: return "ce_only";
        case RunMode::ResumePhase2: return "resume_phase2";
    }
    return "?";
}

RunMode run_mode_from_string(const std::string& name) {
    if (name == "two_phase") return RunMode::TwoPhase;
    if (name == "ce_only") return RunMode::CeOnly;
    if (name == "resume_phase2") return RunMode::ResumePhase2;
    throw DataError("unknown run mode: " + name);
}

namespace {

nlohmann::json optimizer_to_json(const OptimizerChoice& opt) {
    if (opt.kind == OptimizerChoice::Kind::Adam) {
        return {{"kind", "adam"},
                {"lr", opt.adam.base_lr},
                {"beta1", opt.adam.beta1},
                {"beta2", opt.adam.beta2},
                {"eps", opt.adam.eps},
                {"weight_decay", opt.adam.weight_decay},
                {"decoupled", opt.adam.decoupled}};
    }
    return {{"kind", "sgd"},
            {"lr", opt.sgd.base_lr},
            {"momentum", opt.sgd.momentum},
            {"nesterov", opt.sgd.nesterov},
            {"weight_decay", opt.sgd.weight_decay}};
}

OptimizerChoice optimizer_from_json(const nlohmann::json& j) {
    OptimizerChoice opt;
    if (j.at("kind") == "adam") {
        opt.kind = OptimizerChoice::Kind::Adam;
        opt.adam.base_lr = j.at("lr");
        opt.adam.beta1 = j.at("beta1");
        opt.adam.beta2 = j.at("beta2");
        opt.adam.eps = j.at("eps");
        opt.adam.weight_decay = j.at("weight_decay");
        opt.adam.decoupled = j.at("decoupled");
    } else if (j.at("kind") == "sgd") {
        opt.kind = OptimizerChoice::Kind::Sgd;
        opt.sgd.base_lr = j.at("lr");
        opt.sgd.momentum = j.at("momentum");
        opt.sgd.nesterov = j.at("nesterov");
        opt.sgd.weight_decay = j.at("weight_decay");
    } else {
        throw DataError("unknown optimizer kind in manifest");
    }
    return opt;
}

nlohmann::json schedule_to_json(const ScheduleChoice& schedule) {
    if (schedule.kind == ScheduleChoice::Kind::Cosine) {
        return {{"kind", "cosine"},
                {"eta_min", schedule.eta_min},
                {"span_phases", schedule.span_phases}};
    }
    return {{"kind", "multistep"},
            {"milestones", schedule.milestones},
            {"gamma", schedule.gamma}};
}

ScheduleChoice schedule_from_json(const nlohmann::json& j) {
    ScheduleChoice schedule;
    if (j.at("kind") == "cosine") {
        schedule.kind = ScheduleChoice::Kind::Cosine;
        schedule.eta_min = j.at("eta_min");
        schedule.span_phases = j.at("span_phases");
    } else if (j.at("kind") == "multistep") {
        schedule.kind = ScheduleChoice::Kind::MultiStep;
        schedule.milestones = j.at("milestones").get<std::vector<std::size_t>>();
        schedule.gamma = j.at("gamma");
    } else {
        throw DataError("unknown schedule kind in manifest");
    }
    return schedule;
}

nlohmann::json dataset_to_json(const DatasetSpec& spec) {
    if (spec.kind == DatasetSpec::Kind::Blobs) {
        return {{"kind", "blobs"},
                {"k", spec.k},
                {"per_class", spec.per_class},
                {"dim", spec.dim},
                {"separation", spec.separation},
                {"noise_sigma", spec.noise_sigma},
                {"seed", spec.blob_seed}};
    }
    return {{"kind", "mnist"},
            {"images", spec.images},
            {"labels", spec.labels},
            {"subset", spec.subset}};
}

DatasetSpec dataset_from_json(const nlohmann::json& j) {
    DatasetSpec spec;
    if (j.at("kind") == "blobs") {
        spec.kind = DatasetSpec::Kind::Blobs;
        spec.k = j.at("k");
        spec.per_class = j.at("per_class");
        spec.dim = j.at("dim");
        spec.separation = j.at("separation");
        spec.noise_sigma = j.at("noise_sigma");
        spec.blob_seed = j.at("seed");
    } else if (j.at("kind") == "mnist") {
        spec.kind = DatasetSpec::Kind::Mnist;
        spec.images = j.at("images");
        spec.labels = j.at("labels");
        spec.subset = j.at("subset");
    } else {
        throw DataError("unknown dataset kind in manifest");
    }
    return spec;
}

}  // namespace

nlohmann::json manifest_to_json(const ExperimentManifest& m) {
    nlohmann::json j;
    j["schema_version"] = m.schema_version;
    j["experiment"] = m.experiment;
    j["mode"] = to_string(m.mode);
    j["dataset"] = dataset_to_json(m.dataset);
    j["dataset_hash"] = m.dataset_hash;
    j["protocol"] = {
        {"model",
         {{"input_dim", m.protocol.model.input_dim},
          {"depth", m.protocol.model.depth},
          {"width", m.protocol.model.width},
          {"activation", to_string(m.protocol.model.activation)},
          {"num_classes", m.protocol.model.num_classes}}},
        {"phase1_epochs", m.protocol.phase1_epochs},
        {"phase2_epochs", m.protocol.phase2_epochs},
        {"nc1_threshold", m.protocol.nc1_threshold},
        {"batch_size", m.protocol.batch_size},
        {"optimizer", optimizer_to_json(m.protocol.optimizer)},
        {"schedule", schedule_to_json(m.protocol.schedule)},
        {"terminal_acc", m.protocol.terminal_acc},
        {"divergence",
         {{"nc1_limit", m.protocol.divergence.nc1_limit},
          {"after_epoch", m.protocol.divergence.after_epoch}}},
        {"eval_every", m.protocol.eval_every}};
    j["seed"] = m.protocol.seed;
    if (m.intervention_alpha) {
        j["intervention_alpha"] = *m.intervention_alpha;
    }
    if (!m.checkpoint.empty()) {
        j["checkpoint"] = m.checkpoint;
        j["checkpoint_hash"] = m.checkpoint_hash;
    }
    // Conventions that pin down the numerics this manifest was run under.
    j["conventions"] = {{"weight_decay", m.protocol.optimizer.kind ==
                                                 OptimizerChoice::Kind::Adam &&
                                             m.protocol.optimizer.adam.decoupled
                                         ? "decoupled"
                                         : "coupled_l2_weights_only"},
                        {"mse", "mean_over_batch_and_coords_no_half"},
                        {"normalization", "pixels_over_255"},
                        {"init", "kaiming_normal_sqrt2_biases_zero"},
                        {"gelu", "exact_erf"},
                        {"phase2_optimizer_moments", "reset"},
                        {"metric_pass", "full_train_set_insertion_order"}};
    j["code_version"] = m.code_version;
    j["timestamp"] = m.timestamp;
    return j;
}

ExperimentManifest manifest_from_json(const nlohmann::json& j) {
    ExperimentManifest m;
    m.schema_version = j.at("schema_version");
    if (m.schema_version != kManifestSchemaVersion) {
        throw DataError("unsupported manifest schema_version " +
                        std::to_string(m.schema_version));
    }
    m.experiment = j.at("experiment");
    m.mode = run_mode_from_string(j.at("mode"));
    m.dataset = dataset_from_json(j.at("dataset"));
    m.dataset_hash = j.at("dataset_hash");
    const auto& p = j.at("protocol");
    const auto& model = p.at("model");
    m.protocol.model.input_dim = model.at("input_dim");
    m.protocol.model.depth = model.at("depth");
    m.protocol.model.width = model.at("width");
    m.protocol.model.activation = activation_from_string(model.at("activation"));
    m.protocol.model.num_classes = model.at("num_classes");
    m.protocol.phase1_epochs = p.at("phase1_epochs");
    m.protocol.phase2_epochs = p.at("phase2_epochs");
    m.protocol.nc1_threshold = p.at("nc1_threshold");
    m.protocol.batch_size = p.at("batch_size");
    m.protocol.optimizer = optimizer_from_json(p.at("optimizer"));
    m.protocol.schedule = schedule_from_json(p.at("schedule"));
    m.protocol.terminal_acc = p.at("terminal_acc");
    m.protocol.divergence.nc1_limit = p.at("divergence").at("nc1_limit");
    m.protocol.divergence.after_epoch = p.at("divergence").at("after_epoch");
    m.protocol.eval_every = p.at("eval_every");
    m.protocol.seed = j.at("seed");
    if (j.contains("intervention_alpha")) {
        m.intervention_alpha = j.at("intervention_alpha").get<double>();
    }
    if (j.contains("checkpoint")) {
        m.checkpoint = j.at("checkpoint");
        m.checkpoint_hash = j.at("checkpoint_hash");
    }
    m.code_version = j.at("code_version");
    m.timestamp = j.at("timestamp");
    return m;
}

void write_manifest(const ExperimentManifest& manifest,
                    const std::filesystem::path& path) {
    ExperimentManifest stamped = manifest;
    if (stamped.timestamp.empty()) stamped.timestamp = now_iso8601();
    std::ofstream out(path);
    if (!out) throw DataError("cannot write manifest " + path.string());
    out << manifest_to_json(stamped).dump(2) << "\n";
}

ExperimentManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open manifest " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + ": " + e.what());
    }
    try {
        return manifest_from_json(j);
    } catch (const nlohmann::json::exception& e) {
        throw DataError("manifest " + path.string() + ": " + e.what());
    }
}

nlohmann::json manifest_identity_view(const ExperimentManifest& manifest) {
    nlohmann::json j = manifest_to_json(manifest);
    j.erase("intervention_alpha");
    j.erase("checkpoint_hash");
    j.erase("timestamp");
    return j;
}

namespace {

void append_metric(std::string& out, const std::optional<double>& v) {
    out += ',';
    out += v ? format_double(*v) : "degenerate";
}

}  // namespace

std::string log_csv_string(const std::vector<NcSnapshot>& snapshots) {
    std::string out = kLogHeader;
    out += '\n';
    for (const auto& s : snapshots) {
        out += std::to_string(s.epoch);
        out += ',';
        out += std::to_string(s.phase);
        out += ',';
        out += format_double(s.lr);
        out += ',';
        out += format_double(s.loss);
        out += ',';
        out += format_double(s.train_acc);
        append_metric(out, s.nc1);
        append_metric(out, s.nc2);
        append_metric(out, s.nc3);
        out += ',';
        out += format_double(s.fn);
        out += '\n';
    }
    return out;
}

void write_log_csv(const std::vector<NcSnapshot>& snapshots,
                   const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write " + path.string());
    out << log_csv_string(snapshots);
}

std::vector<NcSnapshot> parse_log_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw DataError("log.csv line 1: missing header");
    if (line == std::string(kLogHeader) + "\r") line.pop_back();
    if (line != kLogHeader) {
        throw DataError("log.csv line 1: unknown columns '" + line + "'");
    }
    std::vector<NcSnapshot> snapshots;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::vector<std::string_view> fields;
        std::string_view view = line;
        while (true) {
            const auto comma = view.find(',');
            fields.push_back(view.substr(0, comma));
            if (comma == std::string_view::npos) break;
            view.remove_prefix(comma + 1);
        }
        if (fields.size() != 9) {
            throw DataError("log.csv line " + std::to_string(line_no) + ": expected 9 fields, got " +
                            std::to_string(fields.size()));
        }
        NcSnapshot s;
        s.epoch = static_cast<std::size_t>(parse_double(fields[0], line_no));
        s.phase = static_cast<int>(parse_double(fields[1], line_no));
        s.lr = parse_double(fields[2], line_no);
        s.loss = parse_double(fields[3], line_no);
        s.train_acc = parse_double(fields[4], line_no);
        auto metric = [&](std::string_view token) -> std::optional<double> {
            if (token == "degenerate") return std::nullopt;
            return parse_double(token, line_no);
        };
        s.nc1 = metric(fields[5]);
        s.nc2 = metric(fields[6]);
        s.nc3 = metric(fields[7]);
        s.fn = parse_double(fields[8], line_no);
        snapshots.push_back(s);
    }
    return snapshots;
}

std::vector<NcSnapshot> read_log_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open " + path.string());
    return parse_log_csv(in);
}

void write_run_dir(const RunPaths& paths, const ExperimentManifest& manifest,
                   const RunRecord& record, const MlpModel* phase1_model,
                   bool force) {
    namespace fs = std::filesystem;
    if (fs::exists(paths.log()) && !force) {
        throw DataError("output " + paths.dir.string() +
                        " already holds a run; pass --force to overwrite");
    }
    fs::create_directories(paths.dir);
    write_manifest(manifest, paths.manifest());
    write_log_csv(record.snapshots, paths.log());
    if (phase1_model) {
        save_checkpoint(*phase1_model, manifest.protocol.seed, paths.checkpoint());
    }
    nlohmann::json summary;
    summary["status"] = to_string(record.status);
    if (record.t_nc) summary["t_nc"] = *record.t_nc;
    if (record.fn_at_tnc) summary["fn_at_tnc"] = *record.fn_at_tnc;
    summary["phase1_reached_terminal"] = record.phase1_reached_terminal;
    summary["wall_seconds"] = record.wall_seconds;
    std::ofstream out(paths.summary());
    if (!out) throw DataError("cannot write " + paths.summary().string());
    out << summary.dump(2) << "\n";
}

RunSummary read_summary(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw DataError("cannot open " + path.string());
    nlohmann::json j;
    in >> j;
    RunSummary s;
    const std::string status = j.at("status");
    if (status == "collapsed") {
        s.status = RunStatus::Collapsed;
    } else if (status == "dnf") {
        s.status = RunStatus::DNF;
    } else if (status == "diverged") {
        s.status = RunStatus::Diverged;
    } else {
        throw DataError("summary " + path.string() + ": unknown status " + status);
    }
    if (j.contains("t_nc")) s.t_nc = j.at("t_nc").get<std::size_t>();
    if (j.contains("fn_at_tnc")) s.fn_at_tnc = j.at("fn_at_tnc").get<double>();
    s.phase1_reached_terminal = j.at("phase1_reached_terminal");
    s.wall_seconds = j.at("wall_seconds");
    return s;
}

RunRecord execute_manifest(const ExperimentManifest& manifest,
                           const std::filesystem::path& data_dir,
                           MlpModel* phase1_model_out) {
    Dataset data = manifest.dataset.realize(data_dir);
    const std::uint64_t hash = dataset_content_hash(data);
    if (manifest.dataset_hash != 0 && manifest.dataset_hash != hash) {
        throw DataError("dataset content hash mismatch: manifest " +
                        std::to_string(manifest.dataset_hash) + ", realized " +
                        std::to_string(hash));
    }
    switch (manifest.mode) {
        case RunMode::TwoPhase:
            return run_two_phase(manifest.protocol, data, phase1_model_out);
        case RunMode::CeOnly:
            return run_ce_only(manifest.protocol, data);
        case RunMode::ResumePhase2: {
            if (manifest.checkpoint.empty()) {
                throw DataError("resume_phase2 manifest lacks a checkpoint path");
            }
            LoadedCheckpoint loaded = load_checkpoint(manifest.checkpoint);
            if (manifest.checkpoint_hash != 0 &&
                model_param_hash(loaded.model) != manifest.checkpoint_hash) {
                throw DataError("checkpoint hash mismatch for " + manifest.checkpoint);
            }
            MlpModel model = std::move(loaded.model);
            if (manifest.intervention_alpha) {
                // alpha = 1.0 is an exact identity; applied uniformly so all
                // conditions share one code path.
                rescale_features(model, *manifest.intervention_alpha);
            }
            return resume_phase2(std::move(model), manifest.protocol, data);
        }
    }
    throw DataError("unreachable run mode");
}

}  // namespace nclab
