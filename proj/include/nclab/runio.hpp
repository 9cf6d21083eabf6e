#pragma once

#include <filesystem>
#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "nclab/dataio.hpp"
#include "nclab/protocol.hpp"

namespace nclab {

inline constexpr const char* kCodeVersion = "nclab 0.1.0";
inline constexpr int kManifestSchemaVersion = 1;

/// Frozen run-log schema. Degenerate metrics are encoded as the literal
/// token `degenerate`; parsers reject any other column set.
inline constexpr const char* kLogHeader = "epoch,phase,lr,loss,train_acc,nc1,nc2,nc3,fn";

/// Recipe for (re)constructing the dataset a manifest refers to.
struct DatasetSpec {
    enum class Kind { Blobs, Mnist };
    Kind kind = Kind::Blobs;

    // blobs
    std::size_t k = 3;
    std::size_t per_class = 100;
    std::size_t dim = 10;
    double separation = 4.0;
    double noise_sigma = 0.5;
    std::uint64_t blob_seed = 9001;

    // mnist (paths resolved against data_dir when relative)
    std::string images = "train-images-idx3-ubyte";
    std::string labels = "train-labels-idx1-ubyte";
    std::size_t subset = 0;  // 0 keeps the full set

    Dataset realize(const std::filesystem::path& data_dir) const;
    std::string describe() const;
};

enum class RunMode { TwoPhase, CeOnly, ResumePhase2 };

std::string to_string(RunMode mode);
RunMode run_mode_from_string(const std::string& name);

/// One manifest + its seed fully determines a run's log bytes.
struct ExperimentManifest {
    int schema_version = kManifestSchemaVersion;
    std::string experiment = "run";
    RunMode mode = RunMode::TwoPhase;
    DatasetSpec dataset;
    std::uint64_t dataset_hash = 0;  // FNV-1a 64 of the realized dataset
    ProtocolConfig protocol;
    std::optional<double> intervention_alpha;  // ResumePhase2 conditions
    std::string checkpoint;                    // path, ResumePhase2 only
    std::uint64_t checkpoint_hash = 0;         // param hash of that model
    std::string code_version = kCodeVersion;
    std::string timestamp;
};

nlohmann::json manifest_to_json(const ExperimentManifest& manifest);
ExperimentManifest manifest_from_json(const nlohmann::json& j);
void write_manifest(const ExperimentManifest& manifest, const std::filesystem::path& path);
ExperimentManifest read_manifest(const std::filesystem::path& path);

/// Manifest with run-identity fields (alpha, checkpoint hash, timestamp)
/// cleared; intervention conditions must compare equal under this view.
nlohmann::json manifest_identity_view(const ExperimentManifest& manifest);

std::string log_csv_string(const std::vector<NcSnapshot>& snapshots);
void write_log_csv(const std::vector<NcSnapshot>& snapshots,
                   const std::filesystem::path& path);

/// Strict parse of the frozen schema; errors carry the 1-based line number.
std::vector<NcSnapshot> parse_log_csv(std::istream& in);
std::vector<NcSnapshot> read_log_csv(const std::filesystem::path& path);

/// Canonical file layout inside one run directory.
struct RunPaths {
    std::filesystem::path dir;
    std::filesystem::path manifest() const { return dir / "manifest.json"; }
    std::filesystem::path log() const { return dir / "log.csv"; }
    std::filesystem::path checkpoint() const { return dir / "checkpoint_phase1"; }
    std::filesystem::path summary() const { return dir / "summary.json"; }
};

/// Writes manifest + log + summary (and the phase-1 checkpoint when given).
/// Refuses to reuse a non-empty directory unless force is set.
void write_run_dir(const RunPaths& paths, const ExperimentManifest& manifest,
                   const RunRecord& record, const MlpModel* phase1_model,
                   bool force);

struct RunSummary {
    RunStatus status = RunStatus::DNF;
    std::optional<std::size_t> t_nc;
    std::optional<double> fn_at_tnc;
    bool phase1_reached_terminal = false;
    double wall_seconds = 0.0;
};

RunSummary read_summary(const std::filesystem::path& path);

/// Re-executes a manifest: realizes the dataset (verifying the content hash
/// when recorded), trains per mode, and returns the record. The replayed log
/// is byte-identical to the original.
RunRecord execute_manifest(const ExperimentManifest& manifest,
                           const std::filesystem::path& data_dir,
                           MlpModel* phase1_model_out = nullptr);

/// Exit codes shared by the CLI surface.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitDiverged = 3;

}  // namespace nclab
