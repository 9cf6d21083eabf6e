#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "nclab/matrix.hpp"
#include "nclab/rng.hpp"

namespace nclab {

struct DataError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable after construction; safe for concurrent read by parallel runs.
struct Dataset {
    Matrix x;                // N x D, normalized
    std::vector<int> y;      // labels in 0..k-1
    std::size_t k = 0;
    std::string name;

    std::size_t size() const { return x.rows(); }
    std::size_t dim() const { return x.cols(); }
    void validate() const;   // label range, >=1 sample per class
};

/// MNIST-style IDX pair. Big-endian magics 0x00000803 (images) and
/// 0x00000801 (labels); pixels scaled to [0,1] by /255.
Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path);

/// K Gaussian blobs with class c centered at separation * e_c (requires
/// dim >= k) and isotropic noise of the given sigma. Exactly balanced.
Dataset make_blobs(RngState& rng, std::size_t k, std::size_t per_class,
                   std::size_t dim, double separation, double noise_sigma);

/// First n samples in insertion order (desk-scale subsets).
Dataset take_first(const Dataset& data, std::size_t n);

/// Fisher-Yates permutation of 0..n-1 drawn from the (seed, epoch) child
/// stream, so batch order is a pure function of those two values.
std::vector<std::uint32_t> epoch_permutation(std::uint64_t seed, std::size_t epoch,
                                             std::size_t n);

struct Batch {
    Matrix x;
    std::vector<int> y;
};

/// Seeded shuffled mini-batches covering every sample once; the last batch
/// may be short. One batch is materialized at a time.
class BatchStream {
public:
    BatchStream(const Dataset& data, std::size_t batch_size, std::uint64_t seed,
                std::size_t epoch);
    /// Sequential pass in insertion order (metric passes; no shuffle).
    BatchStream(const Dataset& data, std::size_t batch_size);

    bool next(Batch& out);
    std::size_t batch_count() const;

private:
    const Dataset& data_;
    std::size_t batch_size_;
    std::vector<std::uint32_t> order_;
    std::size_t pos_ = 0;
};

/// FNV-1a 64 over the dataset's raw bytes (inputs then labels); used as the
/// manifest content hash.
std::uint64_t dataset_content_hash(const Dataset& data);

}  // namespace nclab
