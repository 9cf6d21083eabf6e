#include "nclab/dataio.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>

namespace nclab {

void Dataset::validate() const {
    if (k < 2) throw DataError("dataset " + name + ": needs >= 2 classes");
    if (y.size() != x.rows()) throw DataError("dataset " + name + ": X/y length mismatch");
    std::vector<std::size_t> counts(k, 0);
    for (int label : y) {
        if (label < 0 || static_cast<std::size_t>(label) >= k) {
            throw DataError("dataset " + name + ": label " + std::to_string(label) +
                            " outside 0.." + std::to_string(k - 1));
        }
        ++counts[static_cast<std::size_t>(label)];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] == 0) {
            throw DataError("dataset " + name + ": class " + std::to_string(c) +
                            " has no samples");
        }
    }
}

namespace {

std::uint32_t read_be_u32(std::istream& in, const std::string& what) {
    unsigned char buf[4];
    in.read(reinterpret_cast<char*>(buf), 4);
    if (!in) throw DataError("IDX: truncated while reading " + what);
    return (std::uint32_t{buf[0]} << 24) | (std::uint32_t{buf[1]} << 16) |
           (std::uint32_t{buf[2]} << 8) | std::uint32_t{buf[3]};
}

}  // namespace

Dataset load_idx(const std::filesystem::path& images_path,
                 const std::filesystem::path& labels_path) {
    std::ifstream img(images_path, std::ios::binary);
    if (!img) throw DataError("cannot open " + images_path.string());
    std::ifstream lab(labels_path, std::ios::binary);
    if (!lab) throw DataError("cannot open " + labels_path.string());

    const std::uint32_t img_magic = read_be_u32(img, "image magic");
    if (img_magic != 0x00000803u) {
        throw DataError("IDX: bad image magic " + std::to_string(img_magic) +
                        " in " + images_path.string());
    }
    const std::uint32_t n = read_be_u32(img, "image count");
    const std::uint32_t rows = read_be_u32(img, "image rows");
    const std::uint32_t cols = read_be_u32(img, "image cols");

    const std::uint32_t lab_magic = read_be_u32(lab, "label magic");
    if (lab_magic != 0x00000801u) {
        throw DataError("IDX: bad label magic " + std::to_string(lab_magic) +
                        " in " + labels_path.string());
    }
    const std::uint32_t n_labels = read_be_u32(lab, "label count");
    if (n != n_labels) {
        throw DataError("IDX: image count " + std::to_string(n) +
                        " != label count " + std::to_string(n_labels));
    }

    const std::size_t dim = static_cast<std::size_t>(rows) * cols;
    Dataset data;
    data.x = Matrix(n, dim);
    data.y.resize(n);
    data.name = images_path.filename().string();

    std::vector<unsigned char> pixel_row(dim);
    for (std::uint32_t i = 0; i < n; ++i) {
        img.read(reinterpret_cast<char*>(pixel_row.data()),
                 static_cast<std::streamsize>(dim));
        if (!img) throw DataError("IDX: truncated image data at sample " + std::to_string(i));
        auto out = data.x.row(i);
        for (std::size_t j = 0; j < dim; ++j) {
            out[j] = static_cast<double>(pixel_row[j]) / 255.0;
        }
        char label;
        lab.read(&label, 1);
        if (!lab) throw DataError("IDX: truncated label data at sample " + std::to_string(i));
        data.y[i] = static_cast<unsigned char>(label);
    }

    int max_label = *std::max_element(data.y.begin(), data.y.end());
    data.k = static_cast<std::size_t>(max_label) + 1;
    data.validate();
    return data;
}

Dataset make_blobs(RngState& rng, std::size_t k, std::size_t per_class,
                   std::size_t dim, double separation, double noise_sigma) {
    if (k == 0 || per_class == 0 || dim == 0) {
        throw std::invalid_argument("make_blobs: counts must be >= 1");
    }
    if (noise_sigma <= 0.0) throw std::invalid_argument("make_blobs: noise_sigma > 0");
    if (dim < k) {
        throw std::invalid_argument("make_blobs: dim " + std::to_string(dim) +
                                    " < k " + std::to_string(k));
    }
    Dataset data;
    const std::size_t n = k * per_class;
    data.x = Matrix(n, dim);
    data.y.resize(n);
    data.k = k;
    data.name = "blobs_k" + std::to_string(k);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t s = 0; s < per_class; ++s) {
            const std::size_t i = c * per_class + s;
            auto row = data.x.row(i);
            for (std::size_t j = 0; j < dim; ++j) {
                row[j] = noise_sigma * rng.next_gaussian();
            }
            row[c] += separation;
            data.y[i] = static_cast<int>(c);
        }
    }
    return data;
}

Dataset take_first(const Dataset& data, std::size_t n) {
    if (n > data.size()) throw std::invalid_argument("take_first: n > N");
    Dataset out;
    out.x = Matrix(n, data.dim());
    out.y.assign(data.y.begin(), data.y.begin() + static_cast<std::ptrdiff_t>(n));
    std::memcpy(out.x.data(), data.x.data(), n * data.dim() * sizeof(double));
    out.k = data.k;
    out.name = data.name + "_first" + std::to_string(n);
    out.validate();
    return out;
}

std::vector<std::uint32_t> epoch_permutation(std::uint64_t seed, std::size_t epoch,
                                             std::size_t n) {
    std::vector<std::uint32_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<std::uint32_t>(i);
    RngState rng = RngState::for_stream(seed, epoch);
    for (std::size_t i = n; i > 1; --i) {
        const std::uint64_t j = rng.next_below(i);
        std::swap(perm[i - 1], perm[j]);
    }
    return perm;
}

BatchStream::BatchStream(const Dataset& data, std::size_t batch_size,
                         std::uint64_t seed, std::size_t epoch)
    : data_(data), batch_size_(batch_size),
      order_(epoch_permutation(seed, epoch, data.size())) {
    if (batch_size_ == 0 || batch_size_ > data.size()) {
        throw std::invalid_argument("BatchStream: batch_size in 1..N");
    }
}

BatchStream::BatchStream(const Dataset& data, std::size_t batch_size)
    : data_(data), batch_size_(std::min(batch_size, data.size())), order_() {
    order_.resize(data.size());
    for (std::size_t i = 0; i < data.size(); ++i) {
        order_[i] = static_cast<std::uint32_t>(i);
    }
}

std::size_t BatchStream::batch_count() const {
    return (data_.size() + batch_size_ - 1) / batch_size_;
}

bool BatchStream::next(Batch& out) {
    if (pos_ >= order_.size()) return false;
    const std::size_t count = std::min(batch_size_, order_.size() - pos_);
    out.x = Matrix(count, data_.dim());
    out.y.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        const std::uint32_t src = order_[pos_ + i];
        std::memcpy(out.x.row(i).data(), data_.x.row(src).data(),
                    data_.dim() * sizeof(double));
        out.y[i] = data_.y[src];
    }
    pos_ += count;
    return true;
}

std::uint64_t dataset_content_hash(const Dataset& data) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    auto mix_bytes = [&h](const void* ptr, std::size_t len) {
        const auto* p = static_cast<const unsigned char*>(ptr);
        for (std::size_t i = 0; i < len; ++i) {
            h ^= p[i];
            h *= 0x100000001b3ull;
        }
    };
    mix_bytes(data.x.data(), data.x.size() * sizeof(double));
    mix_bytes(data.y.data(), data.y.size() * sizeof(int));
    return h;
}

}  // namespace nclab
