#include "nclab/rng.hpp"

#include <cmath>
#include <stdexcept>

namespace nclab {

namespace {

constexpr std::uint64_t kGoldenGamma = 0x9E3779B97F4A7C15ull;

std::uint64_t splitmix64(std::uint64_t& x) {
    x += kGoldenGamma;
    std::uint64_t z = x;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }

}  // namespace

RngState::RngState(std::uint64_t seed) : seed_(seed) {
    std::uint64_t sm = seed;
    for (auto& w : s_) w = splitmix64(sm);
}

RngState RngState::for_stream(std::uint64_t seed, std::uint64_t stream) {
    std::uint64_t sm = seed;
    const std::uint64_t mixed = splitmix64(sm) ^ (stream + kGoldenGamma);
    std::uint64_t sm2 = mixed;
    return RngState(splitmix64(sm2));
}

std::uint64_t RngState::next_u64() {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
}

double RngState::next_unit() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngState::next_gaussian() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    double u, v, s;
    do {
        u = 2.0 * next_unit() - 1.0;
        v = 2.0 * next_unit() - 1.0;
        s = u * u + v * v;
    } while (s >= 1.0 || s == 0.0);
    const double factor = std::sqrt(-2.0 * std::log(s) / s);
    spare_ = v * factor;
    has_spare_ = true;
    return u * factor;
}

std::uint64_t RngState::next_below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("next_below: n must be positive");
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
        x = next_u64();
    } while (x >= limit);
    return x % n;
}

std::vector<double> gaussian(RngState& rng, std::size_t n) {
    std::vector<double> out(n);
    for (auto& v : out) v = rng.next_gaussian();
    return out;
}

Matrix kaiming_normal(RngState& rng, std::size_t fan_in, std::size_t fan_out) {
    if (fan_in == 0 || fan_out == 0) {
        throw std::invalid_argument("kaiming_normal: fans must be >= 1");
    }
    const double stddev = std::sqrt(2.0 / static_cast<double>(fan_in));
    Matrix w(fan_out, fan_in);
    double* p = w.data();
    for (std::size_t i = 0; i < w.size(); ++i) p[i] = stddev * rng.next_gaussian();
    return w;
}

}  // namespace nclab
