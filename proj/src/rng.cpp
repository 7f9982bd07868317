#include "sde1d/rng.hpp"

#include <cmath>
#include <numbers>

namespace sde1d {

namespace {

constexpr std::uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr std::uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9u;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<std::uint32_t, 4>& c, const std::array<std::uint32_t, 2>& k) {
    std::uint64_t p0 = static_cast<std::uint64_t>(kPhiloxM0) * c[0];
    std::uint64_t p1 = static_cast<std::uint64_t>(kPhiloxM1) * c[2];
    std::array<std::uint32_t, 4> out;
    out[0] = static_cast<std::uint32_t>(p1 >> 32) ^ c[1] ^ k[0];
    out[1] = static_cast<std::uint32_t>(p1);
    out[2] = static_cast<std::uint32_t>(p0 >> 32) ^ c[3] ^ k[1];
    out[3] = static_cast<std::uint32_t>(p0);
    c = out;
}

}  // namespace

std::array<std::uint32_t, 4> Philox4x32::block(std::array<std::uint32_t, 2> key,
                                               std::array<std::uint32_t, 4> counter) {
    for (int round = 0; round < 10; ++round) {
        philox_round(counter, key);
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return counter;
}

double NoiseStream::normal(std::uint64_t step) const {
    const std::uint64_t block_index = step >> 1;
    auto words = Philox4x32::block(
        {static_cast<std::uint32_t>(seed_), static_cast<std::uint32_t>(seed_ >> 32)},
        {static_cast<std::uint32_t>(block_index), static_cast<std::uint32_t>(block_index >> 32),
         static_cast<std::uint32_t>(path_), static_cast<std::uint32_t>(path_ >> 32)});
    std::uint64_t a = (static_cast<std::uint64_t>(words[0]) << 32) | words[1];
    std::uint64_t b = (static_cast<std::uint64_t>(words[2]) << 32) | words[3];
    // u1 in (0, 1], u2 in [0, 1).
    double u1 = (static_cast<double>(a >> 11) + 1.0) * 0x1p-53;
    double u2 = static_cast<double>(b >> 11) * 0x1p-53;
    double r = std::sqrt(-2.0 * std::log(u1));
    double theta = 2.0 * std::numbers::pi * u2;
    return (step & 1u) == 0 ? r * std::cos(theta) : r * std::sin(theta);
}

std::vector<double> brownian_path(const NoiseStream& stream, double dt, std::size_t steps) {
    std::vector<double> w(steps + 1, 0.0);
    const double root_dt = std::sqrt(dt);
    for (std::size_t k = 0; k < steps; ++k) w[k + 1] = w[k] + root_dt * stream.normal(k);
    return w;
}

}  // namespace sde1d
