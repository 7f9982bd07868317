#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace sde1d {

/// Philox-4x32-10 counter-based block generator (Salmon et al.). Stateless:
/// every block is a pure function of (key, counter), so any (path, step)
/// sample can be produced independently of execution order.
struct Philox4x32 {
    static std::array<std::uint32_t, 4> block(std::array<std::uint32_t, 2> key,
                                              std::array<std::uint32_t, 4> counter);
};

/// Gaussian increments for one simulated path, keyed by
/// (master_seed, path_index, step_index). Deterministic and schedulable in
/// any order; two streams with different path indices never overlap.
class NoiseStream {
public:
    NoiseStream(std::uint64_t master_seed, std::uint64_t path_index)
        : seed_(master_seed), path_(path_index) {}

    /// Standard normal draw for step k (Box-Muller on a Philox block; each
    /// block yields the pair for steps 2j and 2j+1).
    double normal(std::uint64_t step) const;

    std::uint64_t seed() const { return seed_; }
    std::uint64_t path_index() const { return path_; }

private:
    std::uint64_t seed_;
    std::uint64_t path_;
};

/// Brownian grid W_0 = 0, W_{k+1} = W_k + sqrt(dt) N_k over `steps` steps.
std::vector<double> brownian_path(const NoiseStream& stream, double dt, std::size_t steps);

}  // namespace sde1d
