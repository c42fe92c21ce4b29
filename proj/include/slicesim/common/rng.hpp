#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace slicesim {

/// Independent pseudo-random stream derived from (scenario seed, stream name).
///
/// Every stochastic source in a run owns one of these, so adding or reordering
/// sources never perturbs the draws of another. The uniform and exponential
/// transforms are written out here rather than taken from <random>
/// distributions, whose outputs are not pinned by the standard.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::string_view name);

    /// Uniform on [0, 1).
    double uniform();
    /// Exponential with the given rate (mean 1/rate).
    double exponential(double rate);
    bool bernoulli(double p);

private:
    std::mt19937_64 engine_;
};

std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view name);

}  // namespace slicesim
