#pragma once

#include <cstdint>

namespace qsdr {

/// Counter-based generator: output i is a 64-bit mix of (key, i), so streams
/// are reproducible across platforms and cheap to split. Gaussians come from
/// the inverse normal CDF applied to uniforms, keeping the draw contract
/// identical in any implementation of this generator.
class CounterRng {
public:
    explicit CounterRng(std::uint64_t key) : key_(key) {}

    // Independent stream derived from (seed, stream).
    static CounterRng substream(std::uint64_t seed, std::uint64_t stream);

    std::uint64_t next_u64();

    // uniform on the open interval (0, 1)
    double next_uniform();

    double next_normal();

    // Student t(3) scaled to unit variance: N / sqrt(chi2(3)/3) / sqrt(3)
    double next_t3_scaled();

    // chi-square(1): square of a standard normal
    double next_chisq1();

private:
    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

// 64-bit mix used for key derivation; exposed for deterministic sub-keying.
std::uint64_t mix64(std::uint64_t x);

}  // namespace qsdr
