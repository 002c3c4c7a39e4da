#include "qsdr/rng.hpp"

#include <cmath>

#include "qsdr/stats.hpp"

namespace qsdr {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
}

std::uint64_t mix64(std::uint64_t x) {
    x += kGolden;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

CounterRng CounterRng::substream(std::uint64_t seed, std::uint64_t stream) {
    return CounterRng(mix64(seed ^ mix64(stream)));
}

std::uint64_t CounterRng::next_u64() { return mix64(key_ + kGolden * (++counter_)); }

double CounterRng::next_uniform() {
    // 53-bit mantissa shifted into the open interval
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_normal() { return normal_inv_cdf(next_uniform()); }

double CounterRng::next_t3_scaled() {
    double num = next_normal();
    double a = next_normal();
    double b = next_normal();
    double c = next_normal();
    double chi3 = a * a + b * b + c * c;
    return num / std::sqrt(chi3 / 3.0) / std::sqrt(3.0);
}

double CounterRng::next_chisq1() {
    double z = next_normal();
    return z * z;
}

}  // namespace qsdr
