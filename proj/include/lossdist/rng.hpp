#pragma once

#include <array>
#include <cstdint>

namespace lossdist {

// Philox4x32-10 counter-based generator (Salmon et al., SC 2011). A block is a
// pure function of (key, counter), so any draw can be produced independently
// of execution order; that is what makes simulation output reproducible under
// arbitrary batching.
inline std::array<std::uint32_t, 4> philox4x32_block(std::array<std::uint32_t, 4> ctr,
                                                     std::array<std::uint32_t, 2> key) {
    constexpr std::uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u;
    constexpr std::uint32_t W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
    for (int round = 0; round < 10; ++round) {
        const std::uint64_t p0 = static_cast<std::uint64_t>(M0) * ctr[0];
        const std::uint64_t p1 = static_cast<std::uint64_t>(M1) * ctr[2];
        const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
        const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
        const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
        const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += W0;
        key[1] += W1;
    }
    return ctr;
}

// Block addressed by a 64-bit key and a 128-bit (hi, lo) counter.
inline std::array<std::uint32_t, 4> philox4x32(std::uint64_t key, std::uint64_t hi,
                                               std::uint64_t lo) {
    return philox4x32_block(
        {static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
         static_cast<std::uint32_t>(hi), static_cast<std::uint32_t>(hi >> 32)},
        {static_cast<std::uint32_t>(key), static_cast<std::uint32_t>(key >> 32)});
}

// Uniform draw on the open interval (0,1): 53 bits from the first two output
// words, shifted off the endpoints so downstream quantile transforms are safe.
inline double uniform_open01(std::uint64_t key, std::uint64_t hi, std::uint64_t lo) {
    const auto b = philox4x32(key, hi, lo);
    const std::uint64_t a = (static_cast<std::uint64_t>(b[0] >> 5) << 26) | (b[1] >> 6);
    return (static_cast<double>(a) + 0.5) * 0x1.0p-53;
}

} // namespace lossdist
