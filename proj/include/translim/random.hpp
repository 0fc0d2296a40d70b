#pragma once

#include <array>
#include <cstdint>

namespace translim {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11).
//
// The 64-bit seed is the key and the 64-bit stream id fills the upper half
// of the counter, so every (seed, stream) pair is an independent sequence
// that does not depend on how many draws other streams consumed. Output is
// identical on every platform.
class PhiloxEngine {
public:
    using result_type = std::uint64_t;
    using block_type = std::array<std::uint32_t, 4>;
    using key_type = std::array<std::uint32_t, 2>;

    PhiloxEngine(std::uint64_t seed, std::uint64_t stream) noexcept;

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    result_type operator()() noexcept;

    // Uniform on (0, 1), never exactly 0 or 1.
    double uniform_open() noexcept;

    // The raw 10-round bijection, exposed for known-answer tests.
    static block_type bijection(block_type counter, key_type key) noexcept;

private:
    void refill() noexcept;

    key_type key_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    block_type buffer_{};
    int used_ = 4;
};

}  // namespace translim
