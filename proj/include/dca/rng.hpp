#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <span>

namespace dca {

// Counter-based Philox4x32-10 generator. Each (seed, stream, domain) triple
// names an independent stream whose output does not depend on how other
// streams are scheduled, which is what makes multi-threaded graph builds
// bit-reproducible.
class Philox4x32 {
public:
    // Stream domains keep vertex ray streams, query ray streams and the
    // synthetic-data generator from ever colliding under one seed.
    static constexpr std::uint32_t kVertexDomain = 0x44434130u;
    static constexpr std::uint32_t kQueryDomain = 0x44434131u;
    static constexpr std::uint32_t kSynthDomain = 0x44434132u;

    Philox4x32(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain)
        : key0_(static_cast<std::uint32_t>(seed)),
          key1_(static_cast<std::uint32_t>(seed >> 32)),
          stream_lo_(static_cast<std::uint32_t>(stream)),
          stream_hi_(static_cast<std::uint32_t>(stream >> 32) ^ domain) {}

    std::array<std::uint32_t, 4> next_block() {
        const std::uint32_t c0 = static_cast<std::uint32_t>(block_index_);
        const std::uint32_t c1 = static_cast<std::uint32_t>(block_index_ >> 32);
        ++block_index_;
        return scramble(c0, c1, stream_lo_, stream_hi_, key0_, key1_);
    }

    // Two doubles in (0, 1] per block.
    std::array<double, 2> next_uniform2() {
        const auto b = next_block();
        const std::uint64_t a = (static_cast<std::uint64_t>(b[0]) << 32) | b[1];
        const std::uint64_t c = (static_cast<std::uint64_t>(b[2]) << 32) | b[3];
        constexpr double scale = 0x1.0p-53;
        return {static_cast<double>((a >> 11) + 1) * scale,
                static_cast<double>((c >> 11) + 1) * scale};
    }

private:
    static std::array<std::uint32_t, 4> scramble(std::uint32_t c0, std::uint32_t c1,
                                                 std::uint32_t c2, std::uint32_t c3,
                                                 std::uint32_t k0, std::uint32_t k1) {
        constexpr std::uint64_t m0 = 0xD2511F53ull;
        constexpr std::uint64_t m1 = 0xCD9E8D57ull;
        for (int round = 0; round < 10; ++round) {
            const std::uint64_t p0 = m0 * c0;
            const std::uint64_t p1 = m1 * c2;
            const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32);
            const std::uint32_t lo0 = static_cast<std::uint32_t>(p0);
            const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32);
            const std::uint32_t lo1 = static_cast<std::uint32_t>(p1);
            c0 = hi1 ^ c1 ^ k0;
            c1 = lo1;
            c2 = hi0 ^ c3 ^ k1;
            c3 = lo0;
            k0 += 0x9E3779B9u;
            k1 += 0xBB67AE85u;
        }
        return {c0, c1, c2, c3};
    }

    std::uint32_t key0_;
    std::uint32_t key1_;
    std::uint32_t stream_lo_;
    std::uint32_t stream_hi_;
    std::uint64_t block_index_ = 0;
};

// Sequential stream of standard normals (Box-Muller over Philox uniforms).
class GaussianStream {
public:
    GaussianStream(std::uint64_t seed, std::uint64_t stream, std::uint32_t domain)
        : rng_(seed, stream, domain) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const auto u = rng_.next_uniform2();
        const double radius = std::sqrt(-2.0 * std::log(u[0]));
        const double angle = 2.0 * pi() * u[1];
        spare_ = radius * std::sin(angle);
        have_spare_ = true;
        return radius * std::cos(angle);
    }

    void fill(std::span<double> out) {
        for (double& v : out) v = next();
    }

    // Uniform direction on the unit sphere; redraws the measure-zero
    // near-degenerate samples.
    void fill_unit_direction(std::span<double> out) {
        for (;;) {
            double norm_sq = 0.0;
            for (double& v : out) {
                v = next();
                norm_sq += v * v;
            }
            const double norm = std::sqrt(norm_sq);
            if (norm > 1e-12) {
                for (double& v : out) v /= norm;
                return;
            }
        }
    }

    double uniform() { return rng_.next_uniform2()[0]; }

private:
    static constexpr double pi() { return 3.14159265358979323846; }

    Philox4x32 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace dca
