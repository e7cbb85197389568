#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace monolasso {

/// Seeded source of uniform and Gaussian deviates. The engine (mt19937_64) has a
/// standardized output sequence and the Gaussian transform is implemented here rather
/// than through std::normal_distribution, so draws are identical across standard
/// libraries. Bump kName whenever the draw sequence changes.
class Rng {
public:
    static constexpr std::string_view kName = "mt19937_64+box-muller/v1";

    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform on the open interval (0, 1).
    double uniform() {
        // 53 random mantissa bits, shifted off zero.
        return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    }

    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double radius = std::sqrt(-2.0 * std::log(uniform()));
        const double angle = 2.0 * std::numbers::pi * uniform();
        spare_ = radius * std::sin(angle);
        has_spare_ = true;
        return radius * std::cos(angle);
    }

    std::uint64_t bits() { return engine_(); }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace monolasso
