#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace fermigas {

/// Points are stored with three coordinates; 2-d code ignores the last one.
using Point = std::array<double, 3>;

inline constexpr double kPi = 3.14159265358979323846264338327950288;

// ---------------------------------------------------------------------------
// Error taxonomy. ConfigError marks unusable input (CLI exit 2); everything
// derived from NumericError marks a failure while computing (CLI exit 3).
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct NumericError : Error {
    using Error::Error;
};

#define FERMIGAS_DEFINE_ERROR(NAME, BASE)                                      \
    struct NAME : BASE {                                                       \
        explicit NAME(const std::string& what_arg)                             \
            : BASE(std::string(#NAME) + ": " + what_arg) {}                    \
    }

FERMIGAS_DEFINE_ERROR(EmptyInterior, NumericError);
FERMIGAS_DEFINE_ERROR(DisconnectedMask, NumericError);
FERMIGAS_DEFINE_ERROR(EmptyErosion, NumericError);
FERMIGAS_DEFINE_ERROR(IndexOutOfRange, NumericError);
FERMIGAS_DEFINE_ERROR(NoConvergence, NumericError);
FERMIGAS_DEFINE_ERROR(KTooLarge, NumericError);
FERMIGAS_DEFINE_ERROR(NTooLarge, NumericError);
FERMIGAS_DEFINE_ERROR(GridMismatch, NumericError);
FERMIGAS_DEFINE_ERROR(LatticeMismatch, NumericError);
FERMIGAS_DEFINE_ERROR(KindMismatch, NumericError);
FERMIGAS_DEFINE_ERROR(NyquistViolation, NumericError);
FERMIGAS_DEFINE_ERROR(InsufficientSpectrum, NumericError);
FERMIGAS_DEFINE_ERROR(DimensionUnsupported, NumericError);
FERMIGAS_DEFINE_ERROR(TailBoundExceeded, NumericError);
FERMIGAS_DEFINE_ERROR(LambdaBeyondComputed, NumericError);
FERMIGAS_DEFINE_ERROR(OrderUnsupported, NumericError);
FERMIGAS_DEFINE_ERROR(ArgumentUnsupported, NumericError);

#undef FERMIGAS_DEFINE_ERROR

// ---------------------------------------------------------------------------
// FNV-1a content hashing, used for cache keys and run manifests.
// ---------------------------------------------------------------------------

inline std::uint64_t fnv1a64(const void* data, std::size_t len,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    const auto* p = static_cast<const unsigned char*>(data);
    std::uint64_t h = seed;
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ull;
    }
    return h;
}

inline std::uint64_t fnv1a64(const std::string& s,
                             std::uint64_t seed = 0xcbf29ce484222325ull) {
    return fnv1a64(s.data(), s.size(), seed);
}

inline std::string hex64(std::uint64_t h) {
    static const char* digits = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

}  // namespace fermigas
