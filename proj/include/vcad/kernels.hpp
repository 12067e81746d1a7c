#pragma once

// Vector distance kernels. The scalar versions are the reference; SIMD
// variants are selected once per process from the host's capabilities.

#include <span>
#include <string_view>

namespace vcad::kernels {

enum class Isa { Scalar, Avx2, Neon };

/// Sum of squared component differences. Spans must have equal length.
double squared_distance(std::span<const double> a, std::span<const double> b);

/// Euclidean distance, sqrt of squared_distance.
double distance(std::span<const double> a, std::span<const double> b);

/// ISA used by the dispatched entry points.
Isa active_isa() noexcept;
std::string_view isa_name(Isa isa) noexcept;

namespace scalar {
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
}

#if defined(__x86_64__) || defined(_M_X64)
namespace avx2 {
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
}
#endif

#if defined(__aarch64__)
namespace neon {
double squared_distance(const double* a, const double* b, std::size_t n) noexcept;
}
#endif

/// Whether `isa` can run on this host.
bool supported(Isa isa) noexcept;

/// Runs the kernel for an explicit ISA; used by equivalence tests.
double squared_distance_with(Isa isa, std::span<const double> a, std::span<const double> b);

}  // namespace vcad::kernels
