#include "vcad/kernels.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>

namespace vcad::kernels {

namespace scalar {
double squared_distance(const double* a, const double* b, std::size_t n) noexcept {
    double sum = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double d = a[i] - b[i];
        sum += d * d;
    }
    return sum;
}
}  // namespace scalar

namespace {

using Kernel = double (*)(const double*, const double*, std::size_t) noexcept;

Isa detect_isa() noexcept {
#if defined(__x86_64__) || defined(_M_X64)
    __builtin_cpu_init();
    if (__builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma")) {
        return Isa::Avx2;
    }
#elif defined(__aarch64__)
    return Isa::Neon;
#endif
    return Isa::Scalar;
}

Kernel kernel_for(Isa isa) {
    switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
        case Isa::Avx2:
            return &avx2::squared_distance;
#endif
#if defined(__aarch64__)
        case Isa::Neon:
            return &neon::squared_distance;
#endif
        case Isa::Scalar:
            return &scalar::squared_distance;
        default:
            throw std::invalid_argument("kernel ISA not compiled into this build");
    }
}

struct Dispatch {
    Isa isa;
    Kernel fn;
};

const Dispatch& dispatch() {
    static const Dispatch d = [] {
        const Isa isa = detect_isa();
        return Dispatch{isa, kernel_for(isa)};
    }();
    return d;
}

}  // namespace

double squared_distance(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_distance: length mismatch");
    }
    return dispatch().fn(a.data(), b.data(), a.size());
}

double distance(std::span<const double> a, std::span<const double> b) {
    return std::sqrt(squared_distance(a, b));
}

Isa active_isa() noexcept { return dispatch().isa; }

std::string_view isa_name(Isa isa) noexcept {
    switch (isa) {
        case Isa::Avx2:
            return "avx2";
        case Isa::Neon:
            return "neon";
        case Isa::Scalar:
            break;
    }
    return "scalar";
}

bool supported(Isa isa) noexcept {
    if (isa == Isa::Scalar) {
        return true;
    }
    return detect_isa() == isa;
}

double squared_distance_with(Isa isa, std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw std::invalid_argument("squared_distance: length mismatch");
    }
    if (!supported(isa)) {
        throw std::invalid_argument("squared_distance: ISA not supported on this host");
    }
    return kernel_for(isa)(a.data(), b.data(), a.size());
}

}  // namespace vcad::kernels
