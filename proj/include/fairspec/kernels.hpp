#pragma once

// Data-parallel inner loops shared by the token model, the schedulers and the
// goodput-region oracles. Every routine has a scalar reference implementation
// and, on x86-64, an AVX2 variant selected once at runtime from CPUID.
// The two variants agree to within floating-point reassociation; see
// tests/test_kernels.cpp.

#include <cstddef>
#include <span>
#include <string_view>

namespace fairspec::kernels {

enum class Isa { kScalar, kAvx2 };

std::string_view isa_name(Isa isa) noexcept;

/// Best ISA supported by both the build and the running CPU.
Isa detected_isa() noexcept;

/// ISA currently used by the dispatching entry points below.
Isa active_isa() noexcept;

/// Force a variant (tests, benchmarks). Requests for an unsupported ISA fall
/// back to scalar; the ISA actually selected is returned.
Isa set_active_isa(Isa isa) noexcept;

/// Table of kernel entry points. One table per ISA.
struct KernelTable {
  double (*sum)(const double* x, std::size_t n);
  double (*dot)(const double* a, const double* b, std::size_t n);
  // sum_i min(a_i, b_i)
  double (*min_sum)(const double* a, const double* b, std::size_t n);
  // out_i = max(0, a_i - b_i); returns sum_i out_i
  double (*positive_diff)(const double* a, const double* b, double* out, std::size_t n);
  // out_i = c * x_i
  void (*scale)(const double* x, double c, double* out, std::size_t n);
  // y_i += c * x_i
  void (*axpy)(double c, const double* x, double* y, std::size_t n);
  // x_i = (1 - t) * x_i + t * v_i
  void (*lerp)(double* x, const double* v, double t, std::size_t n);
  // out_i = 1 / x_i
  void (*reciprocal)(const double* x, double* out, std::size_t n);
  // out_i = min(a_i, b_i) + c * r_i
  void (*min_plus_scaled)(const double* a, const double* b, const double* r, double c,
                          double* out, std::size_t n);
};

const KernelTable& scalar_table() noexcept;
/// nullptr when the AVX2 variant was not compiled in.
const KernelTable* avx2_table() noexcept;
const KernelTable& table_for(Isa isa) noexcept;

// Dispatching wrappers over spans. Sizes of paired spans must match.
double sum(std::span<const double> x) noexcept;
double dot(std::span<const double> a, std::span<const double> b) noexcept;
double min_sum(std::span<const double> a, std::span<const double> b) noexcept;
double positive_diff(std::span<const double> a, std::span<const double> b,
                     std::span<double> out) noexcept;
void scale(std::span<const double> x, double c, std::span<double> out) noexcept;
void axpy(double c, std::span<const double> x, std::span<double> y) noexcept;
void lerp(std::span<double> x, std::span<const double> v, double t) noexcept;
void reciprocal(std::span<const double> x, std::span<double> out) noexcept;
void min_plus_scaled(std::span<const double> a, std::span<const double> b,
                     std::span<const double> r, double c, std::span<double> out) noexcept;

}  // namespace fairspec::kernels
