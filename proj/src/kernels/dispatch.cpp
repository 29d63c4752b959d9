#include <atomic>
#include <cassert>

#include "kernels/kernels_internal.hpp"

namespace fairspec::kernels {
namespace {

bool cpu_has_avx2() noexcept {
#if defined(FAIRSPEC_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
  __builtin_cpu_init();
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

std::atomic<const KernelTable*>& active_table() noexcept {
  static std::atomic<const KernelTable*> table{&table_for(detected_isa())};
  return table;
}

const KernelTable& k() noexcept { return *active_table().load(std::memory_order_relaxed); }

}  // namespace

std::string_view isa_name(Isa isa) noexcept {
  switch (isa) {
    case Isa::kAvx2:
      return "avx2";
    case Isa::kScalar:
      break;
  }
  return "scalar";
}

Isa detected_isa() noexcept {
  static const Isa isa = cpu_has_avx2() ? Isa::kAvx2 : Isa::kScalar;
  return isa;
}

const KernelTable& scalar_table() noexcept { return detail::scalar_kernels(); }

const KernelTable* avx2_table() noexcept {
#if defined(FAIRSPEC_HAVE_AVX2)
  return cpu_has_avx2() ? &detail::avx2_kernels() : nullptr;
#else
  return nullptr;
#endif
}

const KernelTable& table_for(Isa isa) noexcept {
  if (isa == Isa::kAvx2) {
    if (const KernelTable* t = avx2_table()) return *t;
  }
  return scalar_table();
}

Isa active_isa() noexcept { return &k() == &scalar_table() ? Isa::kScalar : Isa::kAvx2; }

Isa set_active_isa(Isa isa) noexcept {
  const KernelTable& t = table_for(isa);
  active_table().store(&t, std::memory_order_relaxed);
  return &t == &scalar_table() ? Isa::kScalar : Isa::kAvx2;
}

double sum(std::span<const double> x) noexcept { return k().sum(x.data(), x.size()); }

double dot(std::span<const double> a, std::span<const double> b) noexcept {
  assert(a.size() == b.size());
  return k().dot(a.data(), b.data(), a.size());
}

double min_sum(std::span<const double> a, std::span<const double> b) noexcept {
  assert(a.size() == b.size());
  return k().min_sum(a.data(), b.data(), a.size());
}

double positive_diff(std::span<const double> a, std::span<const double> b,
                     std::span<double> out) noexcept {
  assert(a.size() == b.size() && out.size() == a.size());
  return k().positive_diff(a.data(), b.data(), out.data(), a.size());
}

void scale(std::span<const double> x, double c, std::span<double> out) noexcept {
  assert(out.size() == x.size());
  k().scale(x.data(), c, out.data(), x.size());
}

void axpy(double c, std::span<const double> x, std::span<double> y) noexcept {
  assert(x.size() == y.size());
  k().axpy(c, x.data(), y.data(), x.size());
}

void lerp(std::span<double> x, std::span<const double> v, double t) noexcept {
  assert(x.size() == v.size());
  k().lerp(x.data(), v.data(), t, x.size());
}

void reciprocal(std::span<const double> x, std::span<double> out) noexcept {
  assert(out.size() == x.size());
  k().reciprocal(x.data(), out.data(), x.size());
}

void min_plus_scaled(std::span<const double> a, std::span<const double> b,
                     std::span<const double> r, double c, std::span<double> out) noexcept {
  assert(a.size() == b.size() && r.size() == a.size() && out.size() == a.size());
  k().min_plus_scaled(a.data(), b.data(), r.data(), c, out.data(), a.size());
}

}  // namespace fairspec::kernels
