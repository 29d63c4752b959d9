#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "fairspec/kernels.hpp"
#include "fairspec/rng.hpp"

namespace fk = fairspec::kernels;

namespace {

std::vector<double> random_vec(fairspec::RandomStream& rng, std::size_t n, double lo, double hi) {
  std::vector<double> v(n);
  for (double& x : v) x = lo + (hi - lo) * rng.uniform_open();
  return v;
}

// Reductions may reassociate under SIMD, so compare with a relative bound.
void expect_close(double a, double b) { EXPECT_NEAR(a, b, 1e-12 * (1.0 + std::abs(a))); }

}  // namespace

TEST(Kernels, ScalarTableBasics) {
  const auto& k = fk::scalar_table();
  const std::vector<double> a{1, 2, 3}, b{3, 1, 0.5};
  EXPECT_DOUBLE_EQ(k.sum(a.data(), 3), 6.0);
  EXPECT_DOUBLE_EQ(k.dot(a.data(), b.data(), 3), 6.5);
  EXPECT_DOUBLE_EQ(k.min_sum(a.data(), b.data(), 3), 2.5);
  std::vector<double> out(3);
  EXPECT_DOUBLE_EQ(k.positive_diff(a.data(), b.data(), out.data(), 3), 3.5);
  EXPECT_EQ(out, (std::vector<double>{0, 1, 2.5}));
  k.reciprocal(b.data(), out.data(), 3);
  EXPECT_EQ(out, (std::vector<double>{1.0 / 3.0, 1.0, 2.0}));
}

TEST(Kernels, ActiveIsaFallsBackWhenUnavailable) {
  const fk::Isa prev = fk::active_isa();
  const fk::Isa got = fk::set_active_isa(fk::Isa::kAvx2);
  EXPECT_EQ(got == fk::Isa::kAvx2, fk::avx2_table() != nullptr);
  EXPECT_EQ(fk::set_active_isa(fk::Isa::kScalar), fk::Isa::kScalar);
  fk::set_active_isa(prev);
}

TEST(Kernels, Avx2MatchesScalar) {
  const fk::KernelTable* simd = fk::avx2_table();
  if (simd == nullptr) GTEST_SKIP() << "AVX2 not available on this host";
  const auto& ref = fk::scalar_table();
  fairspec::RandomStream rng(42);
  for (std::size_t n : {0u, 1u, 3u, 4u, 5u, 7u, 8u, 9u, 15u, 16u, 17u, 31u, 64u, 1000u}) {
    const auto a = random_vec(rng, n, -2.0, 2.0);
    const auto b = random_vec(rng, n, 0.1, 3.0);
    const auto r = random_vec(rng, n, 0.0, 1.0);
    expect_close(simd->sum(a.data(), n), ref.sum(a.data(), n));
    expect_close(simd->dot(a.data(), b.data(), n), ref.dot(a.data(), b.data(), n));
    expect_close(simd->min_sum(a.data(), b.data(), n), ref.min_sum(a.data(), b.data(), n));

    std::vector<double> o1(n), o2(n);
    expect_close(simd->positive_diff(a.data(), b.data(), o1.data(), n),
                 ref.positive_diff(a.data(), b.data(), o2.data(), n));
    EXPECT_EQ(o1, o2);

    simd->scale(a.data(), 0.37, o1.data(), n);
    ref.scale(a.data(), 0.37, o2.data(), n);
    EXPECT_EQ(o1, o2);

    simd->reciprocal(b.data(), o1.data(), n);
    ref.reciprocal(b.data(), o2.data(), n);
    EXPECT_EQ(o1, o2);

    std::vector<double> y1 = b, y2 = b;
    simd->axpy(-1.5, a.data(), y1.data(), n);
    ref.axpy(-1.5, a.data(), y2.data(), n);
    for (std::size_t i = 0; i < n; ++i) expect_close(y1[i], y2[i]);

    y1 = b;
    y2 = b;
    simd->lerp(y1.data(), a.data(), 0.25, n);
    ref.lerp(y2.data(), a.data(), 0.25, n);
    for (std::size_t i = 0; i < n; ++i) expect_close(y1[i], y2[i]);

    simd->min_plus_scaled(a.data(), b.data(), r.data(), 0.4, o1.data(), n);
    ref.min_plus_scaled(a.data(), b.data(), r.data(), 0.4, o2.data(), n);
    for (std::size_t i = 0; i < n; ++i) expect_close(o1[i], o2[i]);
  }
}

TEST(Kernels, SpanWrappersUseActiveTable) {
  const std::vector<double> x{0.5, 0.25, 0.25};
  EXPECT_DOUBLE_EQ(fk::sum(x), 1.0);
  std::vector<double> y{1, 1, 1};
  fk::axpy(2.0, x, y);
  EXPECT_EQ(y, (std::vector<double>{2.0, 1.5, 1.5}));
}
