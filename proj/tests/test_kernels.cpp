#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "tomolab/errors.hpp"
#include "tomolab/kernels.hpp"

using namespace tomolab;
using namespace tomolab::kernels;

namespace {

std::vector<double> randv(std::size_t n, std::mt19937_64& g, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  std::vector<double> v(n);
  for (auto& x : v) x = u(g);
  return v;
}

// Relative agreement allowing for FMA contraction and reassociation.
bool close(double a, double b, double scale) { return std::abs(a - b) <= 1e-13 * std::max(1.0, scale); }

// Tables to compare against the scalar reference: the AVX2 table when this
// CPU has it, and whatever active() picked.
std::vector<const KernelTable*> candidates() {
  std::vector<const KernelTable*> out{&active()};
  if (const KernelTable* t = avx2_table()) out.push_back(t);
  return out;
}

}  // namespace

TEST_SUITE("kernels") {

TEST_CASE("scalar reference against plain loops") {
  std::mt19937_64 g(1);
  const auto& s = scalar_table();
  const auto rows = randv(7 * 5, g), v = randv(5, g);
  std::vector<double> out(7);
  s.dot_rows(rows.data(), 7, 5, v.data(), out.data());
  for (int i = 0; i < 7; ++i) {
    double acc = 0.0;
    for (int j = 0; j < 5; ++j) acc += rows[i * 5 + j] * v[j];
    CHECK(out[i] == acc);
  }
  std::vector<double> w = {1, 2, 3}, l = {0.5, 0.25, 2};
  CHECK(s.multiply_sum(w.data(), l.data(), 3) == 7.0);
  CHECK(w == std::vector<double>{0.5, 0.5, 6});
  CHECK(s.sum_squares(l.data(), 3) == 0.25 + 0.0625 + 4);
}

TEST_CASE("vector variants agree with the scalar reference") {
  std::mt19937_64 g(2);
  const auto& ref = scalar_table();
  for (const KernelTable* t : candidates()) {
    CAPTURE(t->name);
    for (std::size_t d : {1, 2, 3, 4, 5, 8, 9, 16, 17, 81}) {
      for (std::size_t n : {0, 1, 3, 4, 5, 31, 257}) {
        const auto rows = randv(n * d, g), v = randv(d, g), w = randv(n, g, 0.0, 1.0), l = randv(n, g, 0.0, 1.0);
        std::vector<double> a(n), b(n);
        ref.dot_rows(rows.data(), n, d, v.data(), a.data());
        t->dot_rows(rows.data(), n, d, v.data(), b.data());
        for (std::size_t i = 0; i < n; ++i) REQUIRE(close(a[i], b[i], static_cast<double>(d)));

        std::vector<double> ws = w, wv = w;
        const double ts = ref.multiply_sum(ws.data(), l.data(), n);
        const double tv = t->multiply_sum(wv.data(), l.data(), n);
        CHECK(close(ts, tv, static_cast<double>(n)));
        for (std::size_t i = 0; i < n; ++i) REQUIRE(ws[i] == wv[i]);

        std::vector<double> xs = w, xv = w;
        ref.scale(xs.data(), n, 1.7);
        t->scale(xv.data(), n, 1.7);
        CHECK(xs == xv);

        CHECK(close(ref.sum_squares(w.data(), n), t->sum_squares(w.data(), n), static_cast<double>(n)));

        std::vector<double> os(d), ov(d);
        ref.weighted_row_sum(rows.data(), n, d, w.data(), os.data());
        t->weighted_row_sum(rows.data(), n, d, w.data(), ov.data());
        for (std::size_t j = 0; j < d; ++j) REQUIRE(close(os[j], ov[j], static_cast<double>(n)));
      }
    }
  }
}

TEST_CASE("span wrappers check shapes") {
  std::vector<double> rows(12), v(4), out(3), bad(2);
  CHECK_NOTHROW(dot_rows(rows, 4, v, out));
  CHECK_THROWS_AS(dot_rows(rows, 4, bad, out), DimensionMismatch);
  CHECK_THROWS_AS(dot_rows(rows, 3, std::vector<double>(3), out), DimensionMismatch);
  CHECK_THROWS_AS(multiply_sum(out, bad), DimensionMismatch);
  CHECK_THROWS_AS(weighted_row_sum(rows, 4, out, bad), DimensionMismatch);
}

TEST_CASE("dispatch honours the override") {
  const char* forced = std::getenv("TOMOLAB_SIMD");
  if (forced && std::string(forced) == "scalar") {
    CHECK(std::string(active().name) == "scalar");
  } else if (avx2_table()) {
    CHECK(std::string(active().name) == "avx2");
  } else {
    CHECK(std::string(active().name) == "scalar");
  }
}

}  // TEST_SUITE
