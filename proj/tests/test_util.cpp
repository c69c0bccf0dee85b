#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <vector>

#include "glosskit/error.hpp"
#include "glosskit/parallel.hpp"
#include "glosskit/rng.hpp"
#include "glosskit/text.hpp"

using namespace glosskit;

TEST_CASE("splitmix64 matches the reference sequence") {
  SplitMix64 rng(0);
  CHECK(rng.next() == 0xE220A8397B1DCDAFULL);
  CHECK(rng.next() == 0x6E789E6AA1B965F4ULL);
  CHECK(rng.next() == 0x06C45D188009454FULL);

  SplitMix64 rng42(42);
  CHECK(rng42.next() == 0xBDD732262FEB6E95ULL);
  CHECK(rng42.next() == 0x28EFE333B266F103ULL);

  SplitMix64 rng1(1);
  CHECK(rng1.next() == 0x910A2DEC89025CC1ULL);
}

TEST_CASE("splitmix64 next_double lands in [0,1)") {
  SplitMix64 rng(0);
  double first = rng.next_double();
  CHECK(first == doctest::Approx(0.88331080821364261).epsilon(1e-15));
  SplitMix64 rng2(123);
  for (int i = 0; i < 10000; ++i) {
    double x = rng2.next_double();
    CHECK(x >= 0.0);
    CHECK(x < 1.0);
  }
}

TEST_CASE("splitmix64 gaussian has roughly standard moments") {
  SplitMix64 rng(7);
  const int n = 100000;
  double sum = 0.0, sumsq = 0.0;
  for (int i = 0; i < n; ++i) {
    double x = rng.next_gaussian();
    sum += x;
    sumsq += x * x;
  }
  double mean = sum / n;
  double var = sumsq / n - mean * mean;
  CHECK(std::abs(mean) < 0.02);
  CHECK(std::abs(var - 1.0) < 0.03);

  SplitMix64 a(9), b(9);
  for (int i = 0; i < 100; ++i) CHECK(a.next_gaussian() == b.next_gaussian());
}

TEST_CASE("fisher_yates_shuffle is the pinned permutation") {
  std::vector<int> v{0, 1, 2, 3, 4};
  fisher_yates_shuffle(v, 7);
  CHECK(v == std::vector<int>{4, 1, 3, 0, 2});

  std::vector<int> w(8);
  std::iota(w.begin(), w.end(), 0);
  fisher_yates_shuffle(w, 1);
  CHECK(w == std::vector<int>{4, 3, 2, 7, 5, 6, 0, 1});

  std::vector<std::string> s{"a", "b", "c"};
  fisher_yates_shuffle(s, 3);
  CHECK(s == std::vector<std::string>{"c", "b", "a"});
}

TEST_CASE("fisher_yates_shuffle permutes and is seed-stable") {
  std::vector<int> v(200);
  std::iota(v.begin(), v.end(), 0);
  auto once = v;
  fisher_yates_shuffle(once, 99);
  auto twice = v;
  fisher_yates_shuffle(twice, 99);
  CHECK(once == twice);

  auto sorted = once;
  std::sort(sorted.begin(), sorted.end());
  CHECK(sorted == v);

  auto other = v;
  fisher_yates_shuffle(other, 100);
  CHECK(other != once);

  std::vector<int> empty;
  fisher_yates_shuffle(empty, 1);
  CHECK(empty.empty());
  std::vector<int> one{42};
  fisher_yates_shuffle(one, 1);
  CHECK(one == std::vector<int>{42});
}

TEST_CASE("parallel_for covers every index exactly once") {
  for (int workers : {1, 2, 3, 8}) {
    for (size_t n : {size_t{0}, size_t{1}, size_t{7}, size_t{100}}) {
      std::vector<int> hits(n, 0);
      parallel_for(n, workers, [&](size_t lo, size_t hi) {
        for (size_t i = lo; i < hi; ++i) ++hits[i];
      });
      for (size_t i = 0; i < n; ++i) CHECK(hits[i] == 1);
    }
  }
}

TEST_CASE("parallel_for propagates worker exceptions") {
  CHECK_THROWS_AS(parallel_for(10, 4,
                               [](size_t lo, size_t) {
                                 if (lo == 0) throw_data("boom");
                               }),
                  Error);
}

TEST_CASE("tokenize_ws splits on blanks, tabs and carriage returns") {
  CHECK(tokenize_ws("a b\tc") == std::vector<std::string>{"a", "b", "c"});
  CHECK(tokenize_ws("  a   b  ") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_ws("a b\r") == std::vector<std::string>{"a", "b"});
  CHECK(tokenize_ws("").empty());
  CHECK(tokenize_ws(" \t ").empty());
}

TEST_CASE("join_ws is the inverse of tokenize_ws on clean input") {
  std::vector<std::string> toks{"x", "y", "z"};
  CHECK(join_ws(toks) == "x y z");
  CHECK(join_ws({}) == "");
  CHECK(tokenize_ws(join_ws(toks)) == toks);
}

TEST_CASE("error categories stringify") {
  CHECK(std::string(to_string(ErrorCategory::kIo)) == "io");
  CHECK(std::string(to_string(ErrorCategory::kFormat)) == "format");
  CHECK(std::string(to_string(ErrorCategory::kConfig)) == "config");
  CHECK(std::string(to_string(ErrorCategory::kData)) == "data");

  try {
    throw_config("bad knob");
  } catch (const Error& e) {
    CHECK(e.category() == ErrorCategory::kConfig);
    CHECK(std::string(e.what()) == "bad knob");
  }
}
