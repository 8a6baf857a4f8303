#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "mpgame/error.hpp"
#include "mpgame/signal.hpp"

using namespace mpgame;

namespace {

std::filesystem::path temp_file(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / "mpgame_test_signal";
  std::filesystem::create_directories(dir);
  return dir / name;
}

}  // namespace

TEST_CASE("the reference protocol yields 500 signals per source") {
  const auto x = sample_ecological_trace(0.5, 0.1, 0.02, 10.0, {7, kEcologicalStream});
  const auto y = sample_cost_trace(1.0, 0.25, 0.02, 10.0, {7, cost_stream(0)});
  CHECK(x.size() == 500);
  CHECK(y.size() == 500);
  CHECK(x.end_time() == doctest::Approx(10.0));
}

TEST_CASE("non-integral horizons round up") {
  CHECK(sample_ecological_trace(0.0, 1.0, 0.3, 1.0, {1, 0}).size() == 4);
}

TEST_CASE("degenerate noise gives constant traces") {
  const auto x = sample_ecological_trace(0.4, 0.0, 0.1, 2.0, {3, 0});
  for (double v : x.values) CHECK(v == 0.4);
  const auto y = sample_cost_trace(1.25, 0.0, 0.1, 2.0, {3, 1});
  for (double v : y.values) CHECK(v == 1.25);
}

TEST_CASE("sampling is deterministic per (seed, stream)") {
  const auto a = sample_ecological_trace(0.5, 0.1, 0.02, 4.0, {99, 0});
  const auto b = sample_ecological_trace(0.5, 0.1, 0.02, 4.0, {99, 0});
  const auto c = sample_ecological_trace(0.5, 0.1, 0.02, 4.0, {99, 1});
  const auto d = sample_ecological_trace(0.5, 0.1, 0.02, 4.0, {100, 0});
  CHECK(a.values == b.values);
  CHECK(a.values != c.values);
  CHECK(a.values != d.values);
}

TEST_CASE("invalid sampling parameters are rejected") {
  CHECK_THROWS_AS(sample_ecological_trace(0.5, -0.1, 0.02, 1.0, {}), Error);
  CHECK_THROWS_AS(sample_cost_trace(1.0, -1.0, 0.02, 1.0, {}), Error);
  CHECK_THROWS_AS(sample_cost_trace(1.0, 1.0, 0.0, 1.0, {}), Error);
  CHECK_THROWS_AS(sample_cost_trace(1.0, 1.0, 0.1, -1.0, {}), Error);
}

TEST_CASE("cost signal mean obeys the law of large numbers") {
  const double tau = 1.5, R = 0.25;
  const auto y = sample_cost_trace(tau, R, 1.0, 1e5, {2024, 1});
  REQUIRE(y.size() == 100000);
  double sum = 0.0;
  for (double v : y.values) sum += v;
  CHECK(std::abs(sum / 1e5 - tau) <= 4.0 * std::sqrt(R / 1e5));
}

TEST_CASE("hold_value is a right-continuous step function") {
  SignalTrace tr{0.0, 0.02, {10.0, 11.0, 12.0, 13.0}, "x"};
  CHECK(hold_value(tr, 0.0) == 10.0);
  CHECK(hold_value(tr, 0.019) == 10.0);
  CHECK(hold_value(tr, 0.02) == 11.0);
  CHECK(hold_value(tr, std::nextafter(tr.end_time(), 0.0)) == 13.0);
  CHECK_THROWS_AS(hold_value(tr, tr.end_time()), Error);
  CHECK_THROWS_AS(hold_value(tr, -1e-9), Error);

  SUBCASE("jumps only at t0 + k dt") {
    SignalTrace long_tr{1.0, 0.02, {}, "x"};
    for (int k = 0; k < 1000; ++k) long_tr.values.push_back(k);
    for (std::size_t k = 1; k < long_tr.size(); ++k) {
      const double jump = long_tr.t0 + static_cast<double>(k) * long_tr.dt;
      CHECK(hold_index(long_tr, jump) == k);
      CHECK(hold_index(long_tr, std::nextafter(jump, 0.0)) == k - 1);
    }
  }
}

TEST_CASE("subsample keeps every m-th value") {
  SignalTrace tr{0.0, 0.02, {0, 1, 2, 3, 4, 5, 6, 7}, "x"};
  const auto s = subsample(tr, 4);
  CHECK(s.dt == doctest::Approx(0.08));
  CHECK(s.values == std::vector<double>{0, 4});
}

TEST_CASE("trace files round-trip bit for bit") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1e3, 1e3);
  for (int trial = 0; trial < 5; ++trial) {
    SignalTrace tr{0.0, 0.02 * (trial + 1), {}, "y_" + std::to_string(trial)};
    for (int k = 0; k < 200; ++k) tr.values.push_back(u(rng) * std::pow(10.0, trial - 2));
    const auto path = temp_file("roundtrip.csv");
    save_trace(tr, path);
    const auto back = load_trace(path);
    CHECK(back.label == tr.label);
    CHECK(back.dt == tr.dt);
    CHECK(back.t0 == tr.t0);
    REQUIRE(back.values.size() == tr.values.size());
    for (std::size_t k = 0; k < tr.size(); ++k) CHECK(back.values[k] == tr.values[k]);
  }
}

TEST_CASE("malformed trace files are rejected") {
  const auto write = [](const std::string& text) {
    const auto path = temp_file("bad.csv");
    std::ofstream(path) << text;
    return path;
  };
  CHECK_THROWS_AS(load_trace(write("")), Error);
  CHECK_THROWS_AS(load_trace(write("# x,0.02,0\ntime,value\n0,1\n")), Error);
  CHECK_THROWS_AS(load_trace(write("t,value\n0,1\n")), Error);
  CHECK_THROWS_AS(load_trace(write("# x,0.02,0\nt,value\n0,abc\n")), Error);
  CHECK_THROWS_AS(load_trace(write("# x,0.02,0\nt,value\n")), Error);
  CHECK_THROWS_AS(load_trace(write("# x,0.02,0\nt,value\n0,1\n0.5,2\n")), Error);
  CHECK_THROWS_AS(load_trace(temp_file("does_not_exist.csv")), Error);
}
