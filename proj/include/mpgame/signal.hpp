#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

namespace mpgame {

// Step-held signal: values[k] is in effect on [t0 + k*dt, t0 + (k+1)*dt).
struct SignalTrace {
  double t0 = 0.0;
  double dt = 0.0;
  std::vector<double> values;
  std::string label;

  std::size_t size() const { return values.size(); }
  double end_time() const { return t0 + static_cast<double>(values.size()) * dt; }
  bool covers(double from, double to) const;
};

struct ScenarioSeed {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

// Stream ids used by the simulator: 0 is the ecological signal, 1 + i is the
// cost signal about player i.
inline constexpr std::uint64_t kEcologicalStream = 0;
inline constexpr std::uint64_t cost_stream(std::size_t player) { return 1 + player; }

// ceil(horizon / dt) draws from N(mu, sigma^2). sigma == 0 is the degenerate
// constant trace.
SignalTrace sample_ecological_trace(double mu, double sigma, double dt, double horizon,
                                    ScenarioSeed seed);

// ceil(horizon / dt) draws of tau + N(0, R); R is a variance.
SignalTrace sample_cost_trace(double tau, double noise_variance, double dt, double horizon,
                              ScenarioSeed seed);

// Zero-order-hold lookup. Throws kCoverage outside [t0, end_time()).
double hold_value(const SignalTrace& trace, double s);

// Index of the hold interval containing s, robust to round-off at the jumps.
std::size_t hold_index(const SignalTrace& trace, double s);

// Every m-th value, i.e. the same signal observed at m times the interval.
SignalTrace subsample(const SignalTrace& trace, std::size_t m);

// CSV with a "# label,dt,t0" metadata row, a "t,value" header and one row per
// hold interval. Values are written with 17 significant digits, so a
// save/load cycle is bitwise exact.
void save_trace(const SignalTrace& trace, const std::filesystem::path& path);
SignalTrace load_trace(const std::filesystem::path& path);

}  // namespace mpgame
