#include "mpgame/signal.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>

#include "mpgame/error.hpp"

namespace mpgame {
namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::mt19937_64 make_engine(ScenarioSeed seed) {
  return std::mt19937_64(splitmix64(seed.seed ^ splitmix64(seed.stream + 1)));
}

std::size_t epoch_count(double dt, double horizon) {
  require(std::isfinite(dt) && dt > 0.0, ErrorKind::kInvalidArgument, "signal dt must be > 0");
  require(std::isfinite(horizon) && horizon > 0.0, ErrorKind::kInvalidArgument,
          "signal horizon must be > 0");
  // Tolerate round-off in horizon/dt so that 10 / 0.02 gives 500, not 501.
  const double q = horizon / dt;
  const double r = std::round(q);
  if (std::abs(q - r) <= 1e-9 * std::max(1.0, r)) return static_cast<std::size_t>(r);
  return static_cast<std::size_t>(std::ceil(q));
}

SignalTrace gaussian_trace(double mean, double stddev, double dt, double horizon,
                           ScenarioSeed seed, std::string label) {
  SignalTrace trace;
  trace.t0 = 0.0;
  trace.dt = dt;
  trace.label = std::move(label);
  const std::size_t count = epoch_count(dt, horizon);
  trace.values.reserve(count);
  auto engine = make_engine(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (std::size_t k = 0; k < count; ++k) {
    // Always draw so the stream position does not depend on stddev.
    const double z = normal(engine);
    trace.values.push_back(stddev == 0.0 ? mean : mean + stddev * z);
  }
  return trace;
}

}  // namespace

bool SignalTrace::covers(double from, double to) const {
  return !values.empty() && from >= t0 && to <= end_time() * (1.0 + 1e-12) + 1e-12;
}

SignalTrace sample_ecological_trace(double mu, double sigma, double dt, double horizon,
                                    ScenarioSeed seed) {
  require(std::isfinite(mu), ErrorKind::kNonFinite, "ecological mean must be finite");
  require(std::isfinite(sigma) && sigma >= 0.0, ErrorKind::kInvalidArgument,
          "ecological sigma must be >= 0");
  return gaussian_trace(mu, sigma, dt, horizon, seed, "x");
}

SignalTrace sample_cost_trace(double tau, double noise_variance, double dt, double horizon,
                              ScenarioSeed seed) {
  require(std::isfinite(tau), ErrorKind::kNonFinite, "cost type must be finite");
  require(std::isfinite(noise_variance) && noise_variance >= 0.0,
          ErrorKind::kInvalidArgument, "cost noise variance R must be >= 0");
  return gaussian_trace(tau, std::sqrt(noise_variance), dt, horizon, seed,
                        "y_" + std::to_string(seed.stream));
}

std::size_t hold_index(const SignalTrace& trace, double s) {
  require(!trace.values.empty(), ErrorKind::kCoverage, "empty signal trace");
  require(std::isfinite(s), ErrorKind::kNonFinite, "non-finite lookup time");
  const std::size_t n = trace.values.size();
  const auto jump = [&](std::size_t k) { return trace.t0 + static_cast<double>(k) * trace.dt; };
  if (s < trace.t0 || s >= jump(n)) {
    fail(ErrorKind::kCoverage, "time " + std::to_string(s) + " outside trace '" + trace.label +
                                   "' coverage [" + std::to_string(trace.t0) + ", " +
                                   std::to_string(jump(n)) + ")");
  }
  // Jumps are at the floating-point values t0 + k*dt; settle floor() onto them.
  auto k = static_cast<std::size_t>(std::max(0.0, std::floor((s - trace.t0) / trace.dt)));
  k = std::min(k, n - 1);
  while (k + 1 < n && jump(k + 1) <= s) ++k;
  while (k > 0 && jump(k) > s) --k;
  return k;
}

double hold_value(const SignalTrace& trace, double s) {
  return trace.values[hold_index(trace, s)];
}

SignalTrace subsample(const SignalTrace& trace, std::size_t m) {
  require(m >= 1, ErrorKind::kInvalidArgument, "subsample factor must be >= 1");
  SignalTrace out;
  out.t0 = trace.t0;
  out.dt = trace.dt * static_cast<double>(m);
  out.label = trace.label;
  for (std::size_t k = 0; k < trace.values.size(); k += m) out.values.push_back(trace.values[k]);
  return out;
}

void save_trace(const SignalTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  require(static_cast<bool>(out), ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g", trace.dt, trace.t0);
  out << "# " << trace.label << ',' << buf << '\n';
  out << "t,value\n";
  for (std::size_t k = 0; k < trace.values.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g",
                  trace.t0 + static_cast<double>(k) * trace.dt, trace.values[k]);
    out << buf << '\n';
  }
  require(static_cast<bool>(out), ErrorKind::kIo, "write failed for " + path.string());
}

SignalTrace load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  require(static_cast<bool>(in), ErrorKind::kIo, "cannot open " + path.string());
  const std::string where = path.string();

  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorKind::kParse, where + ": empty file");
  require(line.rfind("# ", 0) == 0, ErrorKind::kParse,
          where + ": first line must be '# label,dt,t0'");

  SignalTrace trace;
  {
    std::stringstream meta(line.substr(2));
    std::string dt_text, t0_text;
    std::getline(meta, trace.label, ',');
    std::getline(meta, dt_text, ',');
    std::getline(meta, t0_text);
    try {
      trace.dt = std::stod(dt_text);
      trace.t0 = std::stod(t0_text);
    } catch (const std::exception&) {
      fail(ErrorKind::kParse, where + ": malformed metadata row '" + line + "'");
    }
    require(trace.dt > 0.0 && std::isfinite(trace.dt), ErrorKind::kParse,
            where + ": dt must be positive");
  }

  require(static_cast<bool>(std::getline(in, line)), ErrorKind::kParse, where + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == "t,value", ErrorKind::kParse,
          where + ": expected header 't,value', got '" + line + "'");

  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    require(comma != std::string::npos, ErrorKind::kParse,
            where + ": row " + std::to_string(row) + " has no comma");
    double t = 0.0, v = 0.0;
    try {
      std::size_t used = 0;
      t = std::stod(line.substr(0, comma));
      const std::string rest = line.substr(comma + 1);
      v = std::stod(rest, &used);
      require(used == rest.size(), ErrorKind::kParse, "trailing characters");
    } catch (const std::exception&) {
      fail(ErrorKind::kParse, where + ": malformed row '" + line + "'");
    }
    const double expected = trace.t0 + static_cast<double>(row) * trace.dt;
    require(std::abs(t - expected) <= 1e-9 * std::max(1.0, std::abs(expected)), ErrorKind::kParse,
            where + ": row " + std::to_string(row) + " time does not match t0 + k*dt");
    trace.values.push_back(v);
    ++row;
  }
  require(!trace.values.empty(), ErrorKind::kParse, where + ": no data rows");
  return trace;
}

}  // namespace mpgame
