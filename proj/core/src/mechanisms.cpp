#include "gazeguard/mechanisms.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "gazeguard/errors.hpp"

namespace gazeguard {

namespace {

std::string format_number(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

MechanismKind mechanism_kind_from_name(std::string_view name) {
  if (name == "none") return MechanismKind::None;
  if (name == "gaussian") return MechanismKind::Gaussian;
  if (name == "temporal") return MechanismKind::Temporal;
  if (name == "spatial") return MechanismKind::Spatial;
  if (name == "smoothing") return MechanismKind::Smoothing;
  throw InvalidParameter("unknown mechanism '" + std::string(name) + "'");
}

std::string mechanism_kind_name(MechanismKind kind) {
  switch (kind) {
    case MechanismKind::None: return "none";
    case MechanismKind::Gaussian: return "gaussian";
    case MechanismKind::Temporal: return "temporal";
    case MechanismKind::Spatial: return "spatial";
    case MechanismKind::Smoothing: return "smoothing";
  }
  throw InvalidParameter("unknown mechanism kind");
}

MechanismConfig MechanismConfig::none() { return {}; }

MechanismConfig MechanismConfig::gaussian(double sigma_deg, std::uint64_t seed) {
  MechanismConfig c;
  c.kind = MechanismKind::Gaussian;
  c.sigma_deg = sigma_deg;
  c.seed = seed;
  c.check();
  return c;
}

MechanismConfig MechanismConfig::temporal(int k) {
  MechanismConfig c;
  c.kind = MechanismKind::Temporal;
  c.k = k;
  c.check();
  return c;
}

MechanismConfig MechanismConfig::spatial(int l) {
  MechanismConfig c;
  c.kind = MechanismKind::Spatial;
  c.l = l;
  c.check();
  return c;
}

MechanismConfig MechanismConfig::smoothing(int b) {
  MechanismConfig c;
  c.kind = MechanismKind::Smoothing;
  c.b = b;
  c.check();
  return c;
}

std::vector<std::string> MechanismConfig::check() const {
  std::vector<std::string> warnings;
  switch (kind) {
    case MechanismKind::None:
      break;
    case MechanismKind::Gaussian:
      if (!(sigma_deg >= 0.0)) {
        throw InvalidParameter("gaussian sigma must be >= 0, got " +
                               format_number(sigma_deg));
      }
      if (sigma_deg > 20.0) {
        warnings.push_back("gaussian sigma " + format_number(sigma_deg) +
                           " exceeds the studied range (<= 20)");
      }
      break;
    case MechanismKind::Temporal:
      if (k < 1) {
        throw InvalidParameter("temporal k must be >= 1, got " +
                               std::to_string(k));
      }
      if (k > 30) {
        warnings.push_back("temporal k " + std::to_string(k) +
                           " exceeds the studied range (<= 30)");
      }
      break;
    case MechanismKind::Spatial:
      if (l < 1) {
        throw InvalidParameter("spatial l must be >= 1, got " +
                               std::to_string(l));
      }
      if (l > 256) {
        warnings.push_back("spatial l " + std::to_string(l) +
                           " exceeds the studied range (<= 256)");
      }
      break;
    case MechanismKind::Smoothing:
      if (b < 1) {
        throw InvalidParameter("smoothing b must be >= 1, got " +
                               std::to_string(b));
      }
      if (b > 300) {
        warnings.push_back("smoothing b " + std::to_string(b) +
                           " exceeds the studied range (<= 300)");
      }
      break;
  }
  return warnings;
}

double MechanismConfig::strength() const {
  switch (kind) {
    case MechanismKind::None: return 0.0;
    case MechanismKind::Gaussian: return sigma_deg;
    case MechanismKind::Temporal: return static_cast<double>(k);
    case MechanismKind::Spatial: return static_cast<double>(l);
    case MechanismKind::Smoothing: return static_cast<double>(b);
  }
  return 0.0;
}

MechanismConfig MechanismConfig::with_strength(double value) const {
  MechanismConfig c = *this;
  switch (kind) {
    case MechanismKind::None:
      throw InvalidParameter("the identity mechanism has no strength");
    case MechanismKind::Gaussian:
      c.sigma_deg = value;
      break;
    case MechanismKind::Temporal:
      c.k = static_cast<int>(std::llround(value));
      break;
    case MechanismKind::Spatial:
      c.l = static_cast<int>(std::llround(value));
      break;
    case MechanismKind::Smoothing:
      c.b = static_cast<int>(std::llround(value));
      break;
  }
  c.check();
  return c;
}

std::string MechanismConfig::label() const {
  switch (kind) {
    case MechanismKind::None: return "none";
    case MechanismKind::Gaussian:
      return "gaussian(sigma=" + format_number(sigma_deg) + ")";
    case MechanismKind::Temporal:
      return "temporal(k=" + std::to_string(k) + ")";
    case MechanismKind::Spatial:
      return "spatial(l=" + std::to_string(l) + ")";
    case MechanismKind::Smoothing:
      return "smoothing(b=" + std::to_string(b) + ")";
  }
  return "none";
}

MechanismConfig mechanism_preset(MechanismKind kind, std::string_view level) {
  const bool high = level == "high";
  if (!high && level != "low") {
    throw InvalidParameter("preset level must be 'low' or 'high', got '" +
                           std::string(level) + "'");
  }
  switch (kind) {
    case MechanismKind::Gaussian:
      return MechanismConfig::gaussian(high ? 3.0 : 1.0);
    case MechanismKind::Spatial:
      return MechanismConfig::spatial(high ? 144 : 48);
    case MechanismKind::Smoothing:
      return MechanismConfig::smoothing(high ? 150 : 50);
    case MechanismKind::Temporal:
      throw InvalidParameter("temporal downsampling has no strength preset");
    case MechanismKind::None:
      throw InvalidParameter("the identity mechanism has no strength preset");
  }
  throw InvalidParameter("unknown mechanism kind");
}

std::string mechanism_to_json(const MechanismConfig& config) {
  nlohmann::json j;
  j["mechanism"] = mechanism_kind_name(config.kind);
  switch (config.kind) {
    case MechanismKind::None:
      break;
    case MechanismKind::Gaussian:
      j["sigma"] = config.sigma_deg;
      j["seed"] = config.seed;
      break;
    case MechanismKind::Temporal:
      j["k"] = config.k;
      break;
    case MechanismKind::Spatial:
      j["l"] = config.l;
      break;
    case MechanismKind::Smoothing:
      j["b"] = config.b;
      break;
  }
  return j.dump();
}

MechanismConfig mechanism_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("mechanism config is not valid JSON: ") +
                     e.what());
  }
  if (!j.is_object() || !j.contains("mechanism") ||
      !j["mechanism"].is_string()) {
    throw SchemaError("mechanism config must be an object with a string "
                      "'mechanism' field");
  }

  MechanismConfig c;
  c.kind = mechanism_kind_from_name(j["mechanism"].get<std::string>());

  const auto require_number = [&j](const char* key) {
    if (!j.contains(key) || !j[key].is_number()) {
      throw SchemaError(std::string("mechanism config missing numeric '") +
                        key + "' field");
    }
    return j[key].get<double>();
  };
  const auto require_integer = [&](const char* key) {
    const double v = require_number(key);
    if (v != std::floor(v)) {
      throw SchemaError(std::string("'") + key + "' must be an integer");
    }
    return static_cast<int>(v);
  };

  switch (c.kind) {
    case MechanismKind::None:
      break;
    case MechanismKind::Gaussian:
      c.sigma_deg = require_number("sigma");
      break;
    case MechanismKind::Temporal:
      c.k = require_integer("k");
      break;
    case MechanismKind::Spatial:
      c.l = require_integer("l");
      break;
    case MechanismKind::Smoothing:
      c.b = require_integer("b");
      break;
  }
  if (j.contains("seed")) {
    if (!j["seed"].is_number_integer() && !j["seed"].is_number_unsigned()) {
      throw SchemaError("'seed' must be an integer");
    }
    c.seed = j["seed"].get<std::uint64_t>();
  }
  c.check();
  return c;
}

SpatialGrid::SpatialGrid(int l_factor) : l(l_factor) {
  if (l < 1) {
    throw InvalidParameter("spatial l must be >= 1, got " + std::to_string(l));
  }
  m = kBasePoints / static_cast<double>(l);
  delta_deg = kFovDeg / m;
}

SmoothingState::SmoothingState(int b_window, bool seed_with_first_)
    : b(b_window), seed_with_first(seed_with_first_) {
  if (b < 1) {
    throw InvalidParameter("smoothing b must be >= 1, got " + std::to_string(b));
  }
  d = static_cast<double>(b) * (b + 1) / 2.0;
  theta.assign(static_cast<std::size_t>(b), 0.0);
  psi.assign(static_cast<std::size_t>(b), 0.0);
}

void SmoothingState::push(double theta_deg, double psi_deg) {
  if (seed_with_first && !primed) {
    theta.assign(theta.size(), theta_deg);
    psi.assign(psi.size(), psi_deg);
    primed = true;
    return;
  }
  primed = true;
  theta[head] = theta_deg;
  psi[head] = psi_deg;
  head = head + 1 == theta.size() ? 0 : head + 1;
}

GazeSample SmoothingState::average(double timestamp_s) const {
  // The window is a ring with the oldest entry at `head`; weights run 1..b
  // from oldest to newest. Two contiguous scans avoid modulo in the loop.
  const std::size_t n = theta.size();
  double sum_theta = 0.0;
  double sum_psi = 0.0;
  double w = 1.0;
  for (std::size_t i = head; i < n; ++i, w += 1.0) {
    sum_theta += theta[i] * w;
    sum_psi += psi[i] * w;
  }
  for (std::size_t i = 0; i < head; ++i, w += 1.0) {
    sum_theta += theta[i] * w;
    sum_psi += psi[i] * w;
  }
  GazeSample out;
  out.theta_deg = sum_theta / d;
  out.psi_deg = sum_psi / d;
  out.timestamp_s = timestamp_s;
  return out;
}

GazeSample apply_gaussian(const GazeSample& sample, double sigma_deg, Rng& rng) {
  if (sigma_deg < 0.0) {
    throw InvalidParameter("gaussian sigma must be >= 0");
  }
  if (sigma_deg == 0.0) return sample;
  GazeSample out = sample;
  out.theta_deg += rng.normal(0.0, sigma_deg);
  out.psi_deg += rng.normal(0.0, sigma_deg);
  return out;
}

GazeSample apply_temporal(const GazeSample& sample, int k, TemporalState& state) {
  GazeSample out = sample;
  if (state.frame_counter % static_cast<std::uint64_t>(k) == 0) {
    state.last_theta_deg = sample.theta_deg;
    state.last_psi_deg = sample.psi_deg;
  } else {
    out.theta_deg = state.last_theta_deg;
    out.psi_deg = state.last_psi_deg;
  }
  ++state.frame_counter;
  return out;
}

GazeSample apply_spatial(const GazeSample& sample, const SpatialGrid& grid) {
  // The 1e-9 nudge keeps quantization idempotent: for non-divisor l the
  // stored cell value k*delta can divide back to fractionally under k.
  const double delta = grid.delta_deg;
  GazeSample out = sample;
  out.theta_deg = std::floor(sample.theta_deg / delta + 1e-9) * delta;
  out.psi_deg = std::floor(sample.psi_deg / delta + 1e-9) * delta;
  return out;
}

GazeSample apply_smoothing(const GazeSample& sample, SmoothingState& state) {
  state.push(sample.theta_deg, sample.psi_deg);
  return state.average(sample.timestamp_s);
}

GazeStream privatize_stream(const GazeStream& stream,
                            const MechanismConfig& config,
                            std::uint64_t master_seed) {
  config.check();
  GazeStream out = stream;
  switch (config.kind) {
    case MechanismKind::None:
      break;
    case MechanismKind::Gaussian: {
      if (config.sigma_deg == 0.0) break;
      Rng rng = Rng::substream(master_seed, stream.user_id,
                               static_cast<std::uint64_t>(stream.trial_id));
      for (GazeSample& s : out.samples) {
        s = apply_gaussian(s, config.sigma_deg, rng);
      }
      break;
    }
    case MechanismKind::Temporal: {
      TemporalState state;
      for (GazeSample& s : out.samples) {
        s = apply_temporal(s, config.k, state);
      }
      break;
    }
    case MechanismKind::Spatial: {
      const SpatialGrid grid(config.l);
      for (GazeSample& s : out.samples) {
        s = apply_spatial(s, grid);
      }
      break;
    }
    case MechanismKind::Smoothing: {
      SmoothingState state(config.b, config.smoothing_seed_first);
      for (GazeSample& s : out.samples) {
        s = apply_smoothing(s, state);
      }
      break;
    }
  }
  return out;
}

BenchReport bench_mechanism(const MechanismConfig& config,
                            std::size_t n_samples) {
  if (n_samples < 10000) {
    throw InvalidParameter("benchmark needs at least 10^4 samples");
  }
  config.check();

  GazeStream stream;
  stream.nominal_rate_hz = 72.0;
  stream.user_id = "bench";
  stream.trial_id = 0;
  stream.samples.resize(n_samples);
  for (std::size_t i = 0; i < n_samples; ++i) {
    const double t = static_cast<double>(i) / 72.0;
    stream.samples[i] = {20.0 * std::sin(0.7 * t), 12.0 * std::sin(1.1 * t), t};
  }

  const std::size_t warmup = std::min<std::size_t>(n_samples / 10, 10000);
  volatile double sink = 0.0;

  const auto run = [&](std::size_t begin, std::size_t end) {
    double acc = 0.0;
    switch (config.kind) {
      case MechanismKind::None:
        for (std::size_t i = begin; i < end; ++i) {
          acc += stream.samples[i].theta_deg + stream.samples[i].psi_deg;
        }
        break;
      case MechanismKind::Gaussian: {
        Rng rng(42);
        for (std::size_t i = begin; i < end; ++i) {
          const GazeSample s =
              apply_gaussian(stream.samples[i], config.sigma_deg, rng);
          acc += s.theta_deg + s.psi_deg;
        }
        break;
      }
      case MechanismKind::Temporal: {
        TemporalState state;
        for (std::size_t i = begin; i < end; ++i) {
          const GazeSample s = apply_temporal(stream.samples[i], config.k, state);
          acc += s.theta_deg + s.psi_deg;
        }
        break;
      }
      case MechanismKind::Spatial: {
        const SpatialGrid grid(config.l);
        for (std::size_t i = begin; i < end; ++i) {
          const GazeSample s = apply_spatial(stream.samples[i], grid);
          acc += s.theta_deg + s.psi_deg;
        }
        break;
      }
      case MechanismKind::Smoothing: {
        SmoothingState state(config.b, config.smoothing_seed_first);
        for (std::size_t i = begin; i < end; ++i) {
          const GazeSample s = apply_smoothing(stream.samples[i], state);
          acc += s.theta_deg + s.psi_deg;
        }
        break;
      }
    }
    sink = sink + acc;
  };

  run(0, warmup);
  const auto t0 = std::chrono::steady_clock::now();
  run(warmup, n_samples);
  const auto t1 = std::chrono::steady_clock::now();

  const double ns =
      std::chrono::duration<double, std::nano>(t1 - t0).count();
  const double measured = static_cast<double>(n_samples - warmup);

  BenchReport report;
  report.mechanism = config.label();
  report.n_samples = n_samples;
  report.ns_per_sample = ns / measured;
  report.samples_per_second =
      report.ns_per_sample > 0.0 ? 1e9 / report.ns_per_sample : 0.0;
  return report;
}

}  // namespace gazeguard
