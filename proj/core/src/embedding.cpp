#include "gazeguard/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "gazeguard/errors.hpp"

namespace gazeguard {

namespace {

double mean_of(const std::vector<double>& x) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double std_of(const std::vector<double>& x, double mean) {
  if (x.empty()) return 0.0;
  double s = 0.0;
  for (double v : x) s += (v - mean) * (v - mean);
  return std::sqrt(s / static_cast<double>(x.size()));
}

// Percentile with linear interpolation between order statistics.
double percentile_sorted(const std::vector<double>& sorted, double p) {
  if (sorted.empty()) return 0.0;
  if (sorted.size() == 1) return sorted[0];
  const double rank = p / 100.0 * static_cast<double>(sorted.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

// mean, std, median, p75, p90, p95, max
void push_seven_stats(std::vector<double>& out, std::vector<double> x) {
  const double m = mean_of(x);
  const double s = std_of(x, m);
  std::sort(x.begin(), x.end());
  out.push_back(m);
  out.push_back(s);
  out.push_back(percentile_sorted(x, 50.0));
  out.push_back(percentile_sorted(x, 75.0));
  out.push_back(percentile_sorted(x, 90.0));
  out.push_back(percentile_sorted(x, 95.0));
  out.push_back(x.empty() ? 0.0 : x.back());
}

}  // namespace

std::size_t EmbeddingSet::dim() const {
  if (records.empty()) {
    throw EmptySet("embedding set has no records");
  }
  const std::size_t d = records.front().dim();
  for (std::size_t i = 0; i < records.size(); ++i) {
    if (records[i].dim() != d) {
      throw DimensionMismatch("record " + std::to_string(i) + " has dimension " +
                              std::to_string(records[i].dim()) + ", expected " +
                              std::to_string(d));
    }
    for (double v : records[i].values) {
      if (!std::isfinite(v)) {
        throw InvalidParameter("non-finite value in embedding record " +
                               std::to_string(i));
      }
    }
  }
  return d;
}

Embedding embed_statistical(const Segment& segment,
                            double velocity_threshold_deg_s) {
  const std::size_t n = segment.theta.size();
  if (n != kSegmentLength || segment.psi.size() != kSegmentLength) {
    throw InvalidSegment("statistical embedder expects " +
                         std::to_string(kSegmentLength) +
                         "-sample windows, got " + std::to_string(n));
  }
  const double dt = 1.0 / segment.rate_hz;

  const std::vector<double>& th = segment.theta;
  const std::vector<double>& ps = segment.psi;

  std::vector<double> speed(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double dth = th[i] - th[i - 1];
    const double dps = ps[i] - ps[i - 1];
    speed[i - 1] = std::sqrt(dth * dth + dps * dps) / dt;
  }

  std::vector<double> accel(n - 2);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double ddth = th[i + 1] - 2.0 * th[i] + th[i - 1];
    const double ddps = ps[i + 1] - 2.0 * ps[i] + ps[i - 1];
    accel[i - 1] = std::sqrt(ddth * ddth + ddps * ddps) / (dt * dt);
  }

  std::vector<double> f;
  f.reserve(kStatisticalEmbeddingDim);

  const double mean_th = mean_of(th);
  const double mean_ps = mean_of(ps);
  f.push_back(mean_th);
  f.push_back(std_of(th, mean_th));
  f.push_back(mean_ps);
  f.push_back(std_of(ps, mean_ps));

  push_seven_stats(f, speed);
  push_seven_stats(f, accel);

  std::size_t below = 0;
  for (double v : speed) {
    if (v < velocity_threshold_deg_s) ++below;
  }
  f.push_back(static_cast<double>(below) / static_cast<double>(speed.size()));

  // Upward crossings of the saccade threshold; the stream is treated as at
  // rest before its first sample.
  std::size_t crossings = 0;
  std::size_t first_cross = 0;
  std::size_t last_cross = 0;
  double prev = 0.0;
  for (std::size_t i = 0; i < speed.size(); ++i) {
    if (speed[i] >= velocity_threshold_deg_s && prev < velocity_threshold_deg_s) {
      if (crossings == 0) first_cross = i;
      last_cross = i;
      ++crossings;
    }
    prev = speed[i];
  }
  f.push_back(static_cast<double>(crossings));
  f.push_back(crossings >= 2 ? static_cast<double>(last_cross - first_cross) *
                                   dt / static_cast<double>(crossings - 1)
                             : 0.0);

  double hist[8] = {0, 0, 0, 0, 0, 0, 0, 0};
  double total = 0.0;
  for (std::size_t i = 1; i < n; ++i) {
    const double dth = th[i] - th[i - 1];
    const double dps = ps[i] - ps[i - 1];
    const double mag = std::sqrt(dth * dth + dps * dps);
    if (mag <= 0.0) continue;
    const double ang = std::atan2(dps, dth);
    int bin = static_cast<int>(
        std::floor((ang + std::numbers::pi) / (std::numbers::pi / 4.0)));
    bin = std::clamp(bin, 0, 7);
    hist[bin] += mag;
    total += mag;
  }
  for (double h : hist) f.push_back(total > 0.0 ? h / total : 0.0);

  double jerk_sq_sum = 0.0;
  const std::size_t n_jerk = n - 3;
  for (std::size_t i = 0; i < n_jerk; ++i) {
    const double dddth = th[i + 3] - 3.0 * th[i + 2] + 3.0 * th[i + 1] - th[i];
    const double dddps = ps[i + 3] - 3.0 * ps[i + 2] + 3.0 * ps[i + 1] - ps[i];
    const double j = std::sqrt(dddth * dddth + dddps * dddps) / (dt * dt * dt);
    jerk_sq_sum += j * j;
  }
  f.push_back(std::sqrt(jerk_sq_sum / static_cast<double>(n_jerk)));

  f.push_back(th.back() - th.front());
  f.push_back(ps.back() - ps.front());

  Embedding e;
  e.values = std::move(f);
  e.user_id = segment.user_id;
  e.trial_id = segment.trial_id;
  e.segment_index = segment.segment_index;
  return e;
}

EmbeddingSet load_embeddings(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open embeddings file '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptySet("embeddings file '" + path + "' is empty");
  }

  std::vector<std::string> header;
  {
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) header.push_back(field);
  }
  if (header.size() < 4 || header[0] != "user_id" || header[1] != "trial_id" ||
      header[2] != "segment_index") {
    throw ParseError("embeddings file '" + path +
                     "' must start with header "
                     "user_id,trial_id,segment_index,e0,...");
  }
  const std::size_t dim = header.size() - 3;
  for (std::size_t i = 0; i < dim; ++i) {
    if (header[3 + i] != "e" + std::to_string(i)) {
      throw ParseError("embeddings header column " + std::to_string(3 + i) +
                       " must be e" + std::to_string(i));
    }
  }

  EmbeddingSet set;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<std::string> fields;
    while (std::getline(ss, field, ',')) fields.push_back(field);
    if (fields.size() != 3 + dim) {
      throw ParseError("row " + std::to_string(row) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(3 + dim));
    }
    Embedding e;
    e.user_id = fields[0];
    try {
      e.trial_id = std::stoi(fields[1]);
      e.segment_index = static_cast<std::size_t>(std::stoul(fields[2]));
      e.values.resize(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        e.values[i] = std::stod(fields[3 + i]);
      }
    } catch (const std::exception&) {
      throw ParseError("row " + std::to_string(row) + " has a malformed field");
    }
    for (double v : e.values) {
      if (!std::isfinite(v)) {
        throw ParseError("row " + std::to_string(row) +
                         " contains a non-finite value");
      }
    }
    set.records.push_back(std::move(e));
  }
  if (set.records.empty()) {
    throw EmptySet("embeddings file '" + path + "' has no data rows");
  }
  set.dim();
  return set;
}

void save_embeddings(const EmbeddingSet& set, const std::string& path) {
  const std::size_t dim = set.dim();
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "user_id,trial_id,segment_index";
  for (std::size_t i = 0; i < dim; ++i) out << ",e" << i;
  out << "\n";
  char buf[32];
  for (const Embedding& e : set.records) {
    out << e.user_id << ',' << e.trial_id << ',' << e.segment_index;
    for (double v : e.values) {
      std::snprintf(buf, sizeof(buf), "%.9g", v);
      out << ',' << buf;
    }
    out << "\n";
  }
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

ZScore fit_zscore(const EmbeddingSet& reference) {
  const std::size_t dim = reference.dim();
  const double n = static_cast<double>(reference.size());
  ZScore z;
  z.mean.assign(dim, 0.0);
  z.scale.assign(dim, 1.0);
  for (const Embedding& e : reference.records) {
    for (std::size_t i = 0; i < dim; ++i) z.mean[i] += e.values[i];
  }
  for (double& m : z.mean) m /= n;
  std::vector<double> var(dim, 0.0);
  for (const Embedding& e : reference.records) {
    for (std::size_t i = 0; i < dim; ++i) {
      const double d = e.values[i] - z.mean[i];
      var[i] += d * d;
    }
  }
  for (std::size_t i = 0; i < dim; ++i) {
    const double sd = std::sqrt(var[i] / n);
    z.scale[i] = sd > 1e-12 ? sd : 1.0;
  }
  return z;
}

void apply_zscore(EmbeddingSet& set, const ZScore& z) {
  const std::size_t dim = set.dim();
  if (dim != z.mean.size()) {
    throw DimensionMismatch("z-score fitted for dimension " +
                            std::to_string(z.mean.size()) + ", set has " +
                            std::to_string(dim));
  }
  for (Embedding& e : set.records) {
    for (std::size_t i = 0; i < dim; ++i) {
      e.values[i] = (e.values[i] - z.mean[i]) / z.scale[i];
    }
  }
}

}  // namespace gazeguard
