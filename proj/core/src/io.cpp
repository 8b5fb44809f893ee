#include "gazeguard/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "gazeguard/errors.hpp"

namespace gazeguard {

namespace {

std::string fmt_g9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::string fmt_f9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9f", v);
  return buf;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

std::string strip_cr(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

}  // namespace

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::vector<GazeStream> read_stream_csv(const std::string& path,
                                        const ColumnMapping& mapping,
                                        ReadReport* report) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open '" + path + "'");
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw ParseError("'" + path + "' is empty");
  }
  const std::vector<std::string> header = split_csv_line(strip_cr(line));

  const auto column = [&](const std::string& name) {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) {
      throw SchemaError("'" + path + "' is missing column '" + name + "'");
    }
    return static_cast<std::size_t>(it - header.begin());
  };
  const std::size_t c_user = column(mapping.user_id);
  const std::size_t c_trial = column(mapping.trial_id);
  column(mapping.frame);
  const std::size_t c_time = column(mapping.timestamp_s);
  const std::size_t c_theta = column(mapping.theta_deg);
  const std::size_t c_psi = column(mapping.psi_deg);

  struct Row {
    GazeSample sample;
    std::size_t file_order;
  };
  std::map<std::pair<std::string, int>, std::vector<Row>> groups;

  ReadReport local;
  std::size_t row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    line = strip_cr(line);
    if (line.empty()) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() < header.size()) {
      throw ParseError("row " + std::to_string(row_number) + " has " +
                       std::to_string(fields.size()) + " fields, expected " +
                       std::to_string(header.size()));
    }
    Row row;
    int trial = 0;
    try {
      trial = std::stoi(fields[c_trial]);
      row.sample.timestamp_s = std::stod(fields[c_time]);
      row.sample.theta_deg = std::stod(fields[c_theta]);
      row.sample.psi_deg = std::stod(fields[c_psi]);
    } catch (const std::exception&) {
      throw ParseError("row " + std::to_string(row_number) +
                       " has an unparseable numeric field");
    }
    if (!std::isfinite(row.sample.timestamp_s) ||
        !std::isfinite(row.sample.theta_deg) ||
        !std::isfinite(row.sample.psi_deg)) {
      throw ParseError("row " + std::to_string(row_number) +
                       " contains a non-finite value");
    }
    row.file_order = row_number;
    groups[{fields[c_user], trial}].push_back(std::move(row));
    ++local.rows_read;
  }

  std::vector<GazeStream> streams;
  for (auto& [key, rows] : groups) {
    std::stable_sort(rows.begin(), rows.end(),
                     [](const Row& a, const Row& b) {
                       return a.sample.timestamp_s < b.sample.timestamp_s;
                     });
    GazeStream stream;
    stream.user_id = key.first;
    stream.trial_id = key.second;
    std::size_t collapsed = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      // Equal timestamps collapse to the last occurrence in file order.
      if (i + 1 < rows.size() &&
          rows[i + 1].sample.timestamp_s == rows[i].sample.timestamp_s) {
        ++collapsed;
        continue;
      }
      stream.samples.push_back(rows[i].sample);
    }
    if (collapsed > 0) {
      local.duplicates_collapsed += collapsed;
      local.warnings.push_back("collapsed " + std::to_string(collapsed) +
                               " duplicate timestamp(s) in stream " +
                               key.first + "/trial " +
                               std::to_string(key.second));
    }

    const double t0 = stream.samples.front().timestamp_s;
    for (GazeSample& s : stream.samples) s.timestamp_s -= t0;

    if (stream.size() >= 2) {
      double rate = static_cast<double>(stream.size() - 1) / stream.span_s();
      const double snapped = std::round(rate);
      if (snapped >= 1.0 && std::abs(rate - snapped) < 1e-3) rate = snapped;
      stream.nominal_rate_hz = rate;
    }
    for (std::string& w : stream.validate()) {
      local.warnings.push_back(std::move(w));
    }
    streams.push_back(std::move(stream));
  }

  if (report != nullptr) *report = std::move(local);
  return streams;
}

void write_stream_csv(const std::vector<GazeStream>& streams,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "user_id,trial_id,frame,timestamp_s,theta_deg,psi_deg\n";
  for (const GazeStream& stream : streams) {
    for (std::size_t i = 0; i < stream.size(); ++i) {
      const GazeSample& s = stream.samples[i];
      out << stream.user_id << ',' << stream.trial_id << ',' << i << ','
          << fmt_g9(s.timestamp_s) << ',' << fmt_g9(s.theta_deg) << ','
          << fmt_g9(s.psi_deg) << "\n";
    }
  }
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

void write_identification_csv(const IdentificationReport& report,
                              const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "query_trial,reference_trial,user_id,predicted,correct\n";
  for (const IdentificationOutcome& o : report.outcomes) {
    out << o.query_trial << ',' << o.reference_trial << ',' << o.user_id << ','
        << o.predicted_user_id << ',' << (o.correct ? 1 : 0) << "\n";
  }
  out << "mean,,,," << fmt_f9(report.mean_accuracy) << "\n";
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

void write_aoi_csv(const AoiRetentionReport& report, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "class,precision,recall,f1,weight,support\n";
  for (const AoiClassMetrics& m : report.per_class) {
    out << m.label << ',' << fmt_f9(m.precision) << ',' << fmt_f9(m.recall)
        << ',' << fmt_f9(m.f1) << ',' << fmt_f9(m.weight) << ',' << m.support
        << "\n";
  }
  out << "weighted," << fmt_f9(report.weighted_precision) << ','
      << fmt_f9(report.weighted_recall) << ',' << fmt_f9(report.weighted_f1)
      << ",,\n";
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

void write_threat_csv(const std::vector<ThreatTableRow>& rows,
                      const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "mechanism,before,blackbox,exemplars,whitebox\n";
  for (const ThreatTableRow& r : rows) {
    out << r.mechanism << ',' << fmt_f9(r.before) << ',' << fmt_f9(r.blackbox)
        << ',' << fmt_f9(r.exemplars) << ',' << fmt_f9(r.whitebox) << "\n";
  }
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

void write_validation_csv(const ValidationReport& report,
                          const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "grid_index,target_theta_deg,target_psi_deg,mean_deg,std_deg,"
         "n_samples\n";
  for (const TargetError& t : report.per_target) {
    out << t.grid_index << ',' << fmt_g9(t.theta_deg) << ','
        << fmt_g9(t.psi_deg) << ',' << fmt_f9(t.mean_deg) << ','
        << fmt_f9(t.std_deg) << ',' << t.n_samples << "\n";
  }
  out << "overall,,," << fmt_f9(report.mean_deg) << ','
      << fmt_f9(report.std_deg) << ',' << report.n_samples << "\n";
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

void write_sweep_csv(const std::vector<SweepRow>& rows,
                     const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot open '" + path + "' for writing");
  }
  out << "mechanism,strength,id_accuracy,aoi_f1\n";
  for (const SweepRow& r : rows) {
    out << r.mechanism << ',' << fmt_g9(r.strength) << ','
        << fmt_f9(r.id_accuracy) << ',';
    if (r.has_aoi) out << fmt_f9(r.aoi_f1);
    out << "\n";
  }
  if (!out) {
    throw IoError("failed writing '" + path + "'");
  }
}

}  // namespace gazeguard
