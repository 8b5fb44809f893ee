#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "gazeguard/aoi.hpp"
#include "gazeguard/attacks.hpp"
#include "gazeguard/embedding.hpp"
#include "gazeguard/errors.hpp"
#include "gazeguard/identify.hpp"
#include "gazeguard/io.hpp"
#include "gazeguard/mechanisms.hpp"
#include "gazeguard/stream_ops.hpp"
#include "gazeguard/synth.hpp"
#include "gazeguard/validation.hpp"

namespace gg = gazeguard;

namespace {

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::fprintf(stderr, "warning: %s\n", w.c_str());
}

std::vector<gg::GazeStream> read_streams(const std::string& path) {
  gg::ReadReport report;
  auto streams = gg::read_stream_csv(path, {}, &report);
  print_warnings(report.warnings);
  if (report.duplicates_collapsed > 0) {
    std::fprintf(stderr, "warning: %s: collapsed %zu duplicate-timestamp rows\n",
                 path.c_str(), report.duplicates_collapsed);
  }
  return streams;
}

gg::GazeStream read_single_stream(const std::string& path) {
  auto streams = read_streams(path);
  if (streams.size() != 1) {
    throw gg::InvalidParameter(path + ": expected a single (user, trial) series, found " +
                               std::to_string(streams.size()));
  }
  return std::move(streams.front());
}

// Mechanism selection flags shared by privatize, sweep, attack, bench and
// the optional query-side mechanism of identify.
struct MechanismFlags {
  std::string mechanism;
  std::string preset;
  std::string config_path;
  double sigma = 0.0;
  int k = 0;
  int l = 0;
  int b = 0;
  CLI::Option* sigma_opt = nullptr;
  CLI::Option* k_opt = nullptr;
  CLI::Option* l_opt = nullptr;
  CLI::Option* b_opt = nullptr;
  CLI::Option* mech_opt = nullptr;
  CLI::Option* preset_opt = nullptr;
  CLI::Option* config_opt = nullptr;

  void attach(CLI::App* cmd, bool with_config) {
    mech_opt = cmd->add_option("--mechanism", mechanism,
                               "one of none, gaussian, temporal, spatial, smoothing");
    sigma_opt = cmd->add_option("--sigma", sigma, "gaussian noise std in degrees");
    k_opt = cmd->add_option("--k", k, "temporal downsampling factor");
    l_opt = cmd->add_option("--l", l, "spatial grid thinning factor");
    b_opt = cmd->add_option("--b", b, "smoothing window length");
    preset_opt = cmd->add_option("--preset", preset, "strength preset: low or high")
                     ->check(CLI::IsMember({"low", "high"}));
    preset_opt->excludes(sigma_opt)->excludes(k_opt)->excludes(l_opt)->excludes(b_opt);
    if (with_config) {
      config_opt = cmd->add_option("--config", config_path,
                                   "JSON mechanism config file (alternative to flags)");
      config_opt->excludes(mech_opt)->excludes(preset_opt);
    }
  }

  bool specified() const {
    return (mech_opt && mech_opt->count() > 0) || (config_opt && config_opt->count() > 0);
  }

  gg::MechanismConfig build(std::uint64_t seed, bool seed_given) const {
    gg::MechanismConfig config;
    if (config_opt && config_opt->count() > 0) {
      config = gg::mechanism_from_json(gg::read_text_file(config_path));
      if (seed_given) config.seed = seed;
    } else {
      if (mechanism.empty()) throw gg::InvalidParameter("--mechanism is required");
      const gg::MechanismKind kind = gg::mechanism_kind_from_name(mechanism);
      if (!preset.empty()) {
        config = gg::mechanism_preset(kind, preset);
      } else {
        switch (kind) {
          case gg::MechanismKind::None:
            config = gg::MechanismConfig::none();
            break;
          case gg::MechanismKind::Gaussian:
            if (sigma_opt->count() == 0)
              throw gg::InvalidParameter("gaussian requires --sigma or --preset");
            config = gg::MechanismConfig::gaussian(sigma);
            break;
          case gg::MechanismKind::Temporal:
            if (k_opt->count() == 0) throw gg::InvalidParameter("temporal requires --k");
            config = gg::MechanismConfig::temporal(k);
            break;
          case gg::MechanismKind::Spatial:
            if (l_opt->count() == 0)
              throw gg::InvalidParameter("spatial requires --l or --preset");
            config = gg::MechanismConfig::spatial(l);
            break;
          case gg::MechanismKind::Smoothing:
            if (b_opt->count() == 0)
              throw gg::InvalidParameter("smoothing requires --b or --preset");
            config = gg::MechanismConfig::smoothing(b);
            break;
        }
      }
      config.seed = seed;
    }
    print_warnings(config.check());
    return config;
  }
};

gg::EmbedderSpec parse_embedder(const std::string& text) {
  if (text == "stat" || text == "statistical") return gg::EmbedderSpec::statistical();
  if (text == "imported") return gg::EmbedderSpec::imported("");
  if (text.rfind("imported:", 0) == 0) {
    return gg::EmbedderSpec::imported(text.substr(std::string("imported:").size()));
  }
  throw gg::InvalidParameter("unknown embedder '" + text +
                             "' (expected stat or imported[:file.csv])");
}

std::vector<double> parse_strength_list(const std::string& text) {
  std::vector<double> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string token = text.substr(pos, comma - pos);
    if (token.empty()) throw gg::InvalidParameter("empty entry in --strengths list");
    try {
      std::size_t used = 0;
      out.push_back(std::stod(token, &used));
      if (used != token.size()) throw std::invalid_argument(token);
    } catch (const std::exception&) {
      throw gg::InvalidParameter("bad strength value '" + token + "'");
    }
    pos = comma + 1;
    if (comma == text.size()) break;
  }
  return out;
}

std::vector<double> default_strengths(gg::MechanismKind kind) {
  switch (kind) {
    case gg::MechanismKind::Gaussian:
      return {0.5, 1, 2, 3, 5, 10, 20};
    case gg::MechanismKind::Spatial:
      return {12, 24, 48, 96, 144, 192, 256};
    case gg::MechanismKind::Temporal:
      return {2, 3, 5, 10, 20, 30};
    case gg::MechanismKind::Smoothing:
      return {10, 25, 50, 100, 150, 200, 300};
    case gg::MechanismKind::None:
      break;
  }
  throw gg::InvalidParameter("sweep needs a mechanism with a strength axis");
}

int resolve_jobs(int jobs) {
  if (jobs > 0) return jobs;
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

void print_identification(const gg::IdentificationReport& report) {
  for (const auto& o : report.outcomes) {
    std::printf("pair %d->%d  %s -> %s  %s\n", o.query_trial, o.reference_trial,
                o.user_id.c_str(), o.predicted_user_id.c_str(),
                o.correct ? "correct" : "wrong");
  }
  std::printf("mean_accuracy %.9f\n", report.mean_accuracy);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"gazeguard: privacy mechanisms and attacks for gaze streams"};
  app.require_subcommand(1);

  // privatize
  std::string in_path, out_path;
  std::uint64_t seed = 0;
  MechanismFlags mech;
  auto* privatize = app.add_subcommand("privatize", "apply a privacy mechanism to a gaze CSV");
  privatize->add_option("--input", in_path, "gaze CSV")->required();
  privatize->add_option("--output", out_path, "privatized CSV")->required();
  mech.attach(privatize, true);
  auto* priv_seed = privatize->add_option("--seed", seed, "master noise seed");
  privatize->callback([&] {
    auto config = mech.build(seed, priv_seed->count() > 0);
    auto streams = read_streams(in_path);
    std::size_t n_samples = 0;
    for (auto& s : streams) {
      s = gg::privatize_stream(s, config);
      n_samples += s.size();
    }
    gg::write_stream_csv(streams, out_path);
    std::printf("privatized %zu series (%zu samples) with %s -> %s\n", streams.size(),
                n_samples, config.label().c_str(), out_path.c_str());
  });

  // identify
  std::string id_query, id_reference, id_embedder = "stat", id_out;
  std::uint64_t id_seed = 0;
  MechanismFlags id_mech;
  auto* identify = app.add_subcommand(
      "identify", "match query records against a labeled reference directory");
  identify->add_option("--query", id_query, "query gaze CSV (or embedding CSV when imported)")
      ->required();
  auto* id_ref_opt =
      identify->add_option("--reference", id_reference,
                           "reference gaze CSV (or embedding CSV when imported)");
  identify->add_option("--embedder", id_embedder, "stat or imported[:emb.csv]");
  auto* id_seed_opt = identify->add_option("--seed", id_seed, "mechanism noise seed");
  id_mech.attach(identify, false);
  identify->add_option("--out", id_out, "write per-user outcomes CSV");
  identify->callback([&] {
    const auto espec = parse_embedder(id_embedder);
    gg::IdentificationReport report;
    if (espec.kind == gg::EmbedderSpec::Kind::Imported) {
      if (id_mech.specified()) {
        throw gg::ProtocolError(
            "imported embeddings cannot be re-privatized; drop the mechanism flags");
      }
      const std::string ref_path =
          id_ref_opt->count() > 0 ? id_reference : espec.path;
      if (ref_path.empty()) {
        throw gg::InvalidParameter(
            "imported mode needs --reference or imported:<emb.csv>");
      }
      auto query = gg::load_embeddings(id_query);
      auto reference = gg::load_embeddings(ref_path);
      query.role = gg::SetRole::Query;
      reference.role = gg::SetRole::Reference;
      const auto z = gg::fit_zscore(reference);
      gg::apply_zscore(reference, z);
      gg::apply_zscore(query, z);
      report = gg::evaluate_sets(query, reference);
    } else {
      if (id_ref_opt->count() == 0) throw gg::InvalidParameter("--reference is required");
      const auto config = id_mech.specified()
                              ? id_mech.build(id_seed, id_seed_opt->count() > 0)
                              : gg::MechanismConfig::none();
      gg::EmbeddingSet query, reference;
      query.role = gg::SetRole::Query;
      reference.role = gg::SetRole::Reference;
      for (const auto& stream : read_streams(id_query)) {
        const auto privatized = gg::privatize_stream(stream, config, id_seed);
        for (const auto& segment : gg::segment(privatized)) {
          query.records.push_back(gg::embed_statistical(segment, espec.velocity_threshold_deg_s));
        }
      }
      for (const auto& stream : read_streams(id_reference)) {
        for (const auto& segment : gg::segment(stream)) {
          reference.records.push_back(
              gg::embed_statistical(segment, espec.velocity_threshold_deg_s));
        }
      }
      const auto z = gg::fit_zscore(reference);
      gg::apply_zscore(reference, z);
      gg::apply_zscore(query, z);
      report = gg::evaluate_sets(query, reference);
    }
    print_identification(report);
    if (!id_out.empty()) gg::write_identification_csv(report, id_out);
  });

  // sweep
  std::string sw_input, sw_mechanism, sw_strengths, sw_scene, sw_embedder = "stat", sw_out;
  std::uint64_t sw_seed = 0;
  int sw_jobs = 0;
  auto* sweep = app.add_subcommand("sweep", "privacy curve over mechanism strengths");
  sweep->add_option("--input", sw_input, "dataset CSV (>= 2 trials per user)")->required();
  sweep->add_option("--mechanism", sw_mechanism, "gaussian, temporal, spatial or smoothing")
      ->required();
  sweep->add_option("--strengths", sw_strengths, "comma-separated strength list, increasing");
  sweep->add_option("--scene", sw_scene, "AOI scene JSON to add a weighted-F1 column");
  sweep->add_option("--embedder", sw_embedder, "stat (imported cannot be re-privatized)");
  sweep->add_option("--seed", sw_seed, "mechanism noise seed");
  sweep->add_option("--jobs", sw_jobs, "worker threads (0 = all cores)");
  sweep->add_option("--out", sw_out, "output curve CSV")->required();
  sweep->callback([&] {
    const auto espec = parse_embedder(sw_embedder);
    const gg::MechanismKind kind = gg::mechanism_kind_from_name(sw_mechanism);
    auto strengths = sw_strengths.empty() ? default_strengths(kind)
                                          : parse_strength_list(sw_strengths);
    if (strengths.empty()) throw gg::InvalidParameter("empty strength list");
    for (std::size_t i = 1; i < strengths.size(); ++i) {
      if (strengths[i] <= strengths[i - 1]) {
        throw gg::InvalidParameter("strengths must be strictly increasing");
      }
    }
    if (kind == gg::MechanismKind::None) {
      throw gg::InvalidParameter("sweep needs a mechanism with a strength axis");
    }
    const auto dataset = read_streams(sw_input);
    std::vector<gg::AoiRegion> scene;
    const bool has_scene = !sw_scene.empty();
    if (has_scene) scene = gg::scene_from_json(gg::read_text_file(sw_scene));
    gg::MechanismConfig base;
    base.kind = kind;
    base.k = base.l = base.b = 1;
    const int jobs = resolve_jobs(sw_jobs);
    std::vector<gg::SweepRow> rows;
    for (const double strength : strengths) {
      const auto config = base.with_strength(strength);
      print_warnings(config.check());
      gg::SweepRow row;
      row.mechanism = gg::mechanism_kind_name(kind);
      row.strength = strength;
      row.id_accuracy =
          gg::evaluate_identification(dataset, espec, config, sw_seed, jobs).mean_accuracy;
      if (has_scene) {
        double f1_sum = 0.0;
        for (const auto& stream : dataset) {
          const auto privatized = gg::privatize_stream(stream, config, sw_seed);
          f1_sum += gg::aoi_retention(stream, privatized, scene).weighted_f1;
        }
        row.aoi_f1 = f1_sum / static_cast<double>(dataset.size());
        row.has_aoi = true;
      }
      if (has_scene) {
        std::printf("%s strength=%g accuracy=%.9f aoi_f1=%.9f\n", row.mechanism.c_str(),
                    row.strength, row.id_accuracy, row.aoi_f1);
      } else {
        std::printf("%s strength=%g accuracy=%.9f\n", row.mechanism.c_str(), row.strength,
                    row.id_accuracy);
      }
      rows.push_back(row);
    }
    gg::write_sweep_csv(rows, sw_out);
  });

  // aoi
  std::string aoi_original, aoi_privatized, aoi_scene, aoi_out;
  bool aoi_no_background = false;
  auto* aoi = app.add_subcommand("aoi", "AOI label retention between two recordings");
  aoi->add_option("--original", aoi_original, "original gaze CSV")->required();
  aoi->add_option("--privatized", aoi_privatized, "privatized gaze CSV")->required();
  aoi->add_option("--scene", aoi_scene, "AOI scene JSON")->required();
  aoi->add_flag("--no-background", aoi_no_background, "score labeled regions only");
  aoi->add_option("--out", aoi_out, "write per-class metrics CSV");
  aoi->callback([&] {
    const auto original = read_single_stream(aoi_original);
    const auto privatized = read_single_stream(aoi_privatized);
    const auto scene = gg::scene_from_json(gg::read_text_file(aoi_scene));
    const auto report = gg::aoi_retention(original, privatized, scene, !aoi_no_background);
    for (const auto& c : report.per_class) {
      std::printf("%-16s precision %.9f  recall %.9f  f1 %.9f  support %zu\n",
                  c.label.c_str(), c.precision, c.recall, c.f1, c.support);
    }
    std::printf("weighted         precision %.9f  recall %.9f  f1 %.9f\n",
                report.weighted_precision, report.weighted_recall, report.weighted_f1);
    if (!aoi_out.empty()) gg::write_aoi_csv(report, aoi_out);
  });

  // attack
  std::string at_scenario, at_input, at_embedder = "stat", at_out;
  std::uint64_t at_seed = 0;
  int at_jobs = 0;
  MechanismFlags at_mech;
  auto* attack = app.add_subcommand("attack", "re-identification attacks on privatized data");
  attack->add_option("--scenario", at_scenario, "blackbox, exemplars, whitebox or all")
      ->required();
  attack->add_option("--input", at_input, "dataset CSV")->required();
  at_mech.attach(attack, true);
  auto* at_seed_opt = attack->add_option("--seed", at_seed, "master seed");
  attack->add_option("--embedder", at_embedder, "stat");
  attack->add_option("--jobs", at_jobs, "worker threads (0 = all cores)");
  attack->add_option("--out", at_out, "write accuracy table CSV");
  attack->callback([&] {
    const auto espec = parse_embedder(at_embedder);
    const auto config = at_mech.build(at_seed, at_seed_opt->count() > 0);
    const auto dataset = read_streams(at_input);
    const int jobs = resolve_jobs(at_jobs);
    if (at_scenario == "all") {
      gg::ThreatTableRow row;
      row.mechanism = config.label();
      for (const auto scenario : {gg::ThreatScenario::Blackbox, gg::ThreatScenario::Exemplars,
                                  gg::ThreatScenario::Whitebox}) {
        const auto report =
            gg::run_threat_scenario(scenario, dataset, config, espec, at_seed, jobs);
        row.before = report.accuracy_before;
        switch (scenario) {
          case gg::ThreatScenario::Blackbox: row.blackbox = report.accuracy_after; break;
          case gg::ThreatScenario::Exemplars: row.exemplars = report.accuracy_after; break;
          case gg::ThreatScenario::Whitebox: row.whitebox = report.accuracy_after; break;
        }
        std::printf("%s: before %.9f after %.9f\n",
                    gg::threat_scenario_name(scenario).c_str(), report.accuracy_before,
                    report.accuracy_after);
      }
      if (!at_out.empty()) gg::write_threat_csv({row}, at_out);
    } else {
      const auto scenario = gg::threat_scenario_from_name(at_scenario);
      const auto report =
          gg::run_threat_scenario(scenario, dataset, config, espec, at_seed, jobs);
      std::printf("mechanism %s\naccuracy_before %.9f\naccuracy_after %.9f\n",
                  config.label().c_str(), report.accuracy_before, report.accuracy_after);
      if (!at_out.empty()) {
        gg::ThreatTableRow row;
        row.mechanism = config.label();
        row.before = report.accuracy_before;
        switch (scenario) {
          case gg::ThreatScenario::Blackbox: row.blackbox = report.accuracy_after; break;
          case gg::ThreatScenario::Exemplars: row.exemplars = report.accuracy_after; break;
          case gg::ThreatScenario::Whitebox: row.whitebox = report.accuracy_after; break;
        }
        gg::write_threat_csv({row}, at_out);
      }
    }
  });

  // synth
  gg::SyntheticDatasetSpec synth_spec;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "generate a synthetic gaze dataset");
  synth->add_option("--users", synth_spec.n_users, "number of users (<= 128)");
  synth->add_option("--trials", synth_spec.trials_per_user, "trials per user");
  synth->add_option("--duration", synth_spec.trial_duration_s, "trial length in seconds");
  synth->add_option("--rate", synth_spec.rate_hz, "sampling rate in Hz");
  synth->add_option("--seed", synth_spec.master_seed, "master seed");
  synth->add_option("--out", synth_out, "output CSV")->required();
  synth->callback([&] {
    const auto dataset = gg::generate_dataset(synth_spec);
    std::size_t n_samples = 0;
    for (const auto& s : dataset) n_samples += s.size();
    gg::write_stream_csv(dataset, synth_out);
    std::printf("wrote %d users x %d trials (%zu samples) -> %s\n", synth_spec.n_users,
                synth_spec.trials_per_user, n_samples, synth_out.c_str());
  });

  // validate
  std::string val_recording, val_schedule, val_out;
  auto* validate = app.add_subcommand("validate", "accuracy against a 3x3 target grid");
  validate->add_option("--recording", val_recording, "gaze CSV of the validation run")
      ->required();
  validate->add_option("--schedule", val_schedule, "target schedule JSON (default 3x3 cycle)");
  validate->add_option("--out", val_out, "write per-target error CSV");
  validate->callback([&] {
    const auto recording = read_single_stream(val_recording);
    const auto schedule = val_schedule.empty()
                              ? gg::default_schedule()
                              : gg::schedule_from_json(gg::read_text_file(val_schedule));
    const auto report = gg::validation_error(recording, schedule);
    for (const auto& t : report.per_target) {
      std::printf("target %d at (%+7.2f, %+7.2f)  mean %.9f deg  std %.9f deg  n=%zu\n",
                  t.grid_index, t.theta_deg, t.psi_deg, t.mean_deg, t.std_deg, t.n_samples);
    }
    std::printf("overall mean %.9f deg  std %.9f deg  n=%zu\n", report.mean_deg,
                report.std_deg, report.n_samples);
    if (!val_out.empty()) gg::write_validation_csv(report, val_out);
  });

  // bench
  std::string bench_mech = "all";
  std::size_t bench_samples = 1000000;
  MechanismFlags bench_flags;
  auto* bench = app.add_subcommand("bench", "per-sample mechanism throughput");
  bench->add_option("--mechanism", bench_mech, "mechanism name or all");
  bench->add_option("--samples", bench_samples, "stream length (>= 10000)");
  bench_flags.sigma_opt = bench->add_option("--sigma", bench_flags.sigma, "gaussian std");
  bench_flags.k_opt = bench->add_option("--k", bench_flags.k, "temporal factor");
  bench_flags.l_opt = bench->add_option("--l", bench_flags.l, "spatial factor");
  bench_flags.b_opt = bench->add_option("--b", bench_flags.b, "smoothing window");
  bench->callback([&] {
    std::vector<gg::MechanismConfig> configs;
    auto defaulted = [&](gg::MechanismKind kind) {
      switch (kind) {
        case gg::MechanismKind::None: return gg::MechanismConfig::none();
        case gg::MechanismKind::Gaussian:
          return gg::MechanismConfig::gaussian(
              bench_flags.sigma_opt->count() ? bench_flags.sigma : 3.0);
        case gg::MechanismKind::Temporal:
          return gg::MechanismConfig::temporal(bench_flags.k_opt->count() ? bench_flags.k : 3);
        case gg::MechanismKind::Spatial:
          return gg::MechanismConfig::spatial(bench_flags.l_opt->count() ? bench_flags.l : 144);
        case gg::MechanismKind::Smoothing:
          return gg::MechanismConfig::smoothing(bench_flags.b_opt->count() ? bench_flags.b
                                                                           : 150);
      }
      throw gg::InvalidParameter("unknown mechanism");
    };
    if (bench_mech == "all") {
      for (const auto kind :
           {gg::MechanismKind::None, gg::MechanismKind::Gaussian, gg::MechanismKind::Temporal,
            gg::MechanismKind::Spatial, gg::MechanismKind::Smoothing}) {
        configs.push_back(defaulted(kind));
      }
    } else {
      configs.push_back(defaulted(gg::mechanism_kind_from_name(bench_mech)));
    }
    std::printf("%-22s %12s %14s %16s\n", "mechanism", "samples", "ns/sample", "samples/s");
    for (const auto& config : configs) {
      const auto report = gg::bench_mechanism(config, bench_samples);
      std::printf("%-22s %12zu %14.2f %16.0f\n", report.mechanism.c_str(), report.n_samples,
                  report.ns_per_sample, report.samples_per_second);
    }
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::fprintf(stderr, "error: InvalidParameter: %s\n", e.what());
    return 1;
  } catch (const gg::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: Internal: %s\n", e.what());
    return 1;
  }
  return 0;
}
