#include "mcfqkd/cli/run.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "mcfqkd/bpm/crosstalk.hpp"
#include "mcfqkd/bpm/export.hpp"
#include "mcfqkd/io/files.hpp"
#include "mcfqkd/io/format.hpp"
#include "mcfqkd/io/svg.hpp"
#include "mcfqkd/threshold.hpp"

namespace mcfqkd::cli {

using nlohmann::json;
using io::format_number;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr const char* kVersion = "0.1.0";

class Writer {
 public:
  Writer(std::filesystem::path dir, std::ostream& log) : dir_(std::move(dir)), log_(log) {
    std::filesystem::create_directories(dir_);
  }

  void put(const std::string& name, const std::string& content) {
    io::write_file_atomic(dir_ / name, content);
    files_.push_back(name);
    log_ << "wrote " << (dir_ / name).string() << '\n';
  }

  RunSummary summary() const { return {dir_, files_}; }

 private:
  std::filesystem::path dir_;
  std::ostream& log_;
  std::vector<std::string> files_;
};

std::string row(std::initializer_list<std::string> cells) {
  std::string out;
  for (const auto& c : cells) {
    if (!out.empty()) out += ',';
    out += c;
  }
  return out + '\n';
}

std::string plot_svg(const io::PlotSpec& spec, const std::vector<io::Series>& series) {
  std::ostringstream os;
  io::write_svg_plot(os, spec, series);
  return os.str();
}

bool all_positive(const std::vector<double>& v) {
  for (double x : v)
    if (!(x > 0.0)) return false;
  return true;
}

// ---- Monte-Carlo visibility -------------------------------------------------

void run_visibility(const RunConfig& c, std::uint64_t seed, const RunOverrides& o, Writer& w) {
  std::string csv = row({"scene_id", "sigma_hz", "v_mean", "v_stderr", "qber"});
  std::vector<io::Series> series;
  const McConfig mc{c.n_samples, seed};
  for (std::size_t id = 0; id < c.scenes.size(); ++id) {
    io::Series s{"scene " + std::to_string(id), {}, {}};
    for (double sigma : c.sigma_hz) {
      const CrosstalkScene scene = c.scenes[id].with_sigma(sigma);
      const VisibilityEstimate v = visibility_mc(scene, mc);
      const double q = qber_estimate(scene, c.baseline_qber);
      csv += row({std::to_string(id), format_number(sigma), format_number(v.mean), format_number(v.std_err),
                  format_number(q)});
      s.x.push_back(sigma);
      s.y.push_back(v.mean);
    }
    series.push_back(std::move(s));
  }
  w.put("visibility.csv", csv);
  if (o.plot)
    w.put("visibility.svg", plot_svg({"Visibility vs phase noise", "sigma (Hz)", "E[V]", all_positive(c.sigma_hz)},
                                     series));
}

// ---- thresholds ---------------------------------------------------------------

std::vector<ThresholdPoint> threshold_rows(const RunConfig& c, std::optional<std::uint64_t> seed) {
  const CrosstalkScene& tmpl = c.scenes.front();
  if (c.method == ThresholdMethod::ClosedForm && c.sigma_hz.size() > 0) {
    bool increasing = true;
    for (std::size_t i = 1; i < c.sigma_hz.size(); ++i) increasing = increasing && c.sigma_hz[i] > c.sigma_hz[i - 1];
    if (increasing) return threshold_vs_noise({c.sigma_hz, tmpl});
  }
  const double s_inf = infinite_noise_threshold(tmpl.params);
  std::vector<ThresholdPoint> out;
  for (double sigma : c.sigma_hz) {
    ThresholdPoint pt;
    pt.sigma_hz = sigma;
    const CrosstalkScene scene = tmpl.with_sigma(sigma);
    switch (c.method) {
      case ThresholdMethod::ClosedForm: pt.result = find_threshold(scene); break;
      case ThresholdMethod::Bisection: pt.result = find_threshold_bisection(scene); break;
      case ThresholdMethod::MonteCarlo: pt.result = find_threshold_mc(scene, McConfig{c.n_samples, *seed}); break;
    }
    if (pt.result.crossing()) {
      pt.normalized = pt.result.s_star / s_inf;
      pt.snr_db = 10.0 * std::log10(pt.result.s_star);
    } else if (pt.result.kind == ThresholdKind::NoEffect) {
      pt.normalized = pt.snr_db = kInf;
    } else {
      pt.normalized = 0.0;
      pt.snr_db = -kInf;
    }
    out.push_back(pt);
  }
  return out;
}

std::string threshold_csv(const std::vector<ThresholdPoint>& pts) {
  std::string csv = row({"sigma_hz", "kind", "s_star", "s_star_db", "normalized"});
  for (const auto& p : pts)
    csv += row({format_number(p.sigma_hz), to_string(p.result.kind), format_number(p.result.scale_or_limit()),
                format_number(p.snr_db), format_number(p.normalized)});
  return csv;
}

void run_threshold_family(const RunConfig& c, std::optional<std::uint64_t> seed, const RunOverrides& o, Writer& w,
                          json& results) {
  const std::string name = to_string(c.command);
  const auto pts = threshold_rows(c, seed);
  w.put(name + ".csv", threshold_csv(pts));
  if (c.command == Command::PsrSweep) {
    const auto pos = psr_position({c.sigma_hz, c.scenes.front()});
    results["psr_sigma_star_hz"] = pos ? json(*pos) : json(nullptr);
  }
  if (!o.plot) return;
  io::Series s{name, {}, {}};
  for (const auto& p : pts) {
    s.x.push_back(p.sigma_hz);
    s.y.push_back(c.command == Command::SnrCurve ? p.snr_db : p.normalized);
  }
  const bool logx = all_positive(c.sigma_hz);
  if (c.command == Command::SnrCurve)
    w.put(name + ".svg", plot_svg({"Key-loss SNR vs phase noise", "sigma (Hz)", "threshold (dB)", logx}, {s}));
  else
    w.put(name + ".svg", plot_svg({"Normalized threshold vs phase noise", "sigma (Hz)", "s*/s_inf", logx}, {s}));
}

void run_psr_map(const RunConfig& c, const RunOverrides& o, Writer& w) {
  const auto cells = psr_map(c.v_w1, c.v_w2, {c.sigma_hz, c.scenes.front()});
  std::string csv = row({"v_w1", "v_w2", "sigma_star_hz"});
  for (const auto& cell : cells)
    csv += row({format_number(cell.v_w1), format_number(cell.v_w2),
                format_number(cell.sigma_star_hz.value_or(std::numeric_limits<double>::quiet_NaN()))});
  w.put("psr-map.csv", csv);
  if (!o.plot) return;
  std::vector<io::Series> series;
  for (std::size_t j = 0; j < c.v_w2.size(); ++j) {
    io::Series s{"v_w2 = " + format_number(c.v_w2[j]), {}, {}};
    for (std::size_t i = 0; i < c.v_w1.size(); ++i) {
      const auto& cell = cells[i * c.v_w2.size() + j];
      s.x.push_back(cell.v_w1);
      s.y.push_back(cell.sigma_star_hz.value_or(std::numeric_limits<double>::quiet_NaN()));
    }
    series.push_back(std::move(s));
  }
  w.put("psr-map.svg", plot_svg({"PSR position", "v_w1", "sigma* (Hz)", false}, series));
}

// ---- beam propagation ---------------------------------------------------------

std::string crosstalk_csv(const std::vector<bpm::CrosstalkReport>& reports) {
  std::string csv = "variant,trench_width_um,dn";
  for (std::size_t k : reports.front().neighbors) csv += ",crosstalk_db_core" + std::to_string(k);
  csv += ",absorbed_fraction\n";
  for (const auto& r : reports) {
    csv += r.variant + "," + format_number(r.trench_width_um) + "," + format_number(r.trench_dn);
    for (double x : r.crosstalk_db) csv += "," + format_number(x);
    csv += "," + format_number(r.absorbed_fraction) + "\n";
  }
  return csv;
}

bpm::CrosstalkStudyOptions study_options(const RunConfig& c) {
  bpm::CrosstalkStudyOptions opts;
  opts.launch_core = c.launch_core;
  opts.propagation.absorber_strength = c.absorber_strength;
  opts.keep_fields = c.export_fields;
  return opts;
}

void export_fields(const RunConfig& c, const bpm::CrosstalkReport& r, Writer& w) {
  const bpm::IndexMap map = bpm::build_index_map(c.fiber, c.grid);
  std::ostringstream csv, pgm;
  bpm::write_csv_grid(csv, map.nx, map.ny, map.n);
  bpm::write_index_pgm(pgm, map);
  w.put("index-map.csv", csv.str());
  w.put("index-map.pgm", pgm.str());
  const auto dump = [&](const bpm::ComplexField& f, const std::string& stem) {
    std::ostringstream fc, fp;
    bpm::write_csv_grid(fc, f.grid.nx, f.grid.ny, bpm::intensity(f));
    bpm::write_intensity_pgm(fp, f);
    w.put(stem + ".csv", fc.str());
    w.put(stem + ".pgm", fp.str());
  };
  dump(*r.launched_field, "intensity-launch");
  dump(*r.final_field, "intensity-final");
}

void run_bpm(const RunConfig& c, const RunOverrides& o, Writer& w, std::ostream& log) {
  const auto opts = study_options(c);
  std::vector<bpm::FiberCrossSection> variants;
  if (c.command == Command::TrenchStudy)
    variants = bpm::trench_variants(c.fiber, c.trench_widths_um, c.trench_dns);
  else
    variants = {c.fiber};
  std::vector<bpm::CrosstalkReport> reports;
  for (const auto& v : variants) {
    log << "propagating " << bpm::variant_label(v) << " over " << c.distance_um << " um\n";
    reports.push_back(bpm::measure_crosstalk(v, c.grid, c.distance_um, opts));
  }
  const std::string name = to_string(c.command);
  w.put(name + ".csv", crosstalk_csv(reports));
  if (c.command == Command::BpmCrosstalk && c.export_fields) export_fields(c, reports.front(), w);
  if (!o.plot) return;
  std::vector<io::Series> series;
  if (c.command == Command::TrenchStudy) {
    for (double dn : c.trench_dns) {
      io::Series s{"dn " + format_number(dn), {}, {}};
      for (const auto& r : reports) {
        if (r.trench_width_um > 0.0 && r.trench_dn != dn) continue;
        s.x.push_back(r.trench_width_um);
        s.y.push_back(r.crosstalk_db.front());
      }
      series.push_back(std::move(s));
    }
    w.put(name + ".svg", plot_svg({"Crosstalk to core " + std::to_string(reports.front().neighbors.front()),
                                   "trench width (um)", "crosstalk (dB)", false},
                                  series));
  } else {
    io::Series s{bpm::variant_label(c.fiber), {}, {}};
    for (std::size_t i = 0; i < reports.front().neighbors.size(); ++i) {
      s.x.push_back(static_cast<double>(reports.front().neighbors[i]));
      s.y.push_back(reports.front().crosstalk_db[i]);
    }
    w.put(name + ".svg", plot_svg({"Crosstalk per neighbour core", "core", "crosstalk (dB)", false}, {s}));
  }
}

}  // namespace

std::filesystem::path resolve_output_dir(const RunConfig& config, const RunOverrides& overrides) {
  if (overrides.output_dir) return *overrides.output_dir;
  if (config.output_dir) return *config.output_dir;
  if (const char* env = std::getenv(kOutputDirEnv); env && *env) return env;
  return kDefaultOutputDir;
}

RunSummary run(const RunConfig& config, const RunOverrides& overrides, std::ostream& log) {
  const std::optional<std::uint64_t> seed = overrides.seed ? overrides.seed : config.seed;
  if (config.needs_seed() && !seed)
    throw ConfigError("seed", std::string("seed: ") + to_string(config.command) +
                                  " is a Monte-Carlo command; pass --seed or set \"seed\"");
  Writer w(resolve_output_dir(config, overrides), log);
  json results = json::object();
  switch (config.command) {
    case Command::Visibility: run_visibility(config, *seed, overrides, w); break;
    case Command::Threshold:
    case Command::PsrSweep:
    case Command::SnrCurve: run_threshold_family(config, seed, overrides, w, results); break;
    case Command::PsrMap: run_psr_map(config, overrides, w); break;
    case Command::BpmCrosstalk:
    case Command::TrenchStudy: run_bpm(config, overrides, w, log); break;
  }
  json meta;
  meta["tool"] = std::string("mcfqkd ") + kVersion;
  meta["command"] = to_string(config.command);
  meta["seed"] = seed ? json(*seed) : json(nullptr);
  meta["parameters"] = config.resolved_parameters();
  meta["results"] = results;
  meta["outputs"] = w.summary().files;
  w.put("run-meta.json", meta.dump(2) + "\n");
  return w.summary();
}

int exit_status_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e)) return 1;
  return 2;
}

}  // namespace mcfqkd::cli
