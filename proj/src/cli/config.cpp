#include "mcfqkd/cli/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mcfqkd/bpm/crosstalk.hpp"
#include "mcfqkd/threshold.hpp"

namespace mcfqkd::cli {

using nlohmann::json;

namespace {

constexpr double kParaxialLimit = 0.02;
constexpr double kSingleModeCutoff = 2.405;

// Typed access to one JSON object with unknown-key detection.
class Section {
 public:
  Section(const json* obj, std::string path, std::vector<Diagnostic>& diags)
      : obj_(obj), path_(std::move(path)), diags_(&diags) {
    if (obj_ && !obj_->is_object()) {
      error(path_, "must be an object");
      obj_ = nullptr;
    }
  }

  std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }
  const std::string& path() const { return path_; }
  std::vector<Diagnostic>& diags() { return *diags_; }
  bool present(const std::string& k) const { return obj_ && obj_->contains(k); }

  const json* raw(const std::string& k) {
    seen_.insert(k);
    if (!obj_) return nullptr;
    const auto it = obj_->find(k);
    return it == obj_->end() ? nullptr : &*it;
  }

  std::optional<double> number(const std::string& k) {
    const json* v = raw(k);
    if (!v) return std::nullopt;
    if (!v->is_number()) {
      error(key(k), "must be a number");
      return std::nullopt;
    }
    return v->get<double>();
  }
  double number(const std::string& k, double def) { return number(k).value_or(def); }

  std::size_t count(const std::string& k, std::size_t def) {
    const json* v = raw(k);
    if (!v) return def;
    if (!v->is_number_integer() || v->get<long long>() < 0) {
      error(key(k), "must be a non-negative integer");
      return def;
    }
    return v->get<std::size_t>();
  }

  bool boolean(const std::string& k, bool def) {
    const json* v = raw(k);
    if (!v) return def;
    if (!v->is_boolean()) {
      error(key(k), "must be true or false");
      return def;
    }
    return v->get<bool>();
  }

  std::optional<std::string> string(const std::string& k) {
    const json* v = raw(k);
    if (!v) return std::nullopt;
    if (!v->is_string()) {
      error(key(k), "must be a string");
      return std::nullopt;
    }
    return v->get<std::string>();
  }

  std::optional<std::vector<double>> numbers(const std::string& k) {
    const json* v = raw(k);
    if (!v) return std::nullopt;
    if (!v->is_array()) {
      error(key(k), "must be an array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (const auto& e : *v) {
      if (!e.is_number()) {
        error(key(k), "must be an array of numbers");
        return std::nullopt;
      }
      out.push_back(e.get<double>());
    }
    return out;
  }

  Section child(const std::string& k) { return Section(raw(k), key(k), *diags_); }

  void finish() {
    if (!obj_) return;
    for (const auto& [k, v] : obj_->items())
      if (!seen_.count(k)) error(key(k), "unknown key '" + k + "'");
  }

  void error(const std::string& k, const std::string& msg) { diags_->push_back({Diagnostic::Level::Error, k, msg}); }
  void warn(const std::string& k, const std::string& msg) { diags_->push_back({Diagnostic::Level::Warning, k, msg}); }

 private:
  const json* obj_;
  std::string path_;
  std::vector<Diagnostic>* diags_;
  std::set<std::string> seen_;
};

CrosstalkSource parse_source(Section s, double delta_t) {
  CrosstalkSource src;
  src.power_rel = s.number("power_rel", 0.0);
  src.noise_scale = s.number("noise_scale", 1.0);
  const auto f = s.number("freq_offset_hz");
  const auto v = s.number("v_omega");
  const auto dl = s.number("wavelength_shift_nm");
  const int given = int(f.has_value()) + int(v.has_value()) + int(dl.has_value());
  if (given > 1) s.error(s.key("freq_offset_hz"), "give only one of freq_offset_hz, v_omega, wavelength_shift_nm");
  if (f) src.freq_offset_hz = *f;
  if (v) {
    if (*v < -1.0 || *v > 1.0)
      s.error(s.key("v_omega"), "must lie in [-1, 1]");
    else
      src.freq_offset_hz = freq_offset_for_v_omega(*v, delta_t);
  }
  if (dl) src.freq_offset_hz = wavelength_shift_to_freq(*dl * 1e-9);
  if (!(src.power_rel >= 0.0) || !std::isfinite(src.power_rel)) s.error(s.key("power_rel"), "must be finite and non-negative");
  if (!(src.noise_scale >= 0.0) || !std::isfinite(src.noise_scale))
    s.error(s.key("noise_scale"), "must be finite and non-negative");
  s.finish();
  return src;
}

CrosstalkScene parse_scene(Section s) {
  CrosstalkScene scene;
  auto& p = scene.params;
  p.d1 = s.number("d1", p.d1);
  p.d2 = s.number("d2", p.d2);
  p.delta_t = s.number("delta_t_s", p.delta_t);
  p.alpha.value_db = s.number("alpha_db", p.alpha.value_db);
  p.visibility_threshold = s.number("visibility_threshold", p.visibility_threshold);
  try {
    p.validate();
  } catch (const std::exception& e) {
    s.error(s.path(), e.what());
  }
  if (const json* arr = s.raw("sources")) {
    if (!arr->is_array()) {
      s.error(s.key("sources"), "must be an array of objects");
    } else {
      for (std::size_t i = 0; i < arr->size(); ++i) {
        const std::string path = s.key("sources") + "[" + std::to_string(i) + "]";
        scene.sources.push_back(parse_source(Section(&(*arr)[i], path, s.diags()), p.delta_t));
      }
    }
  }
  s.finish();
  return scene;
}

std::vector<double> parse_sigma(Section& params, bool& ok) {
  const std::string k = params.key("sigma_hz");
  const json* v = params.raw("sigma_hz");
  ok = true;
  if (!v) return {0.0};
  std::vector<double> out;
  if (v->is_number()) {
    out = {v->get<double>()};
  } else if (v->is_array()) {
    for (const auto& e : *v) {
      if (!e.is_number()) {
        params.error(k, "must contain numbers only");
        ok = false;
        return {0.0};
      }
      out.push_back(e.get<double>());
    }
  } else if (v->is_object()) {
    std::vector<Diagnostic> local;
    Section r(v, k, local);
    const double start = r.number("start", 0.0);
    const double stop = r.number("stop", 0.0);
    const std::size_t points = r.count("points", 0);
    const std::string spacing = r.string("spacing").value_or("log");
    r.finish();
    for (auto& d : local) params.error(d.key, d.message);
    if (!local.empty()) {
      ok = false;
      return {0.0};
    }
    if (points < 2) {
      params.error(k + ".points", "must be at least 2");
      ok = false;
      return {0.0};
    }
    if (spacing == "log") {
      if (!(start > 0.0 && stop > 0.0)) {
        params.error(k, "log spacing needs positive start and stop");
        ok = false;
        return {0.0};
      }
      const double a = std::log10(start), b = std::log10(stop);
      for (std::size_t i = 0; i < points; ++i)
        out.push_back(std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1)));
    } else if (spacing == "linear") {
      for (std::size_t i = 0; i < points; ++i)
        out.push_back(start + (stop - start) * static_cast<double>(i) / static_cast<double>(points - 1));
    } else {
      params.error(k + ".spacing", "must be \"log\" or \"linear\"");
      ok = false;
      return {0.0};
    }
  } else {
    params.error(k, "must be a number, an array or a {start, stop, points, spacing} object");
    ok = false;
    return {0.0};
  }
  for (double s : out) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      params.error(k, "sigma_hz values must be finite and non-negative");
      ok = false;
      break;
    }
  }
  return out;
}

std::optional<bpm::Lattice> lattice_from_string(const std::string& s) {
  for (auto l : {bpm::Lattice::Square4, bpm::Lattice::Hex7, bpm::Lattice::Pair, bpm::Lattice::Single})
    if (s == bpm::to_string(l)) return l;
  return std::nullopt;
}

void parse_fiber(Section s, bpm::FiberCrossSection& xs) {
  xs.cladding_diameter_um = s.number("cladding_diameter_um", xs.cladding_diameter_um);
  if (auto l = s.string("lattice")) {
    if (auto v = lattice_from_string(*l)) {
      xs.lattice = *v;
      if (*v == bpm::Lattice::Hex7 && !s.present("pitch_um")) xs.pitch_um = 40.0;
    } else {
      s.error(s.key("lattice"), "must be one of square4, hex7, pair, single");
    }
  }
  xs.pitch_um = s.number("pitch_um", xs.pitch_um);
  xs.core_radius_um = s.number("core_radius_um", xs.core_radius_um);
  xs.core_dn = s.number("core_dn", xs.core_dn);
  xs.cladding_index = s.number("cladding_index", xs.cladding_index);
  if (s.present("trench")) {
    Section t = s.child("trench");
    bpm::Trench tr;
    tr.width_um = t.number("width_um", tr.width_um);
    tr.dn_below_cladding = t.number("dn_below_cladding", tr.dn_below_cladding);
    tr.gap_um = t.number("gap_um", tr.gap_um);
    t.finish();
    xs.trench = tr;
  }
  s.finish();
}

void parse_grid(Section s, bpm::BpmGrid& g, double cladding_index) {
  g.nx = s.count("nx", g.nx);
  g.ny = s.count("ny", g.ny);
  g.dx = s.number("dx_um", g.dx);
  g.dy = s.number("dy_um", g.dy);
  g.dz = s.number("dz_um", g.dz);
  g.wavelength = s.number("wavelength_um", g.wavelength);
  g.reference_index = s.number("reference_index", cladding_index);
  g.absorber_width = s.number("absorber_width_um", g.absorber_width);
  s.finish();
}

void check_bpm(const RunConfig& c, Section& params) {
  const std::string fk = params.key("fiber");
  try {
    c.grid.validate_for(c.fiber);
  } catch (const std::exception& e) {
    params.error(params.key("grid"), e.what());
  }
  const auto paraxial = [&](double dn, const std::string& key) {
    if (dn > kParaxialLimit)
      params.warn(key, "index step " + std::to_string(dn) + " exceeds the paraxial limit 0.02");
  };
  paraxial(c.fiber.core_dn, fk + ".core_dn");
  if (c.fiber.trench) paraxial(c.fiber.trench->dn_below_cladding, fk + ".trench.dn_below_cladding");
  for (double dn : c.trench_dns) paraxial(dn, params.key("trench_study.dns"));
  if (c.fiber.core_dn > 0.0 && c.grid.wavelength > 0.0) {
    const double v = bpm::v_number(c.fiber.core_radius_um, c.fiber.core_index(), c.fiber.cladding_index, c.grid.wavelength);
    if (v > kSingleModeCutoff)
      params.warn(fk + ".core_dn", "V-number " + std::to_string(v) + " above 2.405: the core is multimode");
  }
  if (!(c.distance_um >= 0.0)) params.error(params.key("bpm.distance_um"), "must be non-negative");
  if (!(c.absorber_strength >= 0.0)) params.error(params.key("bpm.absorber_strength"), "must be non-negative");
  try {
    if (c.launch_core >= c.fiber.core_count()) params.error(params.key("bpm.launch_core"), "no such core");
  } catch (const std::exception&) {
  }
  if (c.command == Command::TrenchStudy) {
    for (double w : c.trench_widths_um)
      if (!(w >= 0.0)) params.error(params.key("trench_study.widths_um"), "widths must be non-negative");
    for (double dn : c.trench_dns)
      if (!(dn >= 0.0)) params.error(params.key("trench_study.dns"), "dn values must be non-negative");
    for (const auto& v : bpm::trench_variants(c.fiber, c.trench_widths_um, c.trench_dns)) {
      try {
        c.grid.validate_for(v);
      } catch (const std::exception& e) {
        params.error(params.key("trench_study"), bpm::variant_label(v) + ": " + e.what());
      }
    }
  }
}

bool is_threshold_family(Command c) {
  return c == Command::Threshold || c == Command::PsrSweep || c == Command::PsrMap || c == Command::SnrCurve;
}

}  // namespace

const char* to_string(Command c) {
  switch (c) {
    case Command::Visibility: return "visibility";
    case Command::Threshold: return "threshold";
    case Command::PsrSweep: return "psr-sweep";
    case Command::PsrMap: return "psr-map";
    case Command::SnrCurve: return "snr-curve";
    case Command::BpmCrosstalk: return "bpm-crosstalk";
    case Command::TrenchStudy: return "trench-study";
  }
  return "?";
}

std::optional<Command> command_from_string(const std::string& s) {
  for (auto c : {Command::Visibility, Command::Threshold, Command::PsrSweep, Command::PsrMap, Command::SnrCurve,
                 Command::BpmCrosstalk, Command::TrenchStudy})
    if (s == to_string(c)) return c;
  return std::nullopt;
}

const char* to_string(ThresholdMethod m) {
  switch (m) {
    case ThresholdMethod::ClosedForm: return "closed-form";
    case ThresholdMethod::Bisection: return "bisection";
    case ThresholdMethod::MonteCarlo: return "monte-carlo";
  }
  return "?";
}

std::string to_string(const Diagnostic& d) {
  return std::string(d.level == Diagnostic::Level::Error ? "error" : "warning") + ": " + d.key + ": " + d.message;
}

bool RunConfig::needs_seed() const {
  if (command == Command::Visibility) return true;
  return (command == Command::Threshold || command == Command::SnrCurve) && method == ThresholdMethod::MonteCarlo;
}

bool ParseResult::ok() const {
  for (const auto& d : diagnostics)
    if (d.level == Diagnostic::Level::Error) return false;
  return true;
}

void ParseResult::throw_if_error() const {
  for (const auto& d : diagnostics)
    if (d.level == Diagnostic::Level::Error) throw ConfigError(d.key, d.key + ": " + d.message);
}

ParseResult parse_config(const json& doc) {
  ParseResult out;
  auto& diags = out.diagnostics;
  auto& c = out.config;
  Section top(&doc, "", diags);

  if (auto cmd = top.string("command")) {
    if (auto parsed = command_from_string(*cmd))
      c.command = *parsed;
    else
      top.error("command", "unknown command '" + *cmd + "'");
  } else if (!top.present("command")) {
    top.error("command", "missing");
  }
  if (const json* s = top.raw("seed")) {
    if (s->is_number_unsigned() || (s->is_number_integer() && s->get<long long>() >= 0))
      c.seed = s->get<std::uint64_t>();
    else
      top.error("seed", "must be an unsigned 64-bit integer");
  }
  c.output_dir = top.string("output_dir");

  Section params = top.child("parameters");
  bool sigma_ok = true;
  c.sigma_hz = parse_sigma(params, sigma_ok);

  if (params.present("scene") && params.present("scenes"))
    params.error(params.key("scenes"), "give either scene or scenes");
  if (params.present("scenes")) {
    const json* arr = params.raw("scenes");
    if (!arr->is_array() || arr->empty()) {
      params.error(params.key("scenes"), "must be a non-empty array");
    } else {
      for (std::size_t i = 0; i < arr->size(); ++i)
        c.scenes.push_back(parse_scene(Section(&(*arr)[i], params.key("scenes") + "[" + std::to_string(i) + "]", diags)));
    }
    if (c.command != Command::Visibility && c.scenes.size() > 1)
      params.error(params.key("scenes"), "only the visibility command accepts several scenes");
  } else {
    c.scenes.push_back(parse_scene(params.child("scene")));
  }

  {
    Section mc = params.child("mc");
    c.n_samples = mc.count("n_samples", c.n_samples);
    if (c.n_samples < 2) mc.error(mc.key("n_samples"), "must be at least 2");
    mc.finish();
  }
  c.baseline_qber = params.number("baseline_qber", c.baseline_qber);
  if (!(c.baseline_qber >= 0.0 && c.baseline_qber < 0.5)) params.error(params.key("baseline_qber"), "must lie in [0, 0.5)");
  if (auto m = params.string("method")) {
    if (*m == "closed-form")
      c.method = ThresholdMethod::ClosedForm;
    else if (*m == "bisection")
      c.method = ThresholdMethod::Bisection;
    else if (*m == "monte-carlo")
      c.method = ThresholdMethod::MonteCarlo;
    else
      params.error(params.key("method"), "must be closed-form, bisection or monte-carlo");
  }
  {
    Section pm = params.child("psr_map");
    c.v_w1 = pm.numbers("v_w1").value_or(std::vector<double>{});
    c.v_w2 = pm.numbers("v_w2").value_or(std::vector<double>{});
    pm.finish();
  }
  parse_fiber(params.child("fiber"), c.fiber);
  parse_grid(params.child("grid"), c.grid, c.fiber.cladding_index);
  {
    Section b = params.child("bpm");
    c.distance_um = b.number("distance_um", c.distance_um);
    c.launch_core = b.count("launch_core", c.launch_core);
    c.absorber_strength = b.number("absorber_strength", c.absorber_strength);
    c.export_fields = b.boolean("export", c.export_fields);
    b.finish();
  }
  {
    Section t = params.child("trench_study");
    c.trench_widths_um = t.numbers("widths_um").value_or(c.trench_widths_um);
    c.trench_dns = t.numbers("dns").value_or(c.trench_dns);
    t.finish();
  }
  params.finish();
  top.finish();
  if (!out.ok()) return out;

  // command-specific checks on a structurally valid document
  const std::string scene_key = params.key("scene");
  if (c.command == Command::Visibility) {
    for (std::size_t i = 0; i < c.scenes.size(); ++i) {
      try {
        c.scenes[i].validate();
      } catch (const std::exception& e) {
        params.error(scene_key, e.what());
      }
    }
  }
  if (params.present("method") && c.method != ThresholdMethod::ClosedForm && c.command != Command::Threshold &&
      c.command != Command::SnrCurve)
    params.error(params.key("method"), "only threshold and snr-curve accept a non-default method");
  if (is_threshold_family(c.command)) {
    const auto& sc = c.scenes.front();
    if (sc.sources.empty())
      params.error(scene_key + ".sources", "empty: the threshold is undefined without crosstalk sources");
    else if (!(sc.total_weight() > 0.0))
      params.error(scene_key + ".sources", "all power_rel are zero: the threshold is undefined");
    if (!(sc.params.baseline_visibility() > sc.params.visibility_threshold))
      params.error(scene_key + ".visibility_threshold", "baseline visibility does not exceed the threshold");
    if (sigma_ok && (c.command == Command::PsrSweep || c.command == Command::PsrMap || c.command == Command::SnrCurve)) {
      bool increasing = c.sigma_hz.size() >= 3;
      for (std::size_t i = 1; i < c.sigma_hz.size(); ++i) increasing = increasing && c.sigma_hz[i] > c.sigma_hz[i - 1];
      if (!increasing) params.error(params.key("sigma_hz"), "sweeps need at least 3 strictly increasing values");
    }
    if (c.command == Command::PsrMap) {
      if (sc.sources.size() != 2) params.error(scene_key + ".sources", "psr-map needs exactly two sources");
      if (c.v_w1.empty() || c.v_w2.empty()) params.error(params.key("psr_map"), "v_w1 and v_w2 must be non-empty");
      for (double v : c.v_w1)
        if (!(v >= -1.0 && v <= 1.0)) params.error(params.key("psr_map.v_w1"), "values must lie in [-1, 1]");
      for (double v : c.v_w2)
        if (!(v >= -1.0 && v <= 1.0)) params.error(params.key("psr_map.v_w2"), "values must lie in [-1, 1]");
    }
  }
  if (c.is_bpm()) check_bpm(c, params);
  return out;
}

ParseResult load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.diagnostics.push_back({Diagnostic::Level::Error, path, "cannot open config file"});
    return r;
  }
  json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) {
    ParseResult r;
    r.diagnostics.push_back({Diagnostic::Level::Error, path, "not valid JSON"});
    return r;
  }
  return parse_config(doc);
}

nlohmann::json RunConfig::resolved_parameters() const {
  json p;
  p["sigma_hz"] = sigma_hz;
  const auto scene_json = [](const CrosstalkScene& s) {
    json j;
    j["d1"] = s.params.d1;
    j["d2"] = s.params.d2;
    j["delta_t_s"] = s.params.delta_t;
    j["alpha_db"] = s.params.alpha.value_db;
    j["visibility_threshold"] = s.params.visibility_threshold;
    j["sources"] = json::array();
    for (const auto& src : s.sources)
      j["sources"].push_back(
          {{"power_rel", src.power_rel}, {"freq_offset_hz", src.freq_offset_hz}, {"noise_scale", src.noise_scale}});
    return j;
  };
  if (is_bpm()) {
    json f{{"cladding_diameter_um", fiber.cladding_diameter_um},
           {"lattice", bpm::to_string(fiber.lattice)},
           {"pitch_um", fiber.pitch_um},
           {"core_radius_um", fiber.core_radius_um},
           {"core_dn", fiber.core_dn},
           {"cladding_index", fiber.cladding_index}};
    if (fiber.trench)
      f["trench"] = {{"width_um", fiber.trench->width_um},
                     {"dn_below_cladding", fiber.trench->dn_below_cladding},
                     {"gap_um", fiber.trench->gap_um}};
    p["fiber"] = f;
    p["grid"] = {{"nx", grid.nx},
                 {"ny", grid.ny},
                 {"dx_um", grid.dx},
                 {"dy_um", grid.dy},
                 {"dz_um", grid.dz},
                 {"wavelength_um", grid.wavelength},
                 {"reference_index", grid.reference_index},
                 {"absorber_width_um", grid.absorber_width}};
    p["bpm"] = {{"distance_um", distance_um},
                {"launch_core", launch_core},
                {"absorber_strength", absorber_strength},
                {"export", export_fields}};
    if (command == Command::TrenchStudy) p["trench_study"] = {{"widths_um", trench_widths_um}, {"dns", trench_dns}};
    p.erase("sigma_hz");
    return p;
  }
  if (command == Command::Visibility) {
    p["scenes"] = json::array();
    for (const auto& s : scenes) p["scenes"].push_back(scene_json(s));
    p["mc"] = {{"n_samples", n_samples}};
    p["baseline_qber"] = baseline_qber;
    return p;
  }
  p["scene"] = scene_json(scenes.front());
  p["method"] = to_string(method);
  if (method == ThresholdMethod::MonteCarlo) p["mc"] = {{"n_samples", n_samples}};
  if (command == Command::PsrMap) p["psr_map"] = {{"v_w1", v_w1}, {"v_w2", v_w2}};
  return p;
}

}  // namespace mcfqkd::cli
