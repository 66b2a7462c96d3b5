#include "decaycoh/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <sstream>

#include "decaycoh/errors.hpp"
#include "decaycoh/isotropic.hpp"
#include "decaycoh/wav_io.hpp"
#include "json.hpp"

namespace decaycoh {
namespace {

using nlohmann::json;

constexpr double kDegree = std::numbers::pi / 180.0;

// ---------------------------------------------------------------------------
// JSON <-> config

json point_to_json(const Point3& p) { return json::array({p.x, p.y, p.z}); }

Point3 point_from_json(const json& j) {
  if (!j.is_array() || j.size() != 3) throw ValidationError("expected a 3-element array");
  return {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

json room_to_json(const RoomSpec& r) {
  return {{"lx", r.lx}, {"ly", r.ly}, {"lz", r.lz}, {"rx", r.rx},
          {"ry", r.ry}, {"rz", r.rz}, {"c", r.c}};
}

RoomSpec room_from_json(const json& j) {
  RoomSpec r;
  r.lx = j.at("lx").get<double>();
  r.ly = j.at("ly").get<double>();
  r.lz = j.at("lz").get<double>();
  r.rx = j.at("rx").get<double>();
  r.ry = j.at("ry").get<double>();
  r.rz = j.at("rz").get<double>();
  r.c = j.at("c").get<double>();
  return r;
}

json walls_to_json(const std::optional<WallCoefficients>& w) {
  if (!w) return nullptr;
  return {{"x0", w->x0}, {"x1", w->x1}, {"y0", w->y0},
          {"y1", w->y1}, {"z0", w->z0}, {"z1", w->z1}};
}

std::optional<WallCoefficients> walls_from_json(const json& j) {
  if (j.is_null()) return std::nullopt;
  return WallCoefficients{j.at("x0").get<double>(), j.at("x1").get<double>(),
                          j.at("y0").get<double>(), j.at("y1").get<double>(),
                          j.at("z0").get<double>(), j.at("z1").get<double>()};
}

const char* window_name(WindowType w) {
  switch (w) {
    case WindowType::kHann: return "hann";
    case WindowType::kHannSymmetric: return "hann_symmetric";
    case WindowType::kRectangular: return "rectangular";
  }
  return "hann";
}

WindowType window_from_name(const std::string& s) {
  if (s == "hann") return WindowType::kHann;
  if (s == "hann_symmetric") return WindowType::kHannSymmetric;
  if (s == "rectangular") return WindowType::kRectangular;
  throw ValidationError("unknown window type '" + s + "'");
}

json to_json(const ExperimentConfig& cfg) {
  json array = {{"n_mics", cfg.array.n_mics},
                {"spacing", cfg.array.spacing},
                {"theta_mic_deg", cfg.array.theta_mic / kDegree},
                {"phi_mic_deg", cfg.array.phi_mic / kDegree},
                {"center", cfg.array.center ? point_to_json(*cfg.array.center) : json(nullptr)}};
  const auto& s = cfg.simulation;
  json simulation = {{"source", point_to_json(s.source)},
                     {"sample_rate", s.sample_rate},
                     {"length_s", s.length_s},
                     {"max_order", s.max_order},
                     {"fractional_delay", s.fractional_delay},
                     {"fractional_taps", s.fractional_taps},
                     {"max_images", s.max_images},
                     {"walls", walls_to_json(s.walls)}};
  const auto& e = cfg.estimation;
  json pairs = "adjacent";
  if (e.pair_policy == PairPolicy::kExplicit) {
    pairs = json::array();
    for (const auto& [a, b] : e.pairs) pairs.push_back({a, b});
  }
  json estimation = {{"interval_s", e.interval_s},
                     {"window_length", e.window_length},
                     {"overlap", e.overlap},
                     {"dft_length", e.dft_length},
                     {"window", window_name(e.window)},
                     {"pairs", pairs},
                     {"allow_mixed_spacing", e.allow_mixed_spacing}};
  const auto& m = cfg.model;
  json model = {{"time_offset_s", m.time_offset_s},
                {"tolerance", m.quadrature.tolerance},
                {"max_panels", m.quadrature.max_panels},
                {"split_domain", m.quadrature.split_domain},
                {"frequencies_hz", m.frequencies_hz ? json(*m.frequencies_hz) : json(nullptr)},
                {"mc_samples", m.mc_samples}};
  return {{"room", room_to_json(cfg.room)},
          {"array", array},
          {"simulation", simulation},
          {"estimation", estimation},
          {"model", model},
          {"compare", {{"band_hz", {cfg.band_lo_hz, cfg.band_hi_hz}}, {"gnuplot", cfg.emit_gnuplot}}},
          {"output_dir", cfg.output_dir.string()},
          {"seed", cfg.seed}};
}

ExperimentConfig from_json(const json& j) {
  ExperimentConfig cfg;
  cfg.room = room_from_json(j.at("room"));

  const json& a = j.at("array");
  cfg.array.n_mics = a.at("n_mics").get<std::size_t>();
  cfg.array.spacing = a.at("spacing").get<double>();
  cfg.array.theta_mic = a.at("theta_mic_deg").get<double>() * kDegree;
  cfg.array.phi_mic = a.at("phi_mic_deg").get<double>() * kDegree;
  if (!a.at("center").is_null()) cfg.array.center = point_from_json(a.at("center"));

  const json& s = j.at("simulation");
  cfg.simulation.source = point_from_json(s.at("source"));
  cfg.simulation.sample_rate = s.at("sample_rate").get<double>();
  cfg.simulation.length_s = s.at("length_s").get<double>();
  cfg.simulation.max_order = s.at("max_order").get<int>();
  cfg.simulation.fractional_delay = s.at("fractional_delay").get<bool>();
  cfg.simulation.fractional_taps = s.at("fractional_taps").get<std::size_t>();
  cfg.simulation.max_images = s.at("max_images").get<std::size_t>();
  cfg.simulation.walls = walls_from_json(s.at("walls"));

  const json& e = j.at("estimation");
  cfg.estimation.interval_s = e.at("interval_s").get<double>();
  cfg.estimation.window_length = e.at("window_length").get<std::size_t>();
  cfg.estimation.overlap = e.at("overlap").get<double>();
  cfg.estimation.dft_length = e.at("dft_length").get<std::size_t>();
  cfg.estimation.window = window_from_name(e.at("window").get<std::string>());
  const json& pairs = e.at("pairs");
  if (pairs.is_string()) {
    if (pairs.get<std::string>() != "adjacent") {
      throw ValidationError("estimation.pairs must be \"adjacent\" or a list of index pairs");
    }
    cfg.estimation.pair_policy = PairPolicy::kAdjacent;
  } else {
    cfg.estimation.pair_policy = PairPolicy::kExplicit;
    for (const auto& p : pairs) {
      if (!p.is_array() || p.size() != 2) throw ValidationError("each pair needs two indices");
      cfg.estimation.pairs.emplace_back(p[0].get<std::size_t>(), p[1].get<std::size_t>());
    }
  }
  cfg.estimation.allow_mixed_spacing = e.at("allow_mixed_spacing").get<bool>();

  const json& m = j.at("model");
  cfg.model.time_offset_s = m.at("time_offset_s").get<double>();
  cfg.model.quadrature.tolerance = m.at("tolerance").get<double>();
  cfg.model.quadrature.max_panels = m.at("max_panels").get<std::size_t>();
  cfg.model.quadrature.split_domain = m.at("split_domain").get<bool>();
  if (!m.at("frequencies_hz").is_null()) {
    cfg.model.frequencies_hz = m.at("frequencies_hz").get<std::vector<double>>();
  }
  cfg.model.mc_samples = m.at("mc_samples").get<std::size_t>();

  const json& c = j.at("compare");
  const json& band = c.at("band_hz");
  if (!band.is_array() || band.size() != 2) throw ValidationError("compare.band_hz needs [lo, hi]");
  cfg.band_lo_hz = band[0].get<double>();
  cfg.band_hi_hz = band[1].get<double>();
  cfg.emit_gnuplot = c.at("gnuplot").get<bool>();
  cfg.output_dir = j.at("output_dir").get<std::string>();
  cfg.seed = j.at("seed").get<std::uint64_t>();
  return cfg;
}

void reject_unknown_keys(const json& user, const json& defaults, const std::string& where) {
  for (auto it = user.begin(); it != user.end(); ++it) {
    const std::string path = where.empty() ? it.key() : where + "." + it.key();
    if (!defaults.contains(it.key())) throw ValidationError("unknown config key '" + path + "'");
    const json& d = defaults.at(it.key());
    if (d.is_object() && it.value().is_object()) reject_unknown_keys(it.value(), d, path);
  }
}

void apply_override(json& doc, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ValidationError("override '" + assignment + "' must look like key.path=value");
  }
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);
  json* node = &doc;
  std::stringstream parts(key);
  std::string part;
  while (std::getline(parts, part, '.')) {
    if (!node->is_object() || !node->contains(part)) {
      throw ValidationError("unknown config key '" + key + "'");
    }
    node = &(*node)[part];
  }
  json value = json::parse(text, nullptr, /*allow_exceptions=*/false);
  if (value.is_discarded()) value = text;
  *node = std::move(value);
}

ExperimentConfig build_config(const json& user, const std::vector<std::string>& overrides) {
  try {
    json doc = to_json(ExperimentConfig{});
    if (!user.is_null()) {
      if (!user.is_object()) throw ValidationError("config must be a JSON object");
      reject_unknown_keys(user, doc, "");
      doc.merge_patch(user);
      // merge_patch deletes keys set to null; restore nullable defaults.
      const json defaults = to_json(ExperimentConfig{});
      for (const auto& [section, key] : {std::pair{"array", "center"}, {"simulation", "walls"},
                                          {"model", "frequencies_hz"}}) {
        if (!doc[section].contains(key)) doc[section][key] = defaults[section][key];
      }
    }
    for (const auto& o : overrides) apply_override(doc, o);
    ExperimentConfig cfg = from_json(doc);
    validate_experiment(cfg);
    return cfg;
  } catch (const json::exception& e) {
    throw ValidationError(std::string("invalid config: ") + e.what());
  }
}

json sim_config_to_json(const SimConfig& s) {
  json mics = json::array();
  for (const auto& m : s.mics) mics.push_back(point_to_json(m));
  return {{"room", room_to_json(s.room)},
          {"walls", walls_to_json(s.walls)},
          {"source", point_to_json(s.source)},
          {"mics", mics},
          {"sample_rate", s.sample_rate},
          {"length", s.length},
          {"max_order", s.max_order},
          {"fractional_delay", s.fractional_delay},
          {"fractional_taps", s.fractional_taps},
          {"max_images", s.max_images}};
}

SimConfig sim_config_from_json(const json& j) {
  SimConfig s;
  s.room = room_from_json(j.at("room"));
  s.walls = walls_from_json(j.at("walls"));
  s.source = point_from_json(j.at("source"));
  for (const auto& m : j.at("mics")) s.mics.push_back(point_from_json(m));
  s.sample_rate = j.at("sample_rate").get<double>();
  s.length = j.at("length").get<std::size_t>();
  s.max_order = j.at("max_order").get<int>();
  s.fractional_delay = j.at("fractional_delay").get<bool>();
  s.fractional_taps = j.at("fractional_taps").get<std::size_t>();
  s.max_images = j.at("max_images").get<std::size_t>();
  return s;
}

// ---------------------------------------------------------------------------
// Output helpers

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  return out;
}

void finish_output(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("failed writing " + path.string());
}

double interval_start(std::size_t index, const ExperimentConfig& cfg) {
  const std::size_t len = interval_samples(cfg.estimation, cfg.simulation.sample_rate);
  return static_cast<double>(index * len) / cfg.simulation.sample_rate;
}

// One model row; shared by run_model and cmd_compare so both produce
// bit-identical values for the same inputs.
ModelRow evaluate_row(const ExperimentConfig& cfg, const RoomSpec& room, const MicPairSpec& mic,
                      std::size_t interval, double t, double frequency,
                      std::uint64_t row_seed) {
  ModelRow row;
  row.interval_index = interval;
  row.t_s = t;
  row.frequency_hz = frequency;
  row.wavenumber = wavenumber_from_frequency(frequency, room.c);
  row.model = decaying_coherence(row.wavenumber, t, room, mic, cfg.model.quadrature);
  row.sinc = spherical_coherence(row.wavenumber, mic.d);
  row.j0 = cylindrical_coherence(row.wavenumber, mic.d);
  if (cfg.model.mc_samples > 0) {
    row.monte_carlo =
        mc_coherence(row.wavenumber, t, room, mic, cfg.model.mc_samples, cfg.seed + row_seed);
  }
  return row;
}

void write_gnuplot(const std::filesystem::path& path, const std::vector<IntervalComparison>& ivs) {
  auto out = open_output(path);
  out << "set datafile separator ','\n"
      << "set xlabel 'frequency [Hz]'\nset ylabel 'coherence'\nset yrange [-0.6:1.05]\n"
      << "set multiplot layout " << ivs.size() << ",1\n";
  for (const auto& iv : ivs) {
    out << "set title '" << fmt(iv.t_start_s) << " s to " << fmt(iv.t_end_s) << " s'\n"
        << "plot 'comparison.csv' every ::1 using ($1==" << iv.index
        << " ? $5 : NaN):7 with lines title 'estimate', \\\n"
        << "     '' every ::1 using ($1==" << iv.index
        << " ? $5 : NaN):10 with lines title 'model', \\\n"
        << "     '' every ::1 using ($1==" << iv.index
        << " ? $5 : NaN):12 with lines dt 2 title 'sinc', \\\n"
        << "     '' every ::1 using ($1==" << iv.index
        << " ? $5 : NaN):13 with lines dt 3 title 'J0'\n";
  }
  out << "unset multiplot\n";
  finish_output(out, path);
}

}  // namespace

ExperimentConfig load_experiment_config(const std::optional<std::filesystem::path>& path,
                                        const std::vector<std::string>& overrides) {
  json user;
  if (path) {
    std::ifstream in(*path);
    if (!in) throw IoError("cannot open config " + path->string());
    user = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (user.is_discarded()) throw ValidationError("config " + path->string() + " is not valid JSON");
  }
  return build_config(user, overrides);
}

ExperimentConfig parse_experiment_config(const std::string& json_text,
                                         const std::vector<std::string>& overrides) {
  json user = json::parse(json_text, nullptr, /*allow_exceptions=*/false);
  if (user.is_discarded()) throw ValidationError("config is not valid JSON");
  return build_config(user, overrides);
}

std::string experiment_config_to_json(const ExperimentConfig& cfg) { return to_json(cfg).dump(2); }

void validate_experiment(const ExperimentConfig& cfg) {
  validate_room(cfg.room);
  if (cfg.array.n_mics < 2) throw ValidationError("the array needs at least two microphones");
  if (!std::isfinite(cfg.array.spacing) || cfg.array.spacing <= 0.0) {
    throw ValidationError("array spacing must be > 0");
  }
  if (!std::isfinite(cfg.simulation.length_s) || cfg.simulation.length_s <= 0.0) {
    throw ValidationError("simulation length must be > 0");
  }
  validate_sim_config(build_sim_config(cfg));
  validate_estimation_config(cfg.estimation, cfg.simulation.sample_rate);
  if (!std::isfinite(cfg.model.time_offset_s) || cfg.model.time_offset_s < 0.0 ||
      cfg.model.time_offset_s >= cfg.estimation.interval_s) {
    throw ValidationError("model time offset must lie in [0, interval length)");
  }
  if (!(cfg.model.quadrature.tolerance > 0.0)) throw ValidationError("tolerance must be > 0");
  if (cfg.model.frequencies_hz) {
    if (cfg.model.frequencies_hz->empty()) throw ValidationError("model frequency grid is empty");
    WavenumberGrid::from_frequencies(*cfg.model.frequencies_hz, cfg.room.c);
  }
  if (!(cfg.band_lo_hz >= 0.0 && cfg.band_lo_hz < cfg.band_hi_hz)) {
    throw ValidationError("comparison band must satisfy 0 <= lo < hi");
  }
}

std::vector<Point3> array_positions(const ExperimentConfig& cfg) {
  const Point3 c = cfg.array.center.value_or(
      Point3{0.5 * cfg.room.lx, 0.5 * cfg.room.ly, 0.5 * cfg.room.lz});
  const auto axis = Direction{cfg.array.theta_mic, cfg.array.phi_mic}.unit_vector();
  std::vector<Point3> out;
  const double mid = 0.5 * static_cast<double>(cfg.array.n_mics - 1);
  for (std::size_t i = 0; i < cfg.array.n_mics; ++i) {
    const double s = (static_cast<double>(i) - mid) * cfg.array.spacing;
    out.push_back({c.x + s * axis.x, c.y + s * axis.y, c.z + s * axis.z});
  }
  return out;
}

MicPairSpec mic_pair(const ExperimentConfig& cfg) {
  return MicPairSpec{cfg.array.spacing, cfg.array.theta_mic, cfg.array.phi_mic}.normalized();
}

SimConfig build_sim_config(const ExperimentConfig& cfg) {
  const auto& s = cfg.simulation;
  SimConfig sim;
  sim.room = cfg.room;
  sim.walls = s.walls;
  sim.source = s.source;
  sim.mics = array_positions(cfg);
  sim.sample_rate = s.sample_rate;
  sim.length = static_cast<std::size_t>(std::lround(s.length_s * s.sample_rate));
  sim.max_order = s.max_order;
  sim.fractional_delay = s.fractional_delay;
  sim.fractional_taps = s.fractional_taps;
  sim.max_images = s.max_images;
  return sim;
}

std::size_t interval_count(const ExperimentConfig& cfg) {
  const std::size_t len = interval_samples(cfg.estimation, cfg.simulation.sample_rate);
  const auto total =
      static_cast<std::size_t>(std::lround(cfg.simulation.length_s * cfg.simulation.sample_rate));
  return len == 0 ? 0 : total / len;
}

std::vector<double> model_frequencies(const ExperimentConfig& cfg) {
  if (cfg.model.frequencies_hz) return *cfg.model.frequencies_hz;
  const std::size_t bins = cfg.estimation.dft_length / 2 + 1;
  std::vector<double> f(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    f[k] = static_cast<double>(k) * cfg.simulation.sample_rate /
           static_cast<double>(cfg.estimation.dft_length);
  }
  return f;
}

std::vector<ModelRow> run_model(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  const RoomSpec room = model_room(build_sim_config(cfg));
  const MicPairSpec mic = mic_pair(cfg);
  const auto freqs = model_frequencies(cfg);
  std::vector<ModelRow> rows;
  for (std::size_t i = 0; i < interval_count(cfg); ++i) {
    const double t = interval_start(i, cfg) + cfg.model.time_offset_s;
    for (std::size_t b = 0; b < freqs.size(); ++b) {
      rows.push_back(evaluate_row(cfg, room, mic, i, t, freqs[b], i * freqs.size() + b));
    }
  }
  return rows;
}

double band_rmse(const IntervalCoherence& estimate, const std::vector<double>& reference,
                 double band_lo_hz, double band_hi_hz, std::size_t* n_bins) {
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t k = 0; k < estimate.values.size(); ++k) {
    const double f = estimate.frequencies_hz[k];
    if (!estimate.valid[k] || f < band_lo_hz || f > band_hi_hz) continue;
    const double diff = estimate.values[k].real() - reference[k];
    sum += diff * diff;
    ++count;
  }
  if (n_bins) *n_bins = count;
  if (count == 0) throw ValidationError("no valid estimator bins inside the comparison band");
  return std::sqrt(sum / static_cast<double>(count));
}

ImpulseResponseSet load_impulse_responses(const std::filesystem::path& wav_path) {
  WavData wav = read_wav(wav_path);
  ImpulseResponseSet ir;
  ir.channels = std::move(wav.channels);
  ir.sample_rate = wav.sample_rate;
  auto sidecar = wav_path;
  sidecar.replace_extension(".json");
  if (std::filesystem::exists(sidecar)) {
    std::ifstream in(sidecar);
    const json meta = json::parse(in, nullptr, /*allow_exceptions=*/false);
    if (meta.is_discarded() || !meta.contains("sim_config")) {
      throw IoError("sidecar " + sidecar.string() + " is not valid metadata");
    }
    try {
      if (!meta.at("sim_config").is_null()) ir.geometry = sim_config_from_json(meta.at("sim_config"));
    } catch (const json::exception& e) {
      throw IoError("sidecar " + sidecar.string() + ": " + e.what());
    }
  }
  validate_impulse_responses(ir);
  return ir;
}

void save_impulse_responses(const std::filesystem::path& wav_path, const ImpulseResponseSet& ir) {
  std::error_code ec;
  if (wav_path.has_parent_path()) std::filesystem::create_directories(wav_path.parent_path(), ec);
  write_wav(wav_path, WavData{ir.channels, ir.sample_rate, WavSampleFormat::kFloat32});
  json meta = {{"sample_rate", ir.sample_rate},
               {"channels", ir.num_channels()},
               {"samples", ir.num_samples()},
               {"format", "float32"},
               {"sim_config", ir.geometry ? sim_config_to_json(*ir.geometry) : json(nullptr)}};
  auto sidecar = wav_path;
  sidecar.replace_extension(".json");
  auto out = open_output(sidecar);
  out << meta.dump(2) << '\n';
  finish_output(out, sidecar);
}

void write_model_csv(const std::filesystem::path& path, const std::vector<ModelRow>& rows) {
  auto out = open_output(path);
  const bool mc = !rows.empty() && rows.front().monte_carlo.has_value();
  out << "interval_index,t_s,frequency_hz,wavenumber_rad_per_m,model_real,model_imag,sinc,j0";
  if (mc) out << ",mc_real,mc_imag,mc_stderr";
  out << '\n';
  for (const auto& r : rows) {
    out << r.interval_index << ',' << fmt(r.t_s) << ',' << fmt(r.frequency_hz) << ','
        << fmt(r.wavenumber) << ',' << fmt(r.model.real()) << ',' << fmt(r.model.imag()) << ','
        << fmt(r.sinc) << ',' << fmt(r.j0);
    if (mc) {
      out << ',' << fmt(r.monte_carlo->value.real()) << ',' << fmt(r.monte_carlo->value.imag())
          << ',' << fmt(r.monte_carlo->std_error());
    }
    out << '\n';
  }
  finish_output(out, path);
}

void write_coherence_csv(const std::filesystem::path& path,
                         const std::vector<IntervalCoherence>& intervals) {
  auto out = open_output(path);
  out << "interval_index,t_start_s,t_end_s,frequency_hz,coherence_real,coherence_imag,n_frames,"
         "n_pairs\n";
  for (const auto& iv : intervals) {
    for (std::size_t k = 0; k < iv.values.size(); ++k) {
      if (!iv.valid[k]) continue;
      out << iv.index << ',' << fmt(iv.t_start_s) << ',' << fmt(iv.t_end_s) << ','
          << fmt(iv.frequencies_hz[k]) << ',' << fmt(iv.values[k].real()) << ','
          << fmt(iv.values[k].imag()) << ',' << iv.n_frames << ',' << iv.n_pairs << '\n';
    }
  }
  finish_output(out, path);
}

std::filesystem::path cmd_model(const ExperimentConfig& cfg) {
  const auto rows = run_model(cfg);
  const auto path = cfg.output_dir / "model.csv";
  write_model_csv(path, rows);
  return path;
}

std::filesystem::path cmd_simulate(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  const auto ir = synthesize_rir(build_sim_config(cfg));
  const auto path = cfg.output_dir / "rir.wav";
  save_impulse_responses(path, ir);
  return path;
}

std::filesystem::path cmd_estimate(const std::filesystem::path& wav_path,
                                   const ExperimentConfig& cfg) {
  const auto ir = load_impulse_responses(wav_path);
  const auto intervals = estimate_all(ir, cfg.estimation);
  const auto path = cfg.output_dir / "coherence.csv";
  write_coherence_csv(path, intervals);
  return path;
}

ComparisonResult cmd_compare(const ExperimentConfig& cfg) {
  validate_experiment(cfg);
  if (cfg.model.frequencies_hz) {
    throw ValidationError("compare evaluates the model at the estimator bins; unset model.frequencies_hz");
  }
  const auto wav = cmd_simulate(cfg);
  const auto ir = load_impulse_responses(wav);

  ComparisonResult result;
  result.estimates = estimate_all(ir, cfg.estimation);
  const RoomSpec room = model_room(build_sim_config(cfg));
  const MicPairSpec mic = mic_pair(cfg);

  for (const auto& est : result.estimates) {
    const double t = interval_start(est.index, cfg) + cfg.model.time_offset_s;
    const std::size_t bins = est.frequencies_hz.size();
    std::vector<double> model_re(bins), sinc(bins);
    for (std::size_t b = 0; b < bins; ++b) {
      auto row = evaluate_row(cfg, room, mic, est.index, t, est.frequencies_hz[b],
                              est.index * bins + b);
      model_re[b] = row.model.real();
      sinc[b] = row.sinc;
      result.model.push_back(std::move(row));
    }
    IntervalComparison cmp;
    cmp.index = est.index;
    cmp.t_start_s = est.t_start_s;
    cmp.t_end_s = est.t_end_s;
    cmp.t_model_s = t;
    cmp.rmse_model = band_rmse(est, model_re, cfg.band_lo_hz, cfg.band_hi_hz, &cmp.n_bins);
    cmp.rmse_sinc = band_rmse(est, sinc, cfg.band_lo_hz, cfg.band_hi_hz);
    result.intervals.push_back(cmp);
  }

  const auto csv_path = cfg.output_dir / "comparison.csv";
  auto csv = open_output(csv_path);
  csv << "interval_index,t_start_s,t_end_s,t_model_s,frequency_hz,valid,estimate_real,"
         "estimate_imag,estimate_magnitude,model_real,model_imag,sinc,j0\n";
  std::size_t row = 0;
  for (const auto& est : result.estimates) {
    const auto& cmp = result.intervals[est.index];
    for (std::size_t b = 0; b < est.values.size(); ++b, ++row) {
      const auto& m = result.model[row];
      csv << est.index << ',' << fmt(est.t_start_s) << ',' << fmt(est.t_end_s) << ','
          << fmt(cmp.t_model_s) << ',' << fmt(est.frequencies_hz[b]) << ','
          << (est.valid[b] ? 1 : 0) << ',' << fmt(est.values[b].real()) << ','
          << fmt(est.values[b].imag()) << ',' << fmt(std::abs(est.values[b])) << ','
          << fmt(m.model.real()) << ',' << fmt(m.model.imag()) << ',' << fmt(m.sinc) << ','
          << fmt(m.j0) << '\n';
    }
  }
  finish_output(csv, csv_path);

  json summary = {{"band_hz", {cfg.band_lo_hz, cfg.band_hi_hz}}, {"intervals", json::array()}};
  for (const auto& cmp : result.intervals) {
    summary["intervals"].push_back({{"index", cmp.index},
                                    {"t_start_s", cmp.t_start_s},
                                    {"t_end_s", cmp.t_end_s},
                                    {"t_model_s", cmp.t_model_s},
                                    {"rmse_model", cmp.rmse_model},
                                    {"rmse_sinc", cmp.rmse_sinc},
                                    {"n_bins", cmp.n_bins}});
  }
  summary["config"] = to_json(cfg);
  const auto summary_path = cfg.output_dir / "summary.json";
  auto out = open_output(summary_path);
  out << summary.dump(2) << '\n';
  finish_output(out, summary_path);

  if (cfg.emit_gnuplot) write_gnuplot(cfg.output_dir / "compare.gp", result.intervals);
  return result;
}

}  // namespace decaycoh
