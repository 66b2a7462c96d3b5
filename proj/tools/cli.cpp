#include "cli.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "decaycoh/errors.hpp"
#include "decaycoh/experiment.hpp"

namespace decaycoh::cli {
namespace {

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::vector<std::string> sets;
  bool gnuplot = false;
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "JSON experiment configuration")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (overrides output_dir)");
  cmd->add_option("--seed", o.seed, "Monte Carlo seed (overrides seed)");
  cmd->add_option("--set", o.sets, "override a config value, e.g. --set room.rx=0.6")
      ->take_all();
}

std::string json_string(const std::string& s) {
  std::string q = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') q += '\\';
    q += c;
  }
  return q + '"';
}

ExperimentConfig resolve(const CommonOptions& o) {
  std::vector<std::string> overrides = o.sets;
  if (!o.out.empty()) overrides.push_back("output_dir=" + json_string(o.out));
  if (o.seed) overrides.push_back("seed=" + std::to_string(*o.seed));
  if (o.gnuplot) overrides.push_back("compare.gnuplot=true");
  std::optional<std::filesystem::path> path;
  if (!o.config.empty()) path = o.config;
  return load_experiment_config(path, overrides);
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Time-varying spatial coherence of decaying sound fields in rectangular rooms"};
  app.require_subcommand(1);
  CommonOptions opts;

  auto* model = app.add_subcommand("model", "evaluate the decay model and isotropic references");
  add_common(model, opts);
  auto* simulate = app.add_subcommand("simulate", "image-source impulse responses to WAV");
  add_common(simulate, opts);
  auto* estimate = app.add_subcommand("estimate", "per-interval coherence of a multichannel WAV");
  add_common(estimate, opts);
  std::string wav;
  estimate->add_option("wav", wav, "impulse response WAV file")->required();
  auto* compare = app.add_subcommand("compare", "simulate, estimate and compare with the model");
  add_common(compare, opts);
  compare->add_flag("--gnuplot", opts.gnuplot, "also write compare.gp");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kSuccess;
  } catch (const CLI::ParseError& e) {
    err << "decaycoh: " << e.what() << '\n';
    return kValidation;
  }

  try {
    const ExperimentConfig cfg = resolve(opts);
    if (model->parsed()) {
      out << cmd_model(cfg).string() << '\n';
    } else if (simulate->parsed()) {
      out << cmd_simulate(cfg).string() << '\n';
    } else if (estimate->parsed()) {
      out << cmd_estimate(wav, cfg).string() << '\n';
    } else if (compare->parsed()) {
      const auto result = cmd_compare(cfg);
      for (const auto& iv : result.intervals) {
        out << "interval " << iv.index << " [" << iv.t_start_s << ", " << iv.t_end_s
            << ") s  rmse_model=" << iv.rmse_model << "  rmse_sinc=" << iv.rmse_sinc << '\n';
      }
    }
  } catch (const ValidationError& e) {
    err << "decaycoh: invalid input: " << e.what() << '\n';
    return kValidation;
  } catch (const NumericalError& e) {
    err << "decaycoh: numerical failure: " << e.what() << '\n';
    return kNumerical;
  } catch (const IoError& e) {
    err << "decaycoh: I/O failure: " << e.what() << '\n';
    return kIo;
  } catch (const std::exception& e) {
    err << "decaycoh: " << e.what() << '\n';
    return kUnexpected;
  }
  return kSuccess;
}

}  // namespace decaycoh::cli
