#include "cli.hpp"

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "ccpwf/cds/calendar.hpp"
#include "ccpwf/errors.hpp"
#include "ccpwf/io/csv.hpp"
#include "ccpwf/io/report.hpp"
#include "ccpwf/migration/matrix_io.hpp"
#include "ccpwf/simulation/config.hpp"
#include "ccpwf/simulation/study.hpp"
#include "json.hpp"

#ifndef CCPWF_VERSION
#define CCPWF_VERSION "0.0.0"
#endif

namespace ccpwf::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct StudyFlags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> paths_migration;
  std::optional<int> paths_reference;
  std::optional<int> threads;
};

void add_study_flags(CLI::App* cmd, StudyFlags& f) {
  cmd->add_option("--config", f.config, "Experiment config JSON")->required()->check(CLI::ExistingFile);
  cmd->add_option("--out", f.out, "Output directory")->required();
  cmd->add_option("--seed", f.seed, "Override the config seed");
  cmd->add_option("--paths-migration", f.paths_migration, "Override the migration path count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--paths-reference", f.paths_reference, "Override the reference path count")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--threads", f.threads, "Worker threads (0: all cores)")->check(CLI::NonNegativeNumber);
}

sim::ExperimentConfig load_config(const StudyFlags& f) {
  auto cfg = sim::load_experiment_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (f.paths_migration) cfg.paths_migration = *f.paths_migration;
  if (f.paths_reference) cfg.paths_reference = *f.paths_reference;
  if (f.threads) cfg.threads = *f.threads;
  cfg.validate();
  return cfg;
}

std::string utc_timestamp() {
  using namespace std::chrono;
  const auto now = floor<seconds>(system_clock::now());
  const auto day = floor<days>(now);
  const hh_mm_ss hms{now - day};
  std::ostringstream s;
  s << cds::format_date(day) << 'T' << std::setfill('0') << std::setw(2) << hms.hours().count() << ':'
    << std::setw(2) << hms.minutes().count() << ':' << std::setw(2) << hms.seconds().count() << 'Z';
  return s.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path.string());
  f << text;
}

template <class Writer>
void write_file(const fs::path& path, Writer&& w) {
  std::ostringstream s;
  w(s);
  write_text(path, s.str());
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

fs::path prepare_out(const std::string& out) {
  fs::path dir(out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ConfigError("cannot create output directory " + out);
  return dir;
}

// The manifest is the only output that varies between identical runs.
void write_manifest(const fs::path& dir, const std::string& command, const std::vector<std::string>& args,
                    const std::string& config, std::optional<std::uint64_t> seed) {
  json m{{"command", command},
         {"args", args},
         {"config", config.empty() ? json(nullptr) : json(fs::absolute(config).string())},
         {"seed", seed ? json(*seed) : json(nullptr)},
         {"out", fs::absolute(dir).string()},
         {"engine_version", CCPWF_VERSION},
         {"timestamp", utc_timestamp()}};
  write_json(dir / "manifest.json", m);
}

std::string fmt(double v) { return io::format_double(v); }

int cmd_calibrate(const std::string& annual_path, int steps, const std::string& out_dir,
                  const std::vector<std::string>& args, std::ostream& out) {
  const auto annual = migration::read_matrix_csv(annual_path);
  const auto result = migration::calibrate_daily(annual, steps);
  const auto dir = prepare_out(out_dir);
  write_file(dir / "daily.csv", [&](std::ostream& s) { migration::write_matrix_csv(s, result.matrix); });
  write_json(dir / "calibration.json", {{"steps", steps},
                                        {"ratings", annual.size()},
                                        {"root_method", result.root_method},
                                        {"reconstruction_error", result.reconstruction_error}});
  write_manifest(dir, "calibrate", args, "", std::nullopt);
  out << "calibrated " << annual.size() << "x" << annual.size() << " matrix, m=" << steps
      << ", root=" << result.root_method << ", reconstruction error " << fmt(result.reconstruction_error) << "\n";
  return kExitOk;
}

int cmd_im(const StudyFlags& f, bool emit_distributions, const std::vector<std::string>& args, std::ostream& out) {
  const auto cfg = load_config(f);
  const auto result = sim::run_im_study(cfg);
  const auto dir = prepare_out(f.out);
  write_json(dir / "config.json", sim::to_json(cfg));
  write_file(dir / "im.csv", [&](std::ostream& s) { io::write_im_csv(s, result); });
  if (emit_distributions) {
    const auto dist = dir / "distributions";
    fs::create_directories(dist);
    write_file(dist / "contract_laws.csv", [&](std::ostream& s) { io::write_contract_laws_csv(s, result.contract_laws); });
    for (const auto& p : result.portfolios)
      write_file(dist / (p.name + "_loss.csv"), [&](std::ostream& s) { io::write_distribution_csv(s, p.loss_law); });
    write_json(dist / "im_study.json", io::to_json(result));
  }
  write_manifest(dir, "im", args, f.config, cfg.seed);
  out << "IM study: " << result.portfolios.size() << " portfolios, " << result.rows.size() << " rows\n";
  for (const auto& row : result.rows)
    if (row.alpha == cfg.alpha_grid.front() && row.method == waterfall::ImMethod::PosPart)
      out << "  " << row.portfolio << " alpha=" << fmt(row.alpha) << " " << prob::to_string(row.measure)
          << " IM=" << fmt(row.im) << "\n";
  return kExitOk;
}

int cmd_df(const StudyFlags& f, const std::vector<std::string>& args, std::ostream& out) {
  const auto cfg = load_config(f);
  const auto result = sim::run_df_study(cfg);
  const auto dir = prepare_out(f.out);
  write_json(dir / "config.json", sim::to_json(cfg));
  write_json(dir / "study_result.json", io::to_json(result));
  write_file(dir / "covers.csv", [&](std::ostream& s) { io::write_cover_csv(s, result); });
  write_file(dir / "members.csv", [&](std::ostream& s) { io::write_member_csv(s, result); });
  for (const auto& sc : result.scenarios) {
    const auto name = "ratio_grid_" + migration::to_string(sc.dependence) + "_" + sc.initial + ".csv";
    write_file(dir / name, [&](std::ostream& s) { io::write_ratio_grid_csv(s, sc); });
  }
  write_manifest(dir, "df", args, f.config, cfg.seed);
  out << "DF study: " << result.scenarios.size() << " scenarios, " << cfg.paths_migration << " x "
      << cfg.paths_reference << " paths\n";
  for (const auto& sc : result.scenarios) {
    const auto& c = *std::max_element(sc.cells.begin(), sc.cells.end(),
                                      [](const auto& a, const auto& b) { return a.ratio < b.ratio; });
    out << "  " << migration::to_string(sc.dependence) << " " << sc.initial << " alpha=" << fmt(c.alpha)
        << " beta=" << fmt(c.beta) << " max DF/IM=" << fmt(c.ratio) << " (se " << fmt(c.ratio_se)
        << ") CoverAll=" << fmt(c.covers.cover_all)
        << " nonincreasing_in_beta=" << (sc.ratio_nonincreasing_in_beta ? "yes" : "no") << "\n";
  }
  return kExitOk;
}

int cmd_scaling(const StudyFlags& f, std::vector<int> counts, const std::vector<std::string>& args,
                std::ostream& out) {
  const auto cfg = load_config(f);
  if (counts.empty()) counts = cfg.scaling.counts;
  const auto rows = sim::run_scaling_study(cfg, counts);
  const auto dir = prepare_out(f.out);
  write_json(dir / "config.json", sim::to_json(cfg));
  write_file(dir / "scaling.csv", [&](std::ostream& s) { io::write_scaling_csv(s, rows); });
  write_json(dir / "scaling.json", io::to_json(rows));
  write_manifest(dir, "scaling", args, f.config, cfg.seed);
  out << "scaling study: " << rows.size() << " member counts\n";
  for (const auto& r : rows)
    out << "  I=" << r.members << " DF/IM=" << fmt(r.ratio) << " C1/IM=" << fmt(r.c1_ratio)
        << " C2/IM=" << fmt(r.c2_ratio) << "\n";
  return kExitOk;
}

// Re-runs the recorded arguments, optionally with a different output
// directory or thread count.
std::vector<std::string> replay_args(const std::string& manifest_path, const std::optional<std::string>& out_dir,
                                     std::optional<int> threads) {
  std::ifstream f(manifest_path);
  if (!f) throw ConfigError("cannot open manifest " + manifest_path);
  json m;
  try {
    m = json::parse(f);
  } catch (const json::exception& e) {
    throw ConfigError("manifest " + manifest_path + ": " + e.what());
  }
  if (!m.contains("args") || !m["args"].is_array()) throw ConfigError("manifest has no recorded arguments");
  std::vector<std::string> args;
  for (const auto& a : m["args"]) args.push_back(a.get<std::string>());
  if (args.empty() || args.front() == "replay") throw ConfigError("manifest does not record a study command");
  auto set_flag = [&](const std::string& flag, const std::string& value) {
    for (std::size_t i = 0; i + 1 < args.size(); ++i)
      if (args[i] == flag) {
        args[i + 1] = value;
        return;
      }
    args.push_back(flag);
    args.push_back(value);
  };
  if (out_dir) set_flag("--out", *out_dir);
  // calibrate is sequential; a thread override has nothing to change there.
  if (threads && args.front() != "calibrate") set_flag("--threads", std::to_string(*threads));
  return args;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"CCP default waterfall: margins, default fund and cover studies"};
  app.require_subcommand(1);
  app.set_version_flag("--version", CCPWF_VERSION);

  std::string annual;
  int steps = 252;
  std::string calib_out;
  auto* calibrate = app.add_subcommand("calibrate", "Calibrate a one-step matrix from an annual matrix");
  calibrate->add_option("--annual", annual, "Annual matrix CSV")->required()->check(CLI::ExistingFile);
  calibrate->add_option("--steps", steps, "Steps per year (root order)")->check(CLI::PositiveNumber);
  calibrate->add_option("--out", calib_out, "Output directory")->required();

  StudyFlags im_flags, df_flags, scaling_flags;
  bool emit_distributions = false;
  auto* im = app.add_subcommand("im", "Initial margin study");
  add_study_flags(im, im_flags);
  im->add_flag("--emit-distributions", emit_distributions, "Dump exposure and loss laws");

  auto* df = app.add_subcommand("df", "Default fund study");
  add_study_flags(df, df_flags);

  std::vector<int> counts;
  auto* scaling = app.add_subcommand("scaling", "DF/IM across member counts");
  add_study_flags(scaling, scaling_flags);
  scaling->add_option("--counts", counts, "Member counts")->delimiter(',')->check(CLI::PositiveNumber);

  std::string manifest;
  std::optional<std::string> replay_out;
  std::optional<int> replay_threads;
  auto* replay = app.add_subcommand("replay", "Re-run the command recorded in a manifest");
  replay->add_option("--manifest", manifest, "manifest.json of a previous run")->required();
  replay->add_option("--out", replay_out, "Output directory (default: the recorded one)");
  replay->add_option("--threads", replay_threads, "Worker threads")->check(CLI::NonNegativeNumber);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << CCPWF_VERSION << "\n";
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }

  try {
    if (*calibrate) return cmd_calibrate(annual, steps, calib_out, args, out);
    if (*im) return cmd_im(im_flags, emit_distributions, args, out);
    if (*df) return cmd_df(df_flags, args, out);
    if (*scaling) return cmd_scaling(scaling_flags, counts, args, out);
    if (*replay) return run_cli(replay_args(manifest, replay_out, replay_threads), out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const CalibrationError& e) {
    err << "calibration failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const InfeasibleRowError& e) {
    err << "infeasible joint row: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::domain_error& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace ccpwf::cli
