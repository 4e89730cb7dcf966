#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hoa_commands.hpp"

namespace {

struct Flags {
  std::string config;
  std::string preset;
  std::string interaction;
  std::vector<std::string> modes;
  std::vector<int> ls;
  std::vector<std::string> states;
  std::vector<double> alpha;
  double gt = 0.0;
  double g = 0.0;
  int order = 0;
  std::vector<std::size_t> dims;
  std::vector<std::string> alpha2_grid;
  std::vector<std::string> gt_grid;
  unsigned workers = 0;
  std::string output_dir;
  std::string csv;
  std::string json;
  std::string format;
  bool no_numeric = false;
  double inject_fault = 0.0;
};

// "0.1,0.2" or "start:stop:count" (inclusive, evenly spaced).
std::vector<double> parse_grid(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& item : items) {
    const auto c1 = item.find(':');
    try {
      if (c1 == std::string::npos) {
        out.push_back(std::stod(item));
        continue;
      }
      const auto c2 = item.find(':', c1 + 1);
      if (c2 == std::string::npos) throw hoa::ConfigurationError("range must be start:stop:count");
      const double a = std::stod(item.substr(0, c1));
      const double b = std::stod(item.substr(c1 + 1, c2 - c1 - 1));
      const long n = std::stol(item.substr(c2 + 1));
      if (n < 1) throw hoa::ConfigurationError("range count must be positive in '" + item + "'");
      if (n > static_cast<long>(hoa::cli::kMaxSweepPoints)) {
        throw hoa::ConfigurationError("range '" + item + "' exceeds the sweep point limit");
      }
      for (long i = 0; i < n; ++i) out.push_back(n == 1 ? a : a + (b - a) * static_cast<double>(i) / (n - 1));
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const hoa::ConfigurationError*>(&e)) throw;
      throw hoa::ConfigurationError("cannot parse grid value '" + item + "'");
    }
  }
  return out;
}

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "JSON configuration file");
  sub->add_option("--preset", f.preset, "process preset: " + hoa::preset_names());
  sub->add_option("--mode", f.modes, "mode name(s), e.g. A or A,B")->delimiter(',');
  sub->add_option("--l", f.ls, "antibunching order(s) l >= 1")->delimiter(',');
  sub->add_option("--state", f.states, "pump-coherent, stokes-coherent or signal-coherent")->delimiter(',');
  sub->add_option("--order", f.order, "expansion order in gt (default 2)");
  sub->add_option("--g", f.g, "coupling constant for the numeric oracle (default 1)");
  sub->add_option("--workers", f.workers, "worker threads");
  sub->add_option("--output-dir", f.output_dir, "directory for CSV/JSON outputs");
  sub->add_option("--csv", f.csv, "CSV output path");
  sub->add_option("--json", f.json, "JSON output path");
}

hoa::cli::RunConfig build_config(const CLI::App& sub, const Flags& f) {
  hoa::cli::RunConfig cfg;
  if (sub.count("--config")) hoa::cli::load_config_file(cfg, f.config);
  hoa::cli::apply_environment(cfg);
  auto given = [&](const char* name) { return sub.get_option_no_throw(name) && sub.count(name) > 0; };
  if (given("--preset")) {
    cfg.preset = f.preset;
    cfg.interaction.reset();
  }
  if (given("--interaction")) {
    try {
      cfg.interaction = hoa::cli::parse_interaction(nlohmann::json::parse(f.interaction));
    } catch (const nlohmann::json::exception& e) {
      throw hoa::ConfigurationError(std::string("cannot parse --interaction: ") + e.what());
    }
  }
  if (given("--mode")) cfg.modes = f.modes;
  if (given("--l")) cfg.ls = f.ls;
  if (given("--state")) {
    cfg.states.clear();
    for (const auto& s : f.states) cfg.states.push_back(hoa::parse_initial_condition(s));
  }
  if (given("--alpha")) cfg.amplitudes = f.alpha;
  if (given("--gt")) cfg.gt = f.gt;
  if (given("--g")) cfg.g = f.g;
  if (given("--order")) cfg.order = f.order;
  if (given("--dims")) cfg.dims = f.dims;
  if (given("--alpha2-grid")) cfg.alpha2_grid = parse_grid(f.alpha2_grid);
  if (given("--gt-grid")) cfg.gt_grid = parse_grid(f.gt_grid);
  if (given("--workers")) cfg.workers = f.workers;
  if (given("--output-dir")) cfg.output_dir = f.output_dir;
  if (given("--csv")) cfg.csv_path = f.csv;
  if (given("--json")) cfg.json_path = f.json;
  if (given("--format")) cfg.format = f.format;
  if (given("--no-numeric")) cfg.numeric = false;
  if (given("--inject-fault")) cfg.inject_fault = f.inject_fault;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"hoa: higher-order antibunching in multiwave mixing from short-time Heisenberg solutions"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(hoa::cli::kEngineVersion));
  Flags f;

  auto* analyze = app.add_subcommand("analyze", "derive X(t), moments and d(l) for one process");
  add_common(analyze, f);
  analyze->add_option("--interaction", f.interaction, "custom interaction as JSON (overrides --preset)");
  analyze->add_option("--alpha", f.alpha, "coherent amplitude for the numeric value (default 1)");
  analyze->add_option("--gt", f.gt, "scaled time for the numeric value (default 1e-3)");

  auto* table = app.add_subcommand("table", "regenerate the antibunching table for all reference processes");
  add_common(table, f);
  table->add_option("--format", f.format, "text, csv or json (stdout)");

  auto* verify = app.add_subcommand("verify", "cross-check every table cell against the Fock-space oracle");
  add_common(verify, f);
  verify->add_option("--alpha", f.alpha, "amplitudes to test (default 0.5,1)")->delimiter(',');
  verify->add_option("--inject-fault", f.inject_fault, "offset added to every symbolic coefficient (self-test)");

  auto* sweep = app.add_subcommand("sweep", "evaluate d(l) over |alpha|^2 and gt grids");
  add_common(sweep, f);
  sweep->add_option("--interaction", f.interaction, "custom interaction as JSON (overrides --preset)");
  sweep->add_option("--alpha2-grid", f.alpha2_grid, "|alpha|^2 values or start:stop:count")->delimiter(',');
  sweep->add_option("--gt-grid", f.gt_grid, "gt values or start:stop:count")->delimiter(',');
  sweep->add_option("--gt", f.gt, "single gt when no grid is given (default 1e-3)");
  sweep->add_option("--dims", f.dims, "oracle truncation per mode")->delimiter(',');
  sweep->add_flag("--no-numeric", f.no_numeric, "skip the Fock-space oracle column");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : hoa::cli::kUsageError;
  }

  try {
    for (auto* sub : {analyze, table, verify, sweep}) {
      if (!sub->parsed()) continue;
      const auto cfg = build_config(*sub, f);
      if (sub == analyze) return hoa::cli::cmd_analyze(cfg, std::cout, std::cerr);
      if (sub == table) return hoa::cli::cmd_table(cfg, std::cout, std::cerr);
      if (sub == verify) return hoa::cli::cmd_verify(cfg, std::cout, std::cerr);
      return hoa::cli::cmd_sweep(cfg, std::cout, std::cerr);
    }
  } catch (const hoa::ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hoa::cli::kUsageError;
  } catch (const hoa::StructuralError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hoa::cli::kUsageError;
  } catch (const hoa::TruncationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return hoa::cli::kUsageError;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return hoa::cli::kUsageError;
}
