#pragma once

// Subcommand implementations for the `hoa` front end. Each command renders
// into streams/strings so the same code serves the binary and the tests.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "hoa/fock_oracle.hpp"
#include "hoa/heisenberg.hpp"
#include "hoa/mixing_table.hpp"
#include "hoa/statistics.hpp"

namespace hoa::cli {

inline constexpr const char* kEngineVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kVerificationFailed = 1, kUsageError = 2 };

inline constexpr std::size_t kMaxSweepPoints = 1'000'000;

struct RunConfig {
  std::optional<std::string> preset;
  std::optional<InteractionSpec> interaction;
  std::vector<std::string> modes;
  std::vector<int> ls;
  std::vector<InitialCondition> states;
  std::vector<double> amplitudes;
  double gt = 1e-3;
  double g = 1.0;
  int order = kDefaultMaxOrder;
  std::vector<std::size_t> dims;
  std::vector<double> alpha2_grid;
  std::vector<double> gt_grid;
  unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::string output_dir;
  std::string csv_path;
  std::string json_path;
  std::string format = "text";
  bool numeric = true;
  double inject_fault = 0.0;
};

// ---------------------------------------------------------------------------
// Configuration

inline std::size_t parse_mode(const std::string& name) {
  if (name.size() == 1 && name[0] >= 'A' && name[0] <= 'Z') return static_cast<std::size_t>(name[0] - 'A');
  if (name.size() == 1 && name[0] >= 'a' && name[0] <= 'z') return static_cast<std::size_t>(name[0] - 'a');
  if (name.size() > 1 && name[0] == 'M') return std::stoul(name.substr(1));
  throw ConfigurationError("unknown mode '" + name + "'");
}

/// {"modes": [{"role": "created", "exponent": 3, "omega": 2.0}, ...], "mode_count": 3}
inline InteractionSpec parse_interaction(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("modes") || !j["modes"].is_array()) {
    throw ConfigurationError("interaction must be an object with a 'modes' array");
  }
  InteractionSpec spec;
  std::vector<std::optional<double>> omegas;
  std::size_t position = 0;
  for (const auto& m : j["modes"]) {
    ModeFactor f;
    f.mode = m.contains("mode") ? (m["mode"].is_string() ? parse_mode(m["mode"].get<std::string>())
                                                         : m["mode"].get<std::size_t>())
                                : position;
    f.exponent = m.value("exponent", 1);
    const std::string role = m.value("role", "");
    if (role == "created") {
      f.role = Role::created;
    } else if (role == "annihilated") {
      f.role = Role::annihilated;
    } else {
      throw ConfigurationError("mode role must be 'created' or 'annihilated', got '" + role + "'");
    }
    if (omegas.size() <= f.mode) omegas.resize(f.mode + 1);
    if (m.contains("omega")) omegas[f.mode] = m["omega"].get<double>();
    spec.factors.push_back(f);
    ++position;
  }
  spec.mode_count = j.value("mode_count", std::size_t{0});
  const bool any_omega = std::any_of(omegas.begin(), omegas.end(), [](const auto& o) { return o.has_value(); });
  if (any_omega) {
    omegas.resize(spec.modes());
    for (std::size_t m = 0; m < omegas.size(); ++m) {
      if (!omegas[m]) throw ConfigurationError("omega missing for mode " + text::mode_name(m));
      spec.frequencies.push_back(*omegas[m]);
    }
  }
  spec.validate();
  return spec;
}

inline void apply_json(RunConfig& cfg, const nlohmann::json& j) {
  try {
    if (j.contains("preset")) cfg.preset = j["preset"].get<std::string>();
    if (j.contains("interaction")) cfg.interaction = parse_interaction(j["interaction"]);
    if (j.contains("modes")) cfg.modes = j["modes"].get<std::vector<std::string>>();
    if (j.contains("l")) cfg.ls = j["l"].get<std::vector<int>>();
    if (j.contains("states")) {
      cfg.states.clear();
      for (const auto& s : j["states"]) cfg.states.push_back(parse_initial_condition(s.get<std::string>()));
    }
    if (j.contains("alpha")) {
      cfg.amplitudes = j["alpha"].is_array() ? j["alpha"].get<std::vector<double>>()
                                             : std::vector<double>{j["alpha"].get<double>()};
    }
    if (j.contains("gt")) cfg.gt = j["gt"].get<double>();
    if (j.contains("g")) cfg.g = j["g"].get<double>();
    if (j.contains("order")) cfg.order = j["order"].get<int>();
    if (j.contains("dims")) cfg.dims = j["dims"].get<std::vector<std::size_t>>();
    if (j.contains("alpha2_grid")) cfg.alpha2_grid = j["alpha2_grid"].get<std::vector<double>>();
    if (j.contains("gt_grid")) cfg.gt_grid = j["gt_grid"].get<std::vector<double>>();
    if (j.contains("workers")) cfg.workers = j["workers"].get<unsigned>();
    if (j.contains("output_dir")) cfg.output_dir = j["output_dir"].get<std::string>();
    if (j.contains("csv")) cfg.csv_path = j["csv"].get<std::string>();
    if (j.contains("json")) cfg.json_path = j["json"].get<std::string>();
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("numeric")) cfg.numeric = j["numeric"].get<bool>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError(std::string("invalid config: ") + e.what());
  }
}

inline void load_config_file(RunConfig& cfg, const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigurationError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, /*ignore_comments=*/true);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigurationError("cannot parse config file '" + path + "': " + e.what());
  }
  apply_json(cfg, j);
}

/// HOA_WORKERS and HOA_OUTPUT_DIR override the config file; flags override both.
inline void apply_environment(RunConfig& cfg) {
  if (const char* w = std::getenv("HOA_WORKERS"); w && *w) {
    try {
      cfg.workers = static_cast<unsigned>(std::stoul(w));
    } catch (const std::exception&) {
      throw ConfigurationError(std::string("HOA_WORKERS must be a positive integer, got '") + w + "'");
    }
  }
  if (const char* d = std::getenv("HOA_OUTPUT_DIR"); d && *d) cfg.output_dir = d;
}

inline void validate_common(const RunConfig& cfg, std::ostream& err) {
  if (cfg.workers < 1) throw ConfigurationError("workers must be at least 1");
  if (cfg.order < 0) throw ConfigurationError("order must be non-negative");
  if (!(cfg.g > 0.0)) throw ConfigurationError("coupling g must be positive");
  if (!(cfg.gt > 0.0)) throw ConfigurationError("gt must be positive");
  for (int l : cfg.ls) {
    if (l < 1) throw ConfigurationError("l values must be >= 1");
  }
  for (double a : cfg.amplitudes) {
    if (!(a >= 0.0)) throw ConfigurationError("amplitudes must be non-negative");
  }
  if (cfg.format != "text" && cfg.format != "csv" && cfg.format != "json") {
    throw ConfigurationError("format must be text, csv or json");
  }
  if (cfg.gt > 0.1) err << "warning: gt = " << cfg.gt << " is outside short-time regime\n";
  if (cfg.order > kDefaultMaxOrder) {
    err << "warning: order " << cfg.order << " exceeds the validated second order; higher grades are unchecked\n";
  }
}

struct Process {
  std::string key;
  std::string name;
  InteractionSpec spec;
};

inline Process resolve_process(const RunConfig& cfg, const std::string& fallback) {
  if (cfg.interaction) return {"custom", "Custom interaction", *cfg.interaction};
  const ProcessPreset& p = find_preset(cfg.preset.value_or(fallback));
  return {p.key, p.name, p.spec};
}

inline std::vector<std::size_t> resolve_modes(const RunConfig& cfg, std::size_t mode_count) {
  std::vector<std::size_t> out;
  for (const auto& name : cfg.modes.empty() ? std::vector<std::string>{"A"} : cfg.modes) {
    const std::size_t m = parse_mode(name);
    if (m >= mode_count) {
      throw ConfigurationError("mode " + name + " is not part of the interaction (" + std::to_string(mode_count) +
                               " modes)");
    }
    out.push_back(m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Formatting helpers

inline std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string fmt_short(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

inline std::string csv_row(const std::vector<std::string>& fields) {
  std::string out;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out += ",";
    out += csv_field(fields[i]);
  }
  return out + "\n";
}

/// "|α⟩" for the table columns.
inline std::string state_column(InitialCondition c) { return "|" + text::amplitude_label(coherent_mode(c)) + "⟩"; }

inline void write_file(const std::filesystem::path& path, const std::string& content) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path.string() + "'");
  out << content;
}

inline std::string output_path(const RunConfig& cfg, const std::string& explicit_path, const std::string& name) {
  if (!explicit_path.empty()) return explicit_path;
  if (!cfg.output_dir.empty()) return (std::filesystem::path(cfg.output_dir) / name).string();
  return {};
}

/// Runs f(0..n-1) on `workers` threads; results keep index order.
template <typename T, typename F>
std::vector<T> parallel_map(std::size_t n, unsigned workers, F&& f) {
  std::vector<std::optional<T>> slots(n);
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto run = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        slots[i].emplace(f(i));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), n));
  if (threads <= 1) {
    run();
  } else {
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(run);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  std::vector<T> out;
  out.reserve(n);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

// ---------------------------------------------------------------------------
// analyze

inline int cmd_analyze(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate_common(cfg, err);
  const Process proc = resolve_process(cfg, "sixwave-321");
  const std::size_t n = proc.spec.modes();
  const auto modes = resolve_modes(cfg, n);
  const std::vector<int> ls = cfg.ls.empty() ? std::vector<int>{1} : cfg.ls;
  const auto states = cfg.states.empty() ? std::vector<InitialCondition>{InitialCondition::pump_coherent} : cfg.states;
  const double amplitude = cfg.amplitudes.empty() ? 1.0 : cfg.amplitudes.front();
  std::vector<ProductState> product_states;
  for (auto c : states) product_states.push_back(initial_state(c, n));

  nlohmann::ordered_json report;
  report["engine_version"] = kEngineVersion;
  report["process"] = proc.key;
  report["interaction"] = proc.spec.interaction_string();
  report["order"] = cfg.order;
  report["results"] = nlohmann::ordered_json::array();

  out << "process: " << proc.name << " (" << proc.key << "), H_int = g(" << proc.spec.interaction_string()
      << " + h.c.)\n";
  out << "order: " << cfg.order << (cfg.order > kDefaultMaxOrder ? " (beyond the validated second order)" : "") << "\n";
  for (std::size_t mode : modes) {
    ModeAnalysis analysis(proc.spec, mode, cfg.order);
    const std::string name = text::mode_name(mode);
    out << "\nmode " << name << "\n";
    out << "  " << name << "(t) = " << analysis.evolved().series.to_string() << "\n";
    out << "  N_" << name << "(t) = " << analysis.moment_operator(1).to_string() << "\n";
    for (std::size_t si = 0; si < states.size(); ++si) {
      const ProductState& s = product_states[si];
      std::vector<cplx> amps(n, 0.0);
      amps[coherent_mode(states[si])] = amplitude;
      out << "  state " << s.ket() << " (" << to_string(states[si]) << ")\n";
      const int kmax = *std::max_element(ls.begin(), ls.end()) + 1;
      for (int k = 1; k <= kmax; ++k) {
        out << "    <N_" << name << (k > 1 ? "^(" + std::to_string(k) + ")" : "") << "(t)> = "
            << analysis.moment(k, s).pretty() << "\n";
      }
      for (int l : ls) {
        const ExpectationSeries d = analysis.hoa_d(l, s);
        const double value = d.evaluate(amps, cfg.gt).real();
        const Classification cls = classify(d, amps);
        out << "    d(" << l << ") = " << d.pretty() << "\n";
        out << "      at |" << text::amplitude_label(coherent_mode(states[si])) << "| = " << fmt_short(amplitude)
            << ", gt = " << fmt_short(cfg.gt) << ": d = " << fmt17(value) << "  [" << to_string(cls) << "]\n";
        report["results"].push_back({{"mode", name},
                                     {"state", to_string(states[si])},
                                     {"l", l},
                                     {"d", d.to_string()},
                                     {"amplitude", amplitude},
                                     {"gt", cfg.gt},
                                     {"d_value", value},
                                     {"classification", to_string(cls)}});
      }
    }
  }
  if (const auto path = output_path(cfg, cfg.json_path, "analyze.json"); !path.empty()) {
    write_file(path, report.dump(2) + "\n");
  }
  return kSuccess;
}

// ---------------------------------------------------------------------------
// table

inline std::string table_csv(const std::vector<CellDerivation>& rows) {
  std::string out = csv_row({"process", "interaction", "mode", "state", "l", "coefficient_series", "note"});
  for (const auto& r : rows) {
    out += csv_row({r.cell.process->name, r.cell.process->spec.interaction_string(), text::mode_name(r.cell.mode),
                    state_column(r.cell.state), std::to_string(r.cell.l), r.d.compact(), r.note()});
  }
  return out;
}

inline std::string table_json(const std::vector<CellDerivation>& rows) {
  nlohmann::ordered_json j;
  j["engine_version"] = kEngineVersion;
  j["rows"] = nlohmann::ordered_json::array();
  std::vector<std::string> notes;
  for (const auto& r : rows) {
    const std::string note = r.note();
    j["rows"].push_back({{"process", r.cell.process->name},
                         {"interaction", r.cell.process->spec.interaction_string()},
                         {"mode", text::mode_name(r.cell.mode)},
                         {"state", state_column(r.cell.state)},
                         {"l", r.cell.l},
                         {"coefficient_series", r.d.compact()},
                         {"published", r.published.compact()},
                         {"note", note}});
    if (!note.empty()) notes.push_back(r.cell.label() + ": " + note);
  }
  j["discrepancy_notes"] = notes;
  return j.dump(2) + "\n";
}

inline std::vector<CellDerivation> derive_table(int order = kDefaultMaxOrder) {
  const auto cells = table_cells();
  return derive_cells(cells, order);
}

inline void render_table_text(const std::vector<CellDerivation>& rows, std::ostream& out) {
  std::string current;
  std::vector<std::string> notes;
  for (const auto& r : rows) {
    if (r.cell.process->key != current) {
      current = r.cell.process->key;
      out << "\n" << r.cell.process->name << "  [" << r.cell.process->spec.interaction_string() << "]\n";
    }
    const std::string note = r.note();
    std::string marker;
    if (!note.empty()) {
      notes.push_back(r.cell.label() + ": " + note);
      marker = "  [note " + std::to_string(notes.size()) + "]";
    }
    out << "  mode " << text::mode_name(r.cell.mode) << "  " << state_column(r.cell.state) << "  d(" << r.cell.l
        << ") = " << r.d.compact() << marker << "\n";
  }
  out << "\nnotes (" << notes.size() << " cells where the engine disagrees with a published statement):\n";
  for (std::size_t i = 0; i < notes.size(); ++i) out << "  [" << i + 1 << "] " << notes[i] << "\n";
}

inline int cmd_table(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate_common(cfg, err);
  const auto rows = derive_table(cfg.order);
  const std::string csv = table_csv(rows);
  const std::string json = table_json(rows);
  if (cfg.format == "csv") {
    out << csv;
  } else if (cfg.format == "json") {
    out << json;
  } else {
    render_table_text(rows, out);
  }
  if (const auto p = output_path(cfg, cfg.csv_path, "table.csv"); !p.empty()) write_file(p, csv);
  if (const auto p = output_path(cfg, cfg.json_path, "table.json"); !p.empty()) write_file(p, json);
  return kSuccess;
}

// ---------------------------------------------------------------------------
// verify

struct MeanCheck {
  TableCell cell;
  double amplitude = 0.0;
  double engine = 0.0;
  double published = 0.0;
  double oracle = 0.0;
  bool pass = false;
  std::string diagnostic;
};

struct VerifyResult {
  std::vector<CellCheck> cells;
  std::vector<MeanCheck> means;
  std::vector<CellDerivation> derivations;

  bool all_pass() const {
    return std::all_of(cells.begin(), cells.end(), [](const auto& c) { return c.pass; }) &&
           std::all_of(means.begin(), means.end(), [](const auto& m) { return m.pass; });
  }
};

inline std::vector<TableCell> selected_cells(const RunConfig& cfg) {
  std::vector<TableCell> out;
  const std::vector<int> ls = cfg.ls.empty() ? std::vector<int>{1, 2} : cfg.ls;
  for (const auto& cell : table_cells(ls)) {
    if (cfg.preset && cell.process->key != *cfg.preset) continue;
    if (!cfg.modes.empty() &&
        std::none_of(cfg.modes.begin(), cfg.modes.end(), [&](const auto& m) { return parse_mode(m) == cell.mode; })) {
      continue;
    }
    if (!cfg.states.empty() && std::find(cfg.states.begin(), cfg.states.end(), cell.state) == cfg.states.end()) {
      continue;
    }
    out.push_back(cell);
  }
  return out;
}

inline VerifyResult run_verify(const RunConfig& cfg, const VerifyOptions& opt) {
  if (cfg.preset) find_preset(*cfg.preset);
  const auto cells = selected_cells(cfg);
  if (cells.empty()) throw ConfigurationError("no table cells match the selection");
  const std::vector<double> amplitudes = cfg.amplitudes.empty() ? std::vector<double>{0.5, 1.0} : cfg.amplitudes;

  VerifyResult result;
  result.derivations = derive_cells(cells, kDefaultMaxOrder);

  // One task per (process, state, amplitude): each builds its own oracle.
  struct Group {
    const ProcessPreset* process;
    InitialCondition state;
    double amplitude;
    std::vector<std::size_t> members;
  };
  std::vector<Group> groups;
  std::map<std::tuple<const ProcessPreset*, InitialCondition, double>, std::size_t> index;
  for (std::size_t i = 0; i < result.derivations.size(); ++i) {
    const auto& c = result.derivations[i].cell;
    for (double a : amplitudes) {
      auto key = std::make_tuple(c.process, c.state, a);
      auto [it, inserted] = index.emplace(key, groups.size());
      if (inserted) groups.push_back({c.process, c.state, a, {}});
      groups[it->second].members.push_back(i);
    }
  }

  struct GroupOutput {
    std::vector<std::pair<std::size_t, CellCheck>> checks;
    std::vector<std::pair<std::size_t, MeanCheck>> means;
  };
  auto outputs = parallel_map<GroupOutput>(groups.size(), cfg.workers, [&](std::size_t gi) {
    const Group& grp = groups[gi];
    GroupOutput go;
    OracleCache cache(opt.g);
    std::map<std::size_t, bool> mean_done;
    for (std::size_t i : grp.members) {
      const CellDerivation& d = result.derivations[i];
      const FockOracle& oracle = cache.get(d.cell, grp.amplitude);
      go.checks.emplace_back(i, check_cell(d, oracle, grp.amplitude, opt));
      if (!d.mean_contradicts_published() || mean_done[d.cell.mode]) continue;
      mean_done[d.cell.mode] = true;
      MeanCheck mc;
      mc.cell = d.cell;
      mc.amplitude = grp.amplitude;
      const auto amps = OracleCache::amplitudes(d.cell.state, grp.amplitude);
      mc.engine = d.mean.evaluate_grade(2, amps).real();
      mc.published = d.published_mean->evaluate_grade(2, amps).real();
      const Vector psi0 = oracle.prepare(d.cell.initial(), amps);
      const double initial = oracle.moment(psi0, d.cell.mode, 1);
      try {
        mc.oracle = oracle
                        .leading_coefficient_of(
                            [&](double t) { return oracle.numeric_mean(psi0, d.cell.mode, t) - initial; }, opt.t1,
                            opt.t2)
                        .value;
        mc.pass = mc.engine == 0.0 ? std::abs(mc.oracle) <= opt.zero_coefficient_tol
                                   : std::abs(mc.oracle - mc.engine) <= opt.rel_tol * std::abs(mc.engine);
      } catch (const NumericalError& e) {
        mc.diagnostic = e.what();
      }
      go.means.emplace_back(i, mc);
    }
    return go;
  });

  // Reassemble in (cell, amplitude) order regardless of scheduling.
  std::vector<std::vector<CellCheck>> per_cell(result.derivations.size());
  std::vector<std::vector<MeanCheck>> per_mean(result.derivations.size());
  for (auto& go : outputs) {
    for (auto& [i, c] : go.checks) per_cell[i].push_back(std::move(c));
    for (auto& [i, m] : go.means) per_mean[i].push_back(std::move(m));
  }
  auto by_amplitude = [](const auto& a, const auto& b) { return a.amplitude < b.amplitude; };
  for (auto& v : per_cell) {
    std::sort(v.begin(), v.end(), by_amplitude);
    for (auto& c : v) result.cells.push_back(std::move(c));
  }
  for (auto& v : per_mean) {
    std::sort(v.begin(), v.end(), by_amplitude);
    for (auto& m : v) result.means.push_back(std::move(m));
  }
  return result;
}

inline std::string verify_csv(const VerifyResult& r) {
  std::string out = csv_row({"process", "mode", "state", "quantity", "amplitude", "symbolic", "oracle", "published",
                             "relative_error", "status"});
  for (const auto& c : r.cells) {
    out += csv_row({c.cell.process->key, text::mode_name(c.cell.mode), std::string(to_string(c.cell.state)),
                    "d(" + std::to_string(c.cell.l) + ")", fmt17(c.amplitude), fmt17(c.symbolic), fmt17(c.oracle),
                    fmt17(c.published), fmt17(c.relative_error()), c.pass ? "PASS" : "FAIL"});
  }
  for (const auto& m : r.means) {
    const double rel = m.engine == 0.0 ? std::abs(m.oracle) : std::abs(m.oracle - m.engine) / std::abs(m.engine);
    out += csv_row({m.cell.process->key, text::mode_name(m.cell.mode), std::string(to_string(m.cell.state)), "<N>",
                    fmt17(m.amplitude), fmt17(m.engine), fmt17(m.oracle), fmt17(m.published), fmt17(rel),
                    m.pass ? "PASS" : "FAIL"});
  }
  return out;
}

inline int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate_common(cfg, err);
  VerifyOptions opt;
  opt.g = cfg.g;
  opt.inject_fault = cfg.inject_fault;
  const VerifyResult r = run_verify(cfg, opt);

  std::size_t passed = 0;
  for (const auto& c : r.cells) {
    passed += c.pass;
    out << (c.pass ? "PASS " : "FAIL ") << c.cell.label() << " |amp|=" << fmt_short(c.amplitude)
        << "  symbolic=" << fmt_short(c.symbolic) << "  oracle=" << fmt17(c.oracle)
        << "  rel.err=" << fmt_short(c.relative_error());
    if (!c.diagnostic.empty()) out << "  (" << c.diagnostic << ")";
    out << "\n";
  }
  if (!r.means.empty()) out << "\nmean photon number checks:\n";
  for (const auto& m : r.means) {
    passed += m.pass;
    out << (m.pass ? "PASS " : "FAIL ") << m.cell.process->key << " mode " << text::mode_name(m.cell.mode) << " "
        << to_string(m.cell.state) << " <N> (gt)^2 coefficient |amp|=" << fmt_short(m.amplitude)
        << "  engine=" << fmt_short(m.engine) << "  oracle=" << fmt17(m.oracle)
        << "  published=" << fmt_short(m.published);
    if (std::abs(m.published - m.oracle) > opt.rel_tol * std::max(1.0, std::abs(m.oracle))) {
      out << "  -> published claim rejected by oracle";
    }
    if (!m.diagnostic.empty()) out << "  (" << m.diagnostic << ")";
    out << "\n";
  }

  std::vector<const CellCheck*> disputed;
  for (const auto& c : r.cells) {
    if (c.published != c.symbolic) disputed.push_back(&c);
  }
  if (!disputed.empty()) {
    out << "\npublished-value adjudication:\n";
    for (const CellCheck* c : disputed) {
      const bool engine_ok = c->pass;
      const bool published_ok = c->published == 0.0 ? std::abs(c->oracle) <= opt.zero_coefficient_tol
                                                     : std::abs(c->oracle - c->published) <= opt.rel_tol *
                                                                                                 std::abs(c->published);
      out << "  " << c->cell.label() << " |amp|=" << fmt_short(c->amplitude) << ": published "
          << fmt_short(c->published) << ", engine " << fmt_short(c->symbolic) << ", oracle " << fmt_short(c->oracle)
          << " -> " << (engine_ok && !published_ok ? "engine confirmed" : published_ok ? "published confirmed" : "unresolved")
          << "\n";
    }
  }

  const std::size_t total = r.cells.size() + r.means.size();
  out << "\nsummary: " << total << " checks, " << passed << " PASS, " << total - passed << " FAIL\n";

  if (const auto p = output_path(cfg, cfg.csv_path, "verify.csv"); !p.empty()) write_file(p, verify_csv(r));
  if (const auto p = output_path(cfg, cfg.json_path, "verify.json"); !p.empty()) {
    nlohmann::ordered_json j;
    j["engine_version"] = kEngineVersion;
    j["checks"] = nlohmann::ordered_json::array();
    for (const auto& c : r.cells) {
      j["checks"].push_back({{"cell", c.cell.label()},
                             {"amplitude", c.amplitude},
                             {"symbolic", c.symbolic},
                             {"oracle", c.oracle},
                             {"published", c.published},
                             {"status", c.pass ? "PASS" : "FAIL"}});
    }
    std::vector<std::string> notes;
    for (const auto& d : r.derivations) {
      if (const auto n = d.note(); !n.empty()) notes.push_back(d.cell.label() + ": " + n);
    }
    j["discrepancy_notes"] = notes;
    write_file(p, j.dump(2) + "\n");
  }
  return r.all_pass() ? kSuccess : kVerificationFailed;
}

// ---------------------------------------------------------------------------
// sweep

struct SweepRow {
  double alpha2 = 0.0;
  double gt = 0.0;
  std::size_t mode = 0;
  int l = 1;
  double d_symbolic = 0.0;
  std::optional<double> d_numeric;
  Classification classification = Classification::coherent;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  std::vector<std::string> summary;
};

inline SweepResult run_sweep(const RunConfig& cfg) {
  const Process proc = resolve_process(cfg, "sixwave-321");
  const std::size_t n = proc.spec.modes();
  const auto modes = resolve_modes(cfg, n);
  const std::vector<int> ls = cfg.ls.empty() ? std::vector<int>{1} : cfg.ls;
  const std::vector<double> gts = cfg.gt_grid.empty() ? std::vector<double>{cfg.gt} : cfg.gt_grid;
  const InitialCondition state = cfg.states.empty() ? InitialCondition::pump_coherent : cfg.states.front();
  const ProductState s = initial_state(state, n);
  const std::size_t points = cfg.alpha2_grid.size() * gts.size() * modes.size() * ls.size();
  if (points == 0) throw ConfigurationError("sweep grid is empty");
  if (points > kMaxSweepPoints) {
    throw ConfigurationError("sweep grid has " + std::to_string(points) + " points; the limit is " +
                             std::to_string(kMaxSweepPoints));
  }
  for (double x : cfg.alpha2_grid) {
    if (!(x >= 0.0)) throw ConfigurationError("|alpha|^2 grid values must be non-negative");
  }
  for (double t : gts) {
    if (!(t > 0.0)) throw ConfigurationError("gt grid values must be positive");
  }

  std::vector<ExpectationSeries> ds;
  for (std::size_t mode : modes) {
    ModeAnalysis analysis(proc.spec, mode, cfg.order);
    for (int l : ls) ds.push_back(analysis.hoa_d(l, s));
  }
  const int l_max = *std::max_element(ls.begin(), ls.end());

  auto per_alpha = parallel_map<std::vector<SweepRow>>(cfg.alpha2_grid.size(), cfg.workers, [&](std::size_t ai) {
    const double alpha2 = cfg.alpha2_grid[ai];
    std::vector<cplx> amps(n, 0.0);
    amps[coherent_mode(state)] = std::sqrt(alpha2);
    std::optional<FockOracle> oracle;
    Vector psi0;
    if (cfg.numeric) {
      TruncationSpec trunc = cfg.dims.empty() ? default_truncation(proc.spec, s, amps, l_max) : TruncationSpec{cfg.dims};
      oracle.emplace(proc.spec, std::move(trunc), cfg.g);
      psi0 = oracle->prepare(s, amps);
    }
    std::vector<SweepRow> rows;
    for (double gt : gts) {
      std::size_t di = 0;
      for (std::size_t mode : modes) {
        for (int l : ls) {
          const ExpectationSeries& d = ds[di++];
          SweepRow row{alpha2, gt, mode, l, d.evaluate(amps, gt).real(), std::nullopt, classify(d, amps)};
          if (oracle) row.d_numeric = oracle->numeric_d(psi0, mode, l, gt / cfg.g);
          rows.push_back(row);
        }
      }
    }
    return rows;
  });

  SweepResult result;
  for (auto& rows : per_alpha) {
    for (auto& r : rows) result.rows.push_back(r);
  }

  // |d| strictly increasing in |alpha|^2 for each (gt, mode, l) series.
  for (double gt : gts) {
    for (std::size_t mode : modes) {
      for (int l : ls) {
        std::vector<const SweepRow*> series;
        for (const auto& r : result.rows) {
          if (r.gt == gt && r.mode == mode && r.l == l) series.push_back(&r);
        }
        std::stable_sort(series.begin(), series.end(),
                         [](const SweepRow* a, const SweepRow* b) { return a->alpha2 < b->alpha2; });
        auto increasing = [&](auto value) {
          for (std::size_t i = 1; i < series.size(); ++i) {
            if (!(std::abs(value(*series[i])) > std::abs(value(*series[i - 1])))) return false;
          }
          return true;
        };
        std::string line = "mode " + text::mode_name(mode) + " l=" + std::to_string(l) + " gt=" + fmt17(gt) +
                           ": |d_symbolic| strictly increasing in |alpha|^2: " +
                           (increasing([](const SweepRow& r) { return r.d_symbolic; }) ? "yes" : "no");
        if (cfg.numeric) {
          line += "; |d_numeric|: ";
          line += increasing([](const SweepRow& r) { return *r.d_numeric; }) ? "yes" : "no";
        }
        result.summary.push_back(line);
      }
    }
  }
  return result;
}

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = csv_row({"|alpha|^2", "gt", "mode", "l", "d_symbolic", "d_numeric", "classification"});
  for (const auto& row : r.rows) {
    out += csv_row({fmt17(row.alpha2), fmt17(row.gt), text::mode_name(row.mode), std::to_string(row.l),
                    fmt17(row.d_symbolic), row.d_numeric ? fmt17(*row.d_numeric) : "",
                    std::string(to_string(row.classification))});
  }
  return out;
}

inline int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  validate_common(cfg, err);
  const SweepResult r = run_sweep(cfg);
  const std::string csv = sweep_csv(r);
  const auto csv_path = output_path(cfg, cfg.csv_path, "sweep.csv");
  if (csv_path.empty()) {
    out << csv;
  } else {
    write_file(csv_path, csv);
  }
  for (const auto& line : r.summary) err << "summary: " << line << "\n";
  if (const auto p = output_path(cfg, cfg.json_path, "sweep.json"); !p.empty()) {
    nlohmann::ordered_json j;
    j["engine_version"] = kEngineVersion;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& row : r.rows) {
      nlohmann::ordered_json o{{"alpha2", row.alpha2}, {"gt", row.gt},     {"mode", text::mode_name(row.mode)},
                               {"l", row.l},           {"d_symbolic", row.d_symbolic}};
      o["d_numeric"] = row.d_numeric ? nlohmann::ordered_json(*row.d_numeric) : nlohmann::ordered_json();
      o["classification"] = to_string(row.classification);
      j["rows"].push_back(o);
    }
    j["summary"] = r.summary;
    write_file(p, j.dump(2) + "\n");
  }
  return kSuccess;
}

}  // namespace hoa::cli
