#pragma once

// kwidth command-line front end. Every output embeds the run configuration
// (all flags, defaults included) so that `--config <output file>` replays it.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kwidth/kwidth.hpp"

namespace kwidth::cli {

using nlohmann::json;

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitInconsistent = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline std::string format_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  if (x == 0) return "0";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

inline std::string format_number(std::uint64_t x) { return std::to_string(x); }

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : text) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

inline double parse_double(const std::string& text, const std::string& what) {
  double value = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
  if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
    throw UsageError("malformed number '" + text + "' in " + what);
  }
  return value;
}

// "a,b,c" or "start:stop:step" (inclusive).
inline std::vector<double> parse_grid(const std::string& text, const std::string& what) {
  std::vector<double> values;
  if (text.find(':') != std::string::npos) {
    const auto parts = split(text, ':');
    if (parts.size() != 3) throw UsageError(what + " range must be start:stop:step");
    const double start = parse_double(parts[0], what);
    const double stop = parse_double(parts[1], what);
    const double step = parse_double(parts[2], what);
    if (!(step > 0) || stop < start) throw UsageError(what + " range needs step > 0 and stop >= start");
    const auto count = static_cast<std::uint64_t>(std::floor((stop - start) / step + 1e-9));
    for (std::uint64_t i = 0; i <= count; ++i) values.push_back(start + step * static_cast<double>(i));
  } else {
    for (const auto& part : split(text, ',')) {
      if (!part.empty()) values.push_back(parse_double(part, what));
    }
  }
  if (values.empty()) throw UsageError(what + " is empty");
  return values;
}

inline std::vector<std::uint32_t> parse_sizes(const std::string& text, const std::string& what) {
  std::vector<std::uint32_t> out;
  for (double v : parse_grid(text, what)) {
    if (v < 1 || v != std::floor(v) || v > 4294967295.0) throw UsageError(what + " values must be positive integers");
    out.push_back(static_cast<std::uint32_t>(v));
  }
  return out;
}

// Registers options and remembers how to read them back for the run config.
class Recorder {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, T& var, const std::string& help) {
    entries_.push_back({app, name, [&var] { return json(var); }});
    return app->add_option("--" + name, var, help)->capture_default_str();
  }

  CLI::Option* flag(CLI::App* app, const std::string& name, bool& var, const std::string& help) {
    entries_.push_back({app, name, [&var] { return json(var); }});
    return app->add_flag("--" + name, var, help);
  }

  json snapshot(const CLI::App* app) const {
    json flags = json::object();
    for (const auto& e : entries_) {
      if (e.app == app) flags[e.name] = e.get();
    }
    return json{{"tool", "kwidth"}, {"version", kVersion}, {"subcommand", app->get_name()}, {"flags", flags}};
  }

 private:
  struct Entry {
    const CLI::App* app;
    std::string name;
    std::function<json()> get;
  };
  std::vector<Entry> entries_;
};

// Accepts a JSON run config, a JSON output with a run_config field, or any
// output whose comment line carries "run_config=<json>".
inline json load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  const std::string text = buffer.str();
  json cfg;
  const json whole = json::parse(text, nullptr, false);
  if (!whole.is_discarded() && whole.is_object()) {
    cfg = whole.contains("run_config") ? whole["run_config"] : whole;
  } else {
    const auto pos = text.find("run_config=");
    if (pos == std::string::npos) throw UsageError("config file '" + path + "' holds no run configuration");
    const auto end = text.find('\n', pos);
    cfg = json::parse(text.substr(pos + 11, end == std::string::npos ? std::string::npos : end - pos - 11), nullptr,
                      false);
  }
  if (cfg.is_discarded() || !cfg.is_object() || !cfg.contains("subcommand") || !cfg["subcommand"].is_string() ||
      (cfg.contains("flags") && !cfg["flags"].is_object())) {
    throw UsageError("malformed run configuration in '" + path + "'");
  }
  return cfg;
}

inline std::vector<std::string> config_tokens(const json& cfg) {
  std::vector<std::string> tokens;
  if (!cfg.contains("flags")) return tokens;
  for (const auto& [key, value] : cfg["flags"].items()) {
    if (value.is_boolean()) {
      if (value.get<bool>()) tokens.push_back("--" + key);
    } else if (value.is_string()) {
      tokens.push_back("--" + key);
      tokens.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      tokens.push_back("--" + key);
      tokens.push_back(value.dump());
    } else if (!value.is_null()) {
      throw UsageError("config flag '" + key + "' has an unsupported value");
    }
  }
  return tokens;
}

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  std::size_t column(const std::string& name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw UsageError("input table lacks column '" + name + "'");
    return static_cast<std::size_t>(it - header.begin());
  }
};

inline CsvTable read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open input file '" + path + "'");
  CsvTable table;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    if (table.header.empty()) {
      table.header = split(line, ',');
    } else {
      table.rows.push_back(split(line, ','));
      if (table.rows.back().size() != table.header.size()) throw UsageError("ragged row in '" + path + "'");
    }
  }
  if (table.header.empty()) throw UsageError("input file '" + path + "' has no header");
  return table;
}

class Runner {
 public:
  Runner() : app_("Finite-size transition widths of random discrete structures", "kwidth") { build(); }

  int run(std::vector<std::string> args, std::ostream& out, std::ostream& err) {
    out_ = &out;
    err_ = &err;
    if (args.empty()) {
      err << app_.help();
      return kExitUsage;
    }
    try {
      args = apply_config(std::move(args));
      std::vector<std::string> reversed(args.rbegin(), args.rend());
      app_.parse(reversed);
    } catch (const CLI::CallForHelp&) {
      out << (active_ ? active_->help() : app_.help());
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << app_.help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::CallForVersion&) {
      out << kVersion << '\n';
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
    try {
      return dispatch();
    } catch (const UsageError& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::invalid_argument& e) {
      err << "error: invalid argument: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::domain_error& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    } catch (const std::exception& e) {
      err << "error: " << e.what() << '\n';
      return kExitUsage;
    }
  }

 private:
  struct StudyFlags {
    std::string property = "sat";
    std::string kind = "auto";
    std::uint32_t k = 0;
    std::string ensemble = "fnm";
    std::uint64_t seed = 0;
    double confidence = 0.95;
  };

  CLI::App app_;
  Recorder rec_;
  CLI::App* active_ = nullptr;
  std::ostream* out_ = nullptr;
  std::ostream* err_ = nullptr;
  std::string out_path_;
  unsigned threads_ = 0;
  std::map<std::string, std::function<int()>> handlers_;

  // gen
  std::string gen_kind_ = "clause";
  std::uint32_t gen_n_ = 0;
  std::uint32_t gen_k_ = 0;
  std::string gen_ensemble_ = "fnm";
  std::uint64_t gen_m_ = 0;
  double gen_p_ = 0;
  std::uint64_t gen_seed_ = 0;
  std::uint64_t gen_trial_ = 0;
  // solve
  std::string solve_in_;
  std::string solve_property_ = "sat";
  // bystanders
  std::string bys_kind_ = "clause";
  std::uint32_t bys_n_ = 0;
  std::uint32_t bys_k_ = 0;
  std::uint64_t bys_m_ = 0;
  std::string bys_ensemble_ = "fnm";
  std::uint64_t bys_trials_ = 1;
  std::uint64_t bys_seed_ = 0;
  // pcurve
  StudyFlags pc_;
  std::uint32_t pc_n_ = 0;
  std::string pc_grid_;
  std::uint64_t pc_trials_ = 100;
  // mr
  StudyFlags mr_;
  std::string mr_n_;
  double mr_r_ = 0.5;
  std::uint64_t mr_trials_ = 200;
  std::uint64_t mr_batch_ = 0;
  double mr_tolerance_ = 0;
  std::uint64_t mr_m_max_ = 0;
  unsigned mr_spot_ = 1;
  // width
  StudyFlags wd_;
  std::string wd_n_;
  double wd_eps_ = 1.0 / 3.0;
  std::uint64_t wd_trials_ = 200;
  std::uint64_t wd_batch_ = 0;
  double wd_tolerance_ = 0;
  std::uint64_t wd_m_max_ = 0;
  double wd_mu_max_ = 0;
  unsigned wd_spot_ = 1;
  bool wd_check_ = false;
  double wd_t_ = 0.3;
  double wd_c_lower_ = 0;
  double wd_c_upper_ = 0;
  // fit
  std::string fit_in_;
  std::string fit_points_;
  std::string fit_model_ = "power";
  // bound
  std::uint32_t bd_k_ = 3;
  double bd_t_ = 0.3;
  double bd_c_lower_ = 0;
  double bd_c_upper_ = 0;
  double bd_n_ = 1;
  double bd_p1_ = 1;
  double bd_p2_ = 0;
  double bd_eps_ = -1;
  bool bd_optimize_ = false;
  // verify-lemma1
  std::string vl_m_ = "10,100,1000,10000";
  double vl_gamma_ = 0.5;
  double vl_beta_ = 0.5;
  // couple
  std::string cp_property_ = "2sat";
  std::string cp_kind_ = "auto";
  std::uint32_t cp_n_ = 8;
  std::uint32_t cp_k_ = 0;
  std::uint64_t cp_m_ = 20;
  std::string cp_ensemble_ = "fnm";
  std::uint64_t cp_b_lo_ = 0;
  std::uint64_t cp_b_hi_ = 0;
  std::uint64_t cp_trials_ = 10000;
  std::uint64_t cp_seed_ = 0;

  CLI::App* subcommand(const std::string& name, const std::string& help, std::function<int()> handler) {
    CLI::App* sub = app_.add_subcommand(name, help);
    sub->add_option("--out,-o", out_path_, "output file (default: standard output)");
    sub->add_option("--threads", threads_, "worker threads (default: KWIDTH_THREADS or hardware)");
    sub->footer("--config FILE replays the run configuration embedded in FILE; explicit flags override it.");
    sub->parse_complete_callback([this, sub] { active_ = sub; });
    handlers_[name] = std::move(handler);
    return sub;
  }

  void study_flags(CLI::App* sub, StudyFlags& f) {
    rec_.add(sub, "property", f.property, "sat | 2sat | qcore:Q | qcolor:Q | cost:L:U | size:T");
    rec_.add(sub, "kind", f.kind, "auto | clause | edge | hyperedge");
    rec_.add(sub, "k", f.k, "item arity (0 = default for the property)");
    rec_.add(sub, "ensemble", f.ensemble, "fnm | fnm-rep | fnp");
    rec_.add(sub, "seed", f.seed, "master seed");
    rec_.add(sub, "confidence", f.confidence, "confidence level for intervals");
  }

  void build() {
    app_.require_subcommand(1);
    app_.set_version_flag("--version", std::string(kVersion));
    app_.footer("--config FILE replays the run configuration embedded in FILE; explicit flags override it.");
    app_.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);

    CLI::App* gen = subcommand("gen", "sample one random instance", [this] { return do_gen(); });
    rec_.add(gen, "kind", gen_kind_, "clause | edge | hyperedge");
    rec_.add(gen, "n", gen_n_, "variables or vertices")->required();
    rec_.add(gen, "k", gen_k_, "item arity (0 = 3 for clauses, 2 for edges)");
    rec_.add(gen, "ensemble", gen_ensemble_, "fnm | fnm-rep | fnp");
    rec_.add(gen, "m", gen_m_, "item count for fnm and fnm-rep");
    rec_.add(gen, "p", gen_p_, "inclusion probability for fnp");
    rec_.add(gen, "seed", gen_seed_, "master seed");
    rec_.add(gen, "trial", gen_trial_, "trial index within the seed");

    CLI::App* solve = subcommand("solve", "decide a property on an instance file", [this] { return do_solve(); });
    rec_.add(solve, "in", solve_in_, "DIMACS or edge-list file")->required();
    rec_.add(solve, "property", solve_property_, "sat | 2sat | qcore:Q | qcolor:Q | cost:L:U | size:T");

    CLI::App* bys = subcommand("bystanders", "partially-free item counts per trial", [this] { return do_bystanders(); });
    rec_.add(bys, "kind", bys_kind_, "clause | edge | hyperedge");
    rec_.add(bys, "n", bys_n_, "variables or vertices")->required();
    rec_.add(bys, "k", bys_k_, "item arity (0 = default)");
    rec_.add(bys, "m", bys_m_, "item count")->required();
    rec_.add(bys, "ensemble", bys_ensemble_, "fnm | fnm-rep");
    rec_.add(bys, "trials", bys_trials_, "number of independent samples");
    rec_.add(bys, "seed", bys_seed_, "master seed");

    CLI::App* pc = subcommand("pcurve", "fraction of trials with the property over an m grid", [this] { return do_pcurve(); });
    study_flags(pc, pc_);
    rec_.add(pc, "n", pc_n_, "variables or vertices")->required();
    rec_.add(pc, "grid", pc_grid_, "m values: a,b,c or start:stop:step (expected counts for fnp)")->required();
    rec_.add(pc, "trials", pc_trials_, "trials per grid point");

    CLI::App* mr = subcommand("mr", "smallest m with at most a fraction r proper", [this] { return do_mr(); });
    study_flags(mr, mr_);
    rec_.add(mr, "n", mr_n_, "variables or vertices (comma list allowed)")->required();
    rec_.add(mr, "r", mr_r_, "target fraction");
    rec_.add(mr, "trials", mr_trials_, "maximum trials");
    rec_.add(mr, "batch", mr_batch_, "trials per batch (0 = all at once)");
    rec_.add(mr, "tolerance", mr_tolerance_, "stop when the interval half-width is at most this");
    rec_.add(mr, "m-max", mr_m_max_, "longest prefix examined (0 = automatic)");
    rec_.add(mr, "spot-checks", mr_spot_, "monotonicity re-checks per trial");

    CLI::App* wd = subcommand("width", "transition width between 1-eps and eps", [this] { return do_width(); });
    study_flags(wd, wd_);
    rec_.add(wd, "n", wd_n_, "variables or vertices (comma list allowed)")->required();
    rec_.add(wd, "eps", wd_eps_, "width level");
    rec_.add(wd, "trials", wd_trials_, "maximum trials");
    rec_.add(wd, "batch", wd_batch_, "trials per batch (0 = all at once)");
    rec_.add(wd, "tolerance", wd_tolerance_, "half-width stopping rule (fnp: bisection resolution)");
    rec_.add(wd, "m-max", wd_m_max_, "longest prefix examined (0 = automatic)");
    rec_.add(wd, "mu-max", wd_mu_max_, "fnp: largest expected count searched (0 = automatic)");
    rec_.add(wd, "spot-checks", wd_spot_, "monotonicity re-checks per trial");
    rec_.flag(wd, "check-bound", wd_check_, "compare against the k-SAT lower bound; exit 2 on violation");
    rec_.add(wd, "t", wd_t_, "bound: offset above the critical ratio");
    rec_.add(wd, "c-lower", wd_c_lower_, "bound: lower ratio bracket (0 = default for k)");
    rec_.add(wd, "c-upper", wd_c_upper_, "bound: upper ratio bracket (0 = default for k)");

    CLI::App* fit = subcommand("fit", "fit scaling laws to width or threshold tables", [this] { return do_fit(); });
    rec_.add(fit, "in", fit_in_, "comma-separated CSV files from `width` or `mr`");
    rec_.add(fit, "points", fit_points_, "inline points n:value[:stderr],...");
    rec_.add(fit, "model", fit_model_, "power (width = C n^(1-1/nu)) | threshold (m = alpha n + A n^(1-1/nu))");

    CLI::App* bd = subcommand("bound", "leading-order k-SAT width lower bound", [this] { return do_bound(); });
    rec_.add(bd, "k", bd_k_, "clause length");
    rec_.add(bd, "t", bd_t_, "offset above the critical ratio");
    rec_.add(bd, "c-lower", bd_c_lower_, "lower ratio bracket (0 = default for k)");
    rec_.add(bd, "c-upper", bd_c_upper_, "upper ratio bracket (0 = default for k)");
    rec_.add(bd, "n", bd_n_, "variables");
    rec_.add(bd, "p1", bd_p1_, "probability at the lower end");
    rec_.add(bd, "p2", bd_p2_, "probability at the upper end");
    rec_.add(bd, "eps", bd_eps_, "if in (0, 1/2): use p1 - p2 = 1 - 2 eps");
    rec_.flag(bd, "optimize-t", bd_optimize_, "maximise the constant over t");

    CLI::App* vl = subcommand("verify-lemma1", "exact ball-sampling maximum against its bound", [this] { return do_verify(); });
    rec_.add(vl, "m", vl_m_, "ball totals: a,b,c or start:stop:step");
    rec_.add(vl, "gamma", vl_gamma_, "green fraction");
    rec_.add(vl, "beta", vl_beta_, "sample fraction");

    CLI::App* cp = subcommand("couple", "replay the tag-permutation coupling", [this] { return do_couple(); });
    rec_.add(cp, "property", cp_property_, "property evaluated on kept sets");
    rec_.add(cp, "kind", cp_kind_, "auto | clause | edge | hyperedge");
    rec_.add(cp, "n", cp_n_, "variables or vertices");
    rec_.add(cp, "k", cp_k_, "item arity (0 = default)");
    rec_.add(cp, "m", cp_m_, "item count");
    rec_.add(cp, "ensemble", cp_ensemble_, "fnm | fnm-rep");
    rec_.add(cp, "b-lo", cp_b_lo_, "smallest tag count (0 = ceil(m/4))");
    rec_.add(cp, "b-hi", cp_b_hi_, "largest tag count (0 = floor(3m/4))");
    rec_.add(cp, "trials", cp_trials_, "trials");
    rec_.add(cp, "seed", cp_seed_, "master seed");
  }

  std::vector<std::string> apply_config(std::vector<std::string> args) {
    std::optional<std::string> path;
    std::vector<std::string> rest;
    for (std::size_t i = 0; i < args.size(); ++i) {
      if (args[i] == "--config") {
        if (i + 1 >= args.size()) throw UsageError("--config needs a file argument");
        path = args[++i];
      } else if (args[i].rfind("--config=", 0) == 0) {
        path = args[i].substr(9);
      } else {
        rest.push_back(args[i]);
      }
    }
    if (!path) return rest;
    const json cfg = load_config(*path);
    std::string sub = cfg["subcommand"].get<std::string>();
    if (!rest.empty() && handlers_.count(rest.front()) != 0) {
      if (rest.front() != sub) throw UsageError("config is for '" + sub + "', not '" + rest.front() + "'");
      rest.erase(rest.begin());
    }
    if (handlers_.count(sub) == 0) throw UsageError("config names unknown subcommand '" + sub + "'");
    std::vector<std::string> tokens{sub};
    for (auto& t : config_tokens(cfg)) tokens.push_back(std::move(t));
    for (auto& t : rest) tokens.push_back(std::move(t));
    return tokens;
  }

  int dispatch() {
    if (!active_) throw UsageError("no subcommand given");
    return handlers_.at(active_->get_name())();
  }

  json run_config() const { return rec_.snapshot(active_); }

  std::string banner(const std::string& prefix) const {
    return prefix + "kwidth " + kVersion + " run_config=" + run_config().dump();
  }

  void emit(const std::string& text) {
    if (out_path_.empty()) {
      *out_ << text;
      out_->flush();
      return;
    }
    std::ofstream file(out_path_, std::ios::binary | std::ios::trunc);
    if (!file) throw std::runtime_error("I/O failure: cannot open '" + out_path_ + "' for writing");
    file << text;
    file.flush();
    if (!file) throw std::runtime_error("I/O failure: write to '" + out_path_ + "' failed");
  }

  std::string csv(const std::vector<std::string>& header, const std::vector<std::vector<std::string>>& rows) const {
    std::string text = banner("# ") + "\n";
    auto line = [&](const std::vector<std::string>& cells) {
      for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i > 0) text += ',';
        text += cells[i];
      }
      text += '\n';
    };
    line(header);
    for (const auto& r : rows) line(r);
    return text;
  }

  std::string json_output(json body) const {
    body["run_config"] = run_config();
    return body.dump(2) + "\n";
  }

  struct Resolved {
    Universe universe;
    PropertyKind property;
  };

  static Resolved resolve(const std::string& property_text, const std::string& kind_text, std::uint32_t n,
                          std::uint32_t k) {
    const PropertyKind property = parse_property(property_text);
    const bool graphish = std::holds_alternative<QCore>(property) || std::holds_alternative<QColorable>(property);
    ItemKind kind = graphish ? ItemKind::Edge : ItemKind::Clause;
    if (kind_text != "auto") kind = parse_item_kind(kind_text);
    if (k == 0) {
      if (std::holds_alternative<TwoSat>(property) || kind == ItemKind::Edge) {
        k = 2;
      } else {
        k = 3;
      }
    }
    if (std::holds_alternative<TwoSat>(property) && k != 2) throw UsageError("2sat needs k = 2");
    if (n == 0) throw UsageError("n must be positive");
    Universe u(kind, n, k);
    if (!compatible(property, u)) {
      throw UsageError("property " + property_text + " does not apply to " + std::string(to_string(kind)) + " items");
    }
    return {u, property};
  }

  StudySpec study(const StudyFlags& f, std::uint32_t n) const {
    const Resolved r = resolve(f.property, f.kind, n, f.k);
    StudySpec spec;
    spec.property = r.property;
    spec.kind = r.universe.kind();
    spec.n = n;
    spec.k = r.universe.k();
    spec.mode = parse_ensemble_mode(f.ensemble);
    spec.master_seed = f.seed;
    spec.confidence = f.confidence;
    spec.threads = threads_;
    return spec;
  }

  static std::uint32_t default_k(ItemKind kind, std::uint32_t k) {
    if (k != 0) return k;
    return kind == ItemKind::Clause ? 3 : (kind == ItemKind::Edge ? 2 : 3);
  }

  int do_gen() {
    const ItemKind kind = parse_item_kind(gen_kind_);
    const Universe u(kind, gen_n_, default_k(kind, gen_k_));
    const EnsembleMode mode = parse_ensemble_mode(gen_ensemble_);
    const EnsembleSpec spec{mode, gen_m_, gen_p_};
    const ItemSequence seq = sample(u, spec, SeedSpec{gen_seed_, gen_trial_});
    std::ostringstream text;
    const std::vector<std::string> comments{banner("")};
    if (u.is_signed()) {
      write_dimacs(text, seq, comments);
    } else {
      write_edge_list(text, seq, comments);
    }
    emit(text.str());
    return kExitOk;
  }

  int do_solve() {
    std::ifstream in(solve_in_, std::ios::binary);
    if (!in) throw UsageError("cannot open input file '" + solve_in_ + "'");
    const ItemSequence seq = read_instance(in);
    const PropertyKind property = parse_property(solve_property_);
    if (!compatible(property, seq.universe)) throw UsageError("property does not apply to this instance");
    json body;
    body["property"] = to_string(property);
    body["n"] = seq.universe.n();
    body["m"] = seq.size();
    body["stats"] = nullptr;
    if (std::holds_alternative<Sat>(property) || std::holds_alternative<SolverCostInRange>(property)) {
      const SolveStats stats = solve_dpll(seq.universe, detail::distinct_items(seq.universe, seq.view()));
      body["stats"] = {{"recursive_calls", stats.recursive_calls},
                       {"pure_literal_eliminations", stats.pure_literal_eliminations},
                       {"unit_propagations", stats.unit_propagations},
                       {"satisfiable", stats.satisfiable}};
    }
    body["result"] = evaluate(property, seq);
    emit(json_output(body));
    return kExitOk;
  }

  int do_bystanders() {
    const ItemKind kind = parse_item_kind(bys_kind_);
    const Universe u(kind, bys_n_, default_k(kind, bys_k_));
    const EnsembleMode mode = parse_ensemble_mode(bys_ensemble_);
    if (mode == EnsembleMode::Bernoulli) throw UsageError("bystanders needs fnm or fnm-rep");
    const EnsembleSpec spec{mode, bys_m_, 0.0};
    validate(u, spec);
    std::vector<BystanderReport> reports(bys_trials_);
    parallel_for(bys_trials_, threads_, [&](std::size_t t) {
      reports[t] = classify_partially_free(sample(u, spec, SeedSpec{bys_seed_, t}));
      reports[t].flags.clear();
    });
    std::vector<std::vector<std::string>> rows;
    for (std::size_t t = 0; t < reports.size(); ++t) {
      const auto& r = reports[t];
      rows.push_back({format_number(std::uint64_t{u.n()}), format_number(std::uint64_t{u.k()}), format_number(r.m),
                      std::string(to_string(mode)), format_number(bys_seed_), format_number(r.free_count),
                      format_number(r.predicted_fraction), format_number(r.empirical_fraction()),
                      format_number(std::uint64_t{t})});
    }
    emit(csv({"n", "k", "m", "ensemble", "seed", "free_count", "predicted_fraction", "empirical_fraction", "trial"}, rows));
    return kExitOk;
  }

  int do_pcurve() {
    const StudySpec spec = study(pc_, pc_n_);
    const std::vector<double> grid = parse_grid(pc_grid_, "--grid");
    const PCurve curve = pcurve(spec, grid, pc_trials_);
    std::vector<std::vector<std::string>> rows;
    for (const auto& p : curve.points) {
      rows.push_back({format_number(std::uint64_t{spec.n}), format_number(std::uint64_t{spec.k}), format_number(p.m),
                      format_number(p.trials), format_number(p.successes), format_number(p.p_hat),
                      format_number(p.ci_low), format_number(p.ci_high)});
    }
    emit(csv({"n", "k", "m", "trials", "successes", "p_hat", "ci_lo", "ci_hi"}, rows));
    return kExitOk;
  }

  int do_mr() {
    std::vector<std::vector<std::string>> rows;
    std::uint64_t violations = 0;
    for (std::uint32_t n : parse_sizes(mr_n_, "--n")) {
      StudySpec spec = study(mr_, n);
      spec.m_max = mr_m_max_;
      const std::uint64_t batch = mr_batch_ == 0 ? mr_trials_ : mr_batch_;
      const MrEstimate est = estimate_m_r(spec, mr_r_, batch, mr_tolerance_, mr_trials_, mr_spot_);
      violations += est.monotonicity_violations;
      rows.push_back({format_number(std::uint64_t{n}), format_number(mr_r_), format_number(est.m_r),
                      format_number(est.stderr_), format_number(est.trials)});
    }
    if (violations > 0) *err_ << "warning: " << violations << " monotonicity violations observed\n";
    emit(csv({"n", "r", "m_r", "stderr", "trials"}, rows));
    return kExitOk;
  }

  int do_width() {
    std::vector<std::vector<std::string>> rows;
    std::vector<ConsistencyReport> checks;
    std::uint64_t violations = 0;
    for (std::uint32_t n : parse_sizes(wd_n_, "--n")) {
      StudySpec spec = study(wd_, n);
      spec.m_max = wd_m_max_;
      if (wd_check_ && !std::holds_alternative<Sat>(spec.property)) {
        throw UsageError("--check-bound applies to the k-SAT property only");
      }
      WidthEstimate w;
      if (spec.mode == EnsembleMode::Bernoulli) {
        StudySpec sized = spec;
        sized.mode = EnsembleMode::WithReplacement;
        const double mu_max = wd_mu_max_ > 0 ? wd_mu_max_ : 2.0 * static_cast<double>(default_m_max(sized));
        w = width_bernoulli(spec, wd_eps_, wd_trials_, mu_max, wd_tolerance_ > 0 ? wd_tolerance_ : 0.5);
      } else {
        const std::uint64_t batch = wd_batch_ == 0 ? wd_trials_ : wd_batch_;
        w = width(spec, wd_eps_, batch, wd_tolerance_, wd_trials_, wd_spot_);
      }
      violations += w.monotonicity_violations;
      rows.push_back({format_number(std::uint64_t{n}), format_number(wd_eps_), format_number(w.m_high_sat),
                      format_number(w.m_low_sat), format_number(w.width), format_number(w.standard_error)});
      if (wd_check_) {
        const RatioBounds defaults = default_ratio_bounds(spec.k);
        const CorollaryInputs in{spec.k, wd_t_, wd_c_lower_ > 0 ? wd_c_lower_ : defaults.lower,
                                 wd_c_upper_ > 0 ? wd_c_upper_ : defaults.upper, static_cast<double>(n)};
        const double bound = corollary3_bound(in, 1 - wd_eps_, wd_eps_);
        checks.push_back(consistency_check(w, bound));
        const auto& c = checks.back();
        *err_ << "bound check n=" << n << " width=" << format_number(c.width)
              << " stderr=" << format_number(c.standard_error) << " bound(leading order)=" << format_number(c.bound)
              << " margin=" << format_number(c.margin) << (c.ok ? " ok" : " VIOLATED") << '\n';
      }
    }
    if (violations > 0) *err_ << "warning: " << violations << " monotonicity violations observed\n";
    emit(csv({"n", "eps", "m_lo", "m_hi", "width", "stderr"}, rows));
    for (const auto& c : checks) {
      if (!c.ok) return kExitInconsistent;
    }
    return kExitOk;
  }

  int do_fit() {
    std::vector<std::tuple<double, double, double>> points;  // n, value, stderr
    const bool power = fit_model_ == "power";
    if (!power && fit_model_ != "threshold") throw UsageError("--model must be power or threshold");
    if (!fit_in_.empty()) {
      for (const auto& path : split(fit_in_, ',')) {
        const CsvTable t = read_csv(path);
        const std::size_t cn = t.column("n");
        const std::size_t cv = t.column(power ? "width" : "m_r");
        const std::size_t cs = t.column("stderr");
        for (const auto& row : t.rows) {
          points.emplace_back(parse_double(row[cn], path), parse_double(row[cv], path), parse_double(row[cs], path));
        }
      }
    }
    if (!fit_points_.empty()) {
      for (const auto& item : split(fit_points_, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3) throw UsageError("--points entries are n:value[:stderr]");
        points.emplace_back(parse_double(parts[0], "--points"), parse_double(parts[1], "--points"),
                            parts.size() == 3 ? parse_double(parts[2], "--points") : 0.0);
      }
    }
    if (points.empty()) throw UsageError("fit needs --in or --points");
    if (power) {
      std::vector<WidthPoint> wp;
      for (const auto& [n, v, s] : points) wp.push_back({n, v, s});
      const ScalingFit f = fit_nu(wp);
      emit(csv({"nu_hat", "amplitude", "stderr_nu"},
               {{format_number(f.nu_hat), format_number(f.amplitude), format_number(f.stderr_nu)}}));
    } else {
      std::vector<ThresholdPoint> tp;
      for (const auto& [n, v, s] : points) tp.push_back({n, v});
      const ThresholdFit f = threshold_fit(tp);
      emit(csv({"alpha", "amplitude", "nu", "condition_number", "nu_identified"},
               {{format_number(f.alpha), format_number(f.amplitude), format_number(f.nu),
                 format_number(f.condition_number), f.nu_identified ? "true" : "false"}}));
    }
    return kExitOk;
  }

  int do_bound() {
    const RatioBounds defaults = default_ratio_bounds(bd_k_);
    const double c_lower = bd_c_lower_ > 0 ? bd_c_lower_ : defaults.lower;
    const double c_upper = bd_c_upper_ > 0 ? bd_c_upper_ : defaults.upper;
    double p1 = bd_p1_;
    double p2 = bd_p2_;
    if (bd_eps_ >= 0) {
      if (!(bd_eps_ < 0.5)) throw UsageError("--eps must lie in [0, 1/2)");
      p1 = 1 - bd_eps_;
      p2 = bd_eps_;
    }
    double t = bd_t_;
    if (bd_optimize_) t = optimize_t(bd_k_, c_lower, c_upper).t;
    const CorollaryInputs in{bd_k_, t, c_lower, c_upper, bd_n_};
    json body;
    body["leading_order"] = true;
    body["k"] = bd_k_;
    body["t"] = t;
    body["c_lower"] = c_lower;
    body["c_upper"] = c_upper;
    body["n"] = bd_n_;
    body["p1"] = p1;
    body["p2"] = p2;
    body["constant"] = corollary_constant(bd_k_, t, c_lower, c_upper);
    body["bound"] = corollary3_bound(in, p1, p2);
    emit(json_output(body));
    return kExitOk;
  }

  int do_verify() {
    std::vector<std::vector<std::string>> rows;
    for (double mv : parse_grid(vl_m_, "--m")) {
      if (mv < 2 || mv != std::floor(mv)) throw UsageError("--m values must be integers >= 2");
      const auto m = static_cast<std::uint64_t>(mv);
      const auto g = static_cast<std::uint64_t>(std::llround(vl_gamma_ * mv));
      const auto b = static_cast<std::uint64_t>(std::llround(vl_beta_ * mv));
      if (g == 0 || g >= m || b == 0 || b >= m) throw UsageError("gamma and beta must leave 0 < g, b < m");
      const BallCounts c{m - g, g, b};
      const double exact = max_critical_pmf(c).value;
      const double bound = max_bound(c);
      rows.push_back({format_number(m), format_number(static_cast<double>(g) / mv),
                      format_number(static_cast<double>(b) / mv), format_number(exact), format_number(bound),
                      format_number(exact / bound)});
    }
    emit(csv({"m", "gamma", "beta", "exact_max", "bound", "ratio"}, rows));
    return kExitOk;
  }

  int do_couple() {
    const Resolved r = resolve(cp_property_, cp_kind_, cp_n_, cp_k_);
    const EnsembleMode mode = parse_ensemble_mode(cp_ensemble_);
    const std::uint64_t b_lo = cp_b_lo_ != 0 ? cp_b_lo_ : std::max<std::uint64_t>(1, (cp_m_ + 3) / 4);
    const std::uint64_t b_hi = cp_b_hi_ != 0 ? cp_b_hi_ : 3 * cp_m_ / 4;
    const TaggingReport report =
        tagging_experiment(r.property, r.universe, mode, cp_m_, b_lo, b_hi, cp_trials_, cp_seed_, threads_);
    std::vector<std::vector<std::string>> rows;
    bool all_within = true;
    for (const auto& row : report.rows) {
      all_within = all_within && row.within;
      rows.push_back({format_number(row.b), format_number(row.trials), format_number(row.mean_diff),
                      format_number(row.se_diff), format_number(row.mean_bound), row.within ? "true" : "false"});
    }
    *err_ << "mean relevant items " << format_number(report.mean_relevant) << ", mean critical integers "
          << format_number(report.mean_critical_integers) << '\n';
    emit(csv({"b", "trials", "mean_diff", "se_diff", "mean_bound", "within"}, rows));
    return all_within ? kExitOk : kExitInconsistent;
  }
};

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Runner runner;
  return runner.run(args, out, err);
}

}  // namespace kwidth::cli
