#include "cli.hpp"

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "povmcert/experiment.hpp"
#include "povmcert/fidelity.hpp"
#include "povmcert/io.hpp"
#include "povmcert/optimize.hpp"
#include "povmcert/robustness.hpp"

namespace povmcert::cli {

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

struct Globals {
  std::uint64_t seed = 1;
  std::string out_dir;
  int threads = 1;
  std::string format = "json";
};

struct OptimizerArgs {
  int restarts = 32;
  int max_iters = 500;
  double tol = 1e-10;
};

void add_optimizer_options(CLI::App* app, OptimizerArgs& a) {
  app->add_option("--restarts", a.restarts, "see-saw restarts")->check(CLI::PositiveNumber);
  app->add_option("--max-iters", a.max_iters, "iterations per restart")->check(CLI::PositiveNumber);
  app->add_option("--tol", a.tol, "convergence tolerance on the witness value")->check(CLI::PositiveNumber);
}

OptimizerConfig make_config(const Globals& g, const OptimizerArgs& a) {
  OptimizerConfig c;
  c.restarts = a.restarts;
  c.max_iters = a.max_iters;
  c.tol = a.tol;
  c.seed = g.seed;
  c.threads = g.threads;
  c.check();
  return c;
}

const std::vector<std::string> kFamilies = {"sic", "trine", "sym-trine"};

// Collects the parameters and outputs of one command and writes each
// artifact together with a sidecar <artifact>.manifest.json.
class Run {
public:
  Run(std::string command, const CLI::App& app, const CLI::App& sub, const Globals& g, bool files_by_default)
      : command_(std::move(command)), seed_(g.seed), start_(Clock::now()) {
    for (const CLI::App* a : {&app, &sub}) {
      for (const CLI::Option* o : a->get_options()) {
        if (o->count() == 0) continue;
        const auto& r = o->results();
        std::string v;
        for (const auto& s : r) v += (v.empty() ? "" : ",") + s;
        params_[o->get_name()] = v;
      }
    }
    if (!g.out_dir.empty()) {
      dir_ = g.out_dir;
    } else if (const char* env = std::getenv(kOutDirEnv); env && *env) {
      dir_ = env;
    } else if (files_by_default) {
      dir_ = ".";
    }
  }

  bool writes_files() const { return !dir_.empty(); }

  static std::string manifest_name(const std::string& name) { return name + ".manifest.json"; }

  std::string write(const std::string& name, const std::string& contents) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw std::runtime_error("cannot create output directory '" + dir_ + "': " + ec.message());
    const std::string path = (fs::path(dir_) / name).string();
    write_file(path, contents);

    const double secs = std::chrono::duration<double>(Clock::now() - start_).count();
    Json m = {{"command", command_},
              {"parameters", params_},
              {"seed", seed_},
              {"tool_version", kToolVersion},
              {"outputs", Json::array({name})},
              {"wall_clock_seconds", secs}};
    write_file((fs::path(dir_) / manifest_name(name)).string(), m.dump(2) + "\n");
    outputs_.push_back(path);
    return path;
  }

  const std::vector<std::string>& outputs() const { return outputs_; }

private:
  std::string command_;
  std::uint64_t seed_;
  Clock::time_point start_;
  Json params_ = Json::object();
  std::string dir_;
  std::vector<std::string> outputs_;
};

std::string json_artifact(Json j, const std::string& name) {
  Json out = {{"manifest", Run::manifest_name(name)}};
  for (auto& [k, v] : j.items()) out[k] = v;
  return out.dump(2) + "\n";
}

std::string csv_comment(const std::string& name) { return "# manifest: " + Run::manifest_name(name) + "\n"; }

std::string read_input(const std::string& path) {
  try {
    return read_file(path);
  } catch (const std::runtime_error& e) {
    throw std::invalid_argument(e.what());
  }
}

Json parse_json_file(const std::string& path) {
  try {
    return Json::parse(read_input(path));
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("'" + path + "' is not valid JSON: " + e.what());
  }
}

std::vector<double> parse_kgrid(const std::string& spec) {
  std::vector<double> out;
  auto num = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw std::invalid_argument("bad k grid value '" + s + "'");
    }
    if (used != s.size()) throw std::invalid_argument("bad k grid value '" + s + "'");
    return v;
  };
  if (spec.find(':') != std::string::npos) {
    std::vector<std::string> parts;
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ':')) parts.push_back(p);
    if (parts.size() != 3) throw std::invalid_argument("k grid range must be start:stop:step");
    const double a = num(parts[0]);
    const double b = num(parts[1]);
    const double h = num(parts[2]);
    if (!(h > 0.0) || b < a) throw std::invalid_argument("k grid range needs step > 0 and stop >= start");
    const long n = std::lround(std::floor((b - a) / h + 1e-9));
    for (long i = 0; i <= n; ++i) out.push_back(a + static_cast<double>(i) * h);
  } else {
    std::stringstream ss(spec);
    std::string p;
    while (std::getline(ss, p, ',')) out.push_back(num(p));
  }
  if (out.empty()) throw std::invalid_argument("k grid is empty");
  for (double k : out) {
    if (!(k >= 0.0)) throw std::invalid_argument("k grid values must be >= 0");
  }
  return out;
}

BoundResult projective_bound_for(WitnessFamily f, const WitnessSpec& w, const OptimizerConfig& cfg) {
  switch (f) {
    case WitnessFamily::Sic:
      return projective_bound_sic(w.k());
    case WitnessFamily::SymTrine:
      return projective_bound_symtrine(w.k());
    case WitnessFamily::Trine:
      break;
  }
  return projective_bound_numeric(w, cfg);
}

// ---- bounds ---------------------------------------------------------------

struct BoundsArgs {
  std::string witness;
  double k = 0.0;
  std::string kinds;
  OptimizerArgs opt;
};

int cmd_bounds(const BoundsArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const WitnessFamily fam = parse_family(a.witness);
  const WitnessSpec w = make_witness(fam, a.k);
  const OptimizerConfig cfg = make_config(g, a.opt);

  std::vector<std::string> kinds;
  if (a.kinds.empty()) {
    kinds = {"projective"};
    if (w.scenario().povm_outcomes == 4) kinds.push_back("three-outcome");
    kinds.push_back("quantum");
  } else {
    std::stringstream ss(a.kinds);
    std::string k;
    while (std::getline(ss, k, ',')) kinds.push_back(k);
  }

  std::vector<BoundResult> results;
  for (const auto& k : kinds) {
    if (k == "projective") {
      results.push_back(projective_bound_for(fam, w, cfg));
    } else if (k == "projective-numeric") {
      results.push_back(projective_bound_numeric(w, cfg));
    } else if (k == "three-outcome") {
      results.push_back(three_outcome_max(w, cfg));
    } else if (k == "quantum") {
      results.push_back(seesaw_maximize(w, cfg));
    } else {
      throw std::invalid_argument("unknown bound kind '" + k +
                                  "' (expected projective, projective-numeric, three-outcome, quantum)");
    }
  }

  Json arr = Json::array();
  for (const auto& r : results) arr.push_back(to_json(r));
  const Json doc = {{"witness", w.name()}, {"k", w.k()}, {"bounds", arr}};
  if (g.format == "csv") {
    out << "kind,value,k,heuristic\n";
    for (const auto& r : results) {
      out << to_string(r.kind) << ',' << format_double(r.value) << ',' << format_double(r.k) << ','
          << (r.heuristic ? "true" : "false") << '\n';
    }
  } else {
    out << doc.dump(2) << '\n';
  }
  if (run.writes_files()) run.write("bounds.json", json_artifact(doc, "bounds.json"));
  return 0;
}

// ---- fidelity-curve -------------------------------------------------------

struct FidelityArgs {
  std::string witness;
  double k = 0.0;
  long samples = 0;
  double bin_width = 0.002;
  std::string stem = "fidelity";
  OptimizerArgs opt;
};

int cmd_fidelity_curve(const FidelityArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const WitnessFamily fam = parse_family(a.witness);
  const WitnessSpec w = make_witness(fam, a.k);
  const TargetPovm target = fam == WitnessFamily::Sic ? sic_target() : trine_target();
  const long n = a.samples > 0 ? a.samples : (fam == WitnessFamily::Sic ? 300000 : 3000);
  const OptimizerConfig cfg = make_config(g, a.opt);

  const FidelityCurve curve = sample_fidelity_curve(w, target, n, a.bin_width, RngStream(g.seed, 0), cfg);

  const std::string samples_name = a.stem + "_samples.csv";
  const std::string envelope_name = a.stem + "_envelope.json";
  std::ostringstream csv;
  csv << csv_comment(samples_name);
  write_samples_csv(csv, curve.points);
  run.write(samples_name, csv.str());
  run.write(envelope_name, json_artifact(to_json(curve.envelope), envelope_name));

  const Json summary = {{"witness", w.name()},
                        {"k", w.k()},
                        {"samples", n},
                        {"skipped", curve.skipped},
                        {"sampler_attempts", curve.sampler.attempts},
                        {"sampler_acceptance_rate", curve.sampler.acceptance_rate()},
                        {"bins", curve.envelope.bins().size()},
                        {"outputs", run.outputs()}};
  out << summary.dump(2) << '\n';
  return 0;
}

// ---- certify --------------------------------------------------------------

struct CertifyArgs {
  std::string counts;
  std::string witness;
  double k = 0.0;
  std::string bounds;
  std::string envelope;
  double syst_err = 0.0;
  std::string config;
  long mc_runs = 0;
  OptimizerArgs opt;
};

int cmd_certify(const CertifyArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const WitnessFamily fam = parse_family(a.witness);
  const WitnessSpec w = make_witness(fam, a.k);
  const OptimizerConfig cfg = make_config(g, a.opt);

  std::istringstream counts_in(read_input(a.counts));
  const ProbabilityTable table = ingest_counts(read_counts_csv(counts_in), w.scenario());

  CertificationBounds bounds;
  if (!a.bounds.empty()) {
    const Json doc = parse_json_file(a.bounds);
    const Json list = doc.contains("bounds") ? doc["bounds"] : doc;
    for (const auto& j : list) {
      const BoundResult b = bound_from_json(j);
      if (b.kind == BoundKind::ProjectiveClosedForm || b.kind == BoundKind::ProjectiveNumeric) {
        if (!bounds.projective || b.value > bounds.projective->value) bounds.projective = b;
      } else if (b.kind == BoundKind::ThreeOutcomeNumeric) {
        bounds.three_outcome = b;
      }
    }
  }
  if (!bounds.projective) bounds.projective = projective_bound_for(fam, w, cfg);
  if (w.scenario().povm_outcomes == 4 && !bounds.three_outcome) bounds.three_outcome = three_outcome_max(w, cfg);

  std::optional<EnvelopeCurve> envelope;
  if (!a.envelope.empty()) envelope = envelope_from_json(parse_json_file(a.envelope));

  double syst = a.syst_err;
  if (a.mc_runs > 0) {
    if (a.config.empty()) throw std::invalid_argument("--mc-runs needs --config");
    const ExperimentConfig ec = config_from_json(parse_json_file(a.config));
    syst = monte_carlo_systematic(ec, w, a.mc_runs, RngStream(g.seed, 1), g.threads);
  }

  const WitnessReport report = certify(table, w, bounds, envelope ? &*envelope : nullptr, syst);
  const Json doc = to_json(report);
  out << doc.dump(2) << '\n';
  if (run.writes_files()) run.write("report.json", json_artifact(doc, "report.json"));
  return 0;
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string config;
  std::string witness;
  double k = 0.0;
  double budget = 0.0;
  long mc_runs = 0;
  std::string stem = "simulated";
};

int cmd_simulate(const SimulateArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const WitnessFamily fam = parse_family(a.witness);
  const WitnessSpec w = make_witness(fam, a.k);
  ExperimentConfig ec = config_from_json(parse_json_file(a.config));
  if (a.budget > 0.0) ec.budget = a.budget;
  ideal_measurements(ec, w);  // rejects configs that do not fit the witness

  RngStream rng(g.seed, 0);
  const auto records = simulate_counts(ec, w, rng);
  const std::string counts_name = a.stem + "_counts.csv";
  std::ostringstream csv;
  csv << csv_comment(counts_name);
  write_counts_csv(csv, records);
  run.write(counts_name, csv.str());

  const ProbabilityTable table = ingest_counts(records, w.scenario());
  const WitnessValue v = evaluate_witness(w, table);
  Json summary = {{"witness", w.name()},
                  {"k", w.k()},
                  {"budget", ec.budget},
                  {"value", v.value},
                  {"stat_err", v.stderr.value_or(0.0)},
                  {"exact_value", evaluate_witness(w, simulated_probabilities(ec, w)).value}};
  if (a.mc_runs > 0) {
    const double syst = monte_carlo_systematic(ec, w, a.mc_runs, RngStream(g.seed, 1), g.threads);
    summary["syst_err"] = syst;
    summary["mc_runs"] = a.mc_runs;
    const std::string syst_name = a.stem + "_systematic.json";
    run.write(syst_name, json_artifact({{"syst_err", syst}, {"runs", a.mc_runs}}, syst_name));
  }
  summary["outputs"] = run.outputs();
  out << summary.dump(2) << '\n';
  return 0;
}

// ---- visibility-curve -----------------------------------------------------

struct VisibilityArgs {
  std::string witness;
  std::string kind = "projective";
  std::string kgrid;
  OptimizerArgs opt;
};

int cmd_visibility_curve(const VisibilityArgs& a, const Globals& g, Run& run, std::ostream& out) {
  const WitnessFamily fam = parse_family(a.witness);
  const VisibilityBound kind = parse_visibility_bound(a.kind);
  const std::vector<double> grid = a.kgrid.empty() ? default_k_grid() : parse_kgrid(a.kgrid);
  if (kind == VisibilityBound::ThreeOutcome && fam != WitnessFamily::Sic) {
    throw std::invalid_argument("three-outcome bounds need a four-outcome witness (sic)");
  }
  const OptimizerConfig cfg = make_config(g, a.opt);
  const auto curve = visibility_curve(fam, kind, grid, cfg);

  std::ostringstream csv;
  write_curve_csv(csv, curve);
  if (g.format == "csv") {
    out << csv.str();
  } else {
    Json arr = Json::array();
    for (const auto& r : curve) {
      arr.push_back({{"k", r.k},
                     {"bound_kind", to_string(r.bound_kind)},
                     {"bound", r.bound_value},
                     {"a_rand", r.a_rand},
                     {"a_q", r.a_q},
                     {"v_crit", r.v_crit},
                     {"clamped", r.clamped}});
    }
    out << arr.dump(2) << '\n';
  }
  if (run.writes_files()) {
    const std::string name = "visibility_" + a.witness + "_" + a.kind + ".csv";
    run.write(name, csv_comment(name) + csv.str());
  }
  return 0;
}

const CLI::App* selected(const CLI::App& app) {
  for (const CLI::App* s : app.get_subcommands({})) {
    if (s->parsed()) return s;
  }
  return nullptr;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Certify and self-test qubit POVMs from prepare-and-measure statistics", "povmcert"};
  app.require_subcommand(1);
  app.fallthrough();

  Globals g;
  app.add_option("--seed", g.seed, "random seed");
  app.add_option("--out-dir", g.out_dir, std::string("output directory (default: $") + kOutDirEnv + " or .)");
  app.add_option("--threads", g.threads, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--format", g.format, "stdout format")->check(CLI::IsMember({"json", "csv"}));

  BoundsArgs ba;
  CLI::App* bounds = app.add_subcommand("bounds", "projective, three-outcome and quantum bounds");
  bounds->add_option("--witness", ba.witness, "sic, trine or sym-trine")->required()->check(CLI::IsMember(kFamilies));
  bounds->add_option("--k", ba.k, "penalty weight")->required()->check(CLI::NonNegativeNumber);
  bounds->add_option("--kinds", ba.kinds, "comma list of projective, projective-numeric, three-outcome, quantum");
  add_optimizer_options(bounds, ba.opt);

  FidelityArgs fa;
  CLI::App* fid = app.add_subcommand("fidelity-curve", "sampled witness value vs fidelity and its envelope");
  fid->add_option("--witness", fa.witness, "sic, trine or sym-trine")->required()->check(CLI::IsMember(kFamilies));
  fid->add_option("--k", fa.k, "penalty weight")->required()->check(CLI::NonNegativeNumber);
  fid->add_option("--samples", fa.samples, "number of sampled POVMs (default 300000 sic, 3000 otherwise)")
      ->check(CLI::PositiveNumber);
  fid->add_option("--bin-width", fa.bin_width, "envelope bin width")->check(CLI::PositiveNumber);
  fid->add_option("--out", fa.stem, "output file stem");
  add_optimizer_options(fid, fa.opt);

  CertifyArgs ca;
  CLI::App* cert = app.add_subcommand("certify", "certification report from a counts file");
  cert->add_option("--counts", ca.counts, "counts CSV (x,y,b,n)")->required();
  cert->add_option("--witness", ca.witness, "sic, trine or sym-trine")->required()->check(CLI::IsMember(kFamilies));
  cert->add_option("--k", ca.k, "penalty weight")->required()->check(CLI::NonNegativeNumber);
  cert->add_option("--bounds", ca.bounds, "bounds JSON to reuse");
  cert->add_option("--envelope", ca.envelope, "envelope JSON for the fidelity estimate");
  cert->add_option("--syst-err", ca.syst_err, "systematic error")->check(CLI::NonNegativeNumber);
  cert->add_option("--config", ca.config, "experiment config JSON (for --mc-runs)");
  cert->add_option("--mc-runs", ca.mc_runs, "Monte Carlo runs for the systematic error")->check(CLI::NonNegativeNumber);
  add_optimizer_options(cert, ca.opt);

  SimulateArgs sa;
  CLI::App* sim = app.add_subcommand("simulate", "simulate counts of the photonic experiment");
  sim->add_option("--config", sa.config, "experiment config JSON")->required();
  sim->add_option("--witness", sa.witness, "sic, trine or sym-trine")->required()->check(CLI::IsMember(kFamilies));
  sim->add_option("--k", sa.k, "penalty weight")->required()->check(CLI::NonNegativeNumber);
  sim->add_option("--budget", sa.budget, "expected counts per setting (overrides the config)")
      ->check(CLI::PositiveNumber);
  sim->add_option("--mc-runs", sa.mc_runs, "Monte Carlo runs for the systematic error")->check(CLI::NonNegativeNumber);
  sim->add_option("--out", sa.stem, "output file stem");

  VisibilityArgs va;
  CLI::App* vis = app.add_subcommand("visibility-curve", "critical visibility as a function of k");
  vis->add_option("--witness", va.witness, "sic, trine or sym-trine")->required()->check(CLI::IsMember(kFamilies));
  vis->add_option("--kind", va.kind, "projective or three-outcome")
      ->check(CLI::IsMember({"projective", "three-outcome"}));
  vis->add_option("--kgrid", va.kgrid, "start:stop:step or comma list (default 0.01:1:0.01)");
  add_optimizer_options(vis, va.opt);

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << "error: " << e.what() << "\n\n";
    const CLI::App* sub = selected(app);
    err << (sub ? sub->help() : app.help());
    return 2;
  }

  const CLI::App* sub = selected(app);
  const std::string name = sub->get_name();
  try {
    const bool files = name == "fidelity-curve" || name == "simulate";
    Run run(name, app, *sub, g, files);
    if (name == "bounds") return cmd_bounds(ba, g, run, out);
    if (name == "fidelity-curve") return cmd_fidelity_curve(fa, g, run, out);
    if (name == "certify") return cmd_certify(ca, g, run, out);
    if (name == "simulate") return cmd_simulate(sa, g, run, out);
    if (name == "visibility-curve") return cmd_visibility_curve(va, g, run, out);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "failed: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace povmcert::cli
