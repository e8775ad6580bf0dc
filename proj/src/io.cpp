#include "povmcert/io.hpp"

#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace povmcert {

namespace {

Json vec_json(const Vec3& v) { return Json::array({v[0], v[1], v[2]}); }

Vec3 vec_from(const Json& j) {
  if (!j.is_array() || j.size() != 3) throw std::invalid_argument("expected a 3-vector");
  return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>());
}

// Runs a parser and maps JSON library errors to std::invalid_argument.
template <class F>
auto guarded(const char* what, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed ") + what + ": " + e.what());
  }
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) {
    const auto a = cell.find_first_not_of(" \t\r");
    const auto b = cell.find_last_not_of(" \t\r");
    out.push_back(a == std::string::npos ? std::string() : cell.substr(a, b - a + 1));
  }
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

bool skip_line(const std::string& line) {
  const auto a = line.find_first_not_of(" \t\r");
  return a == std::string::npos || line[a] == '#';
}

long parse_int(const std::string& s, int line_no) {
  long v = 0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": expected an integer, got '" + s + "'");
  }
  return v;
}

double parse_double(const std::string& s, int line_no) {
  double v = 0.0;
  const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) {
    throw std::invalid_argument("line " + std::to_string(line_no) + ": expected a number, got '" + s + "'");
  }
  return v;
}

Setting parse_setting(const std::string& s, int line_no) {
  if (s == "povm") return Setting::povm();
  const long y = parse_int(s, line_no);
  if (y < 0) throw std::invalid_argument("line " + std::to_string(line_no) + ": negative setting index");
  return Setting::binary(static_cast<int>(y));
}

std::string setting_text(Setting y) { return y.is_povm() ? "povm" : std::to_string(y.index()); }

void expect_header(std::istream& is, const std::vector<std::string>& header, int& line_no) {
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    if (split_csv(line) != header) {
      std::string h;
      for (const auto& c : header) h += (h.empty() ? "" : ",") + c;
      throw std::invalid_argument("expected CSV header '" + h + "'");
    }
    return;
  }
  throw std::invalid_argument("empty CSV input");
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

Json to_json(const Povm& p) {
  Json els = Json::array();
  for (const auto& e : p.elements) els.push_back({{"lambda", e.weight}, {"bloch", vec_json(e.bloch.vec())}});
  return {{"elements", els}};
}

Povm povm_from_json(const Json& j) {
  return guarded("POVM JSON", [&] {
    Povm p;
    for (const auto& e : j.at("elements")) {
      p.elements.emplace_back(e.at("lambda").get<double>(), BlochVector(vec_from(e.at("bloch"))));
    }
    return p;
  });
}

Json to_json(const WitnessSpec& w) {
  Json coeffs = Json::array();
  for (const auto& c : w.coefficients()) coeffs.push_back({{"x", c.x}, {"y", c.y}, {"b", c.b}, {"c", c.c}});
  return {{"name", w.name()},
          {"k", w.k()},
          {"n_preparations", w.scenario().n_preparations},
          {"binary_settings", w.scenario().binary_settings},
          {"povm_outcomes", w.scenario().povm_outcomes},
          {"quantum_max", w.quantum_max()},
          {"coeffs", coeffs}};
}

WitnessSpec witness_from_json(const Json& j) {
  return guarded("witness JSON", [&] {
    std::vector<Coefficient> cs;
    int max_x = -1;
    int max_y = -1;
    for (const auto& c : j.at("coeffs")) {
      Coefficient k{c.at("x").get<int>(), c.at("y").get<int>(), c.at("b").get<int>(), c.at("c").get<double>()};
      max_x = std::max(max_x, k.x);
      max_y = std::max(max_y, k.y);
      cs.push_back(k);
    }
    Scenario s;
    s.povm_outcomes = j.at("povm_outcomes").get<int>();
    s.n_preparations = j.contains("n_preparations") ? j["n_preparations"].get<int>()
                                                    : std::max(max_x + 1, s.povm_outcomes);
    s.binary_settings = j.contains("binary_settings") ? j["binary_settings"].get<int>() : max_y + 1;
    return WitnessSpec::from_coefficients(j.at("name").get<std::string>(), s, cs, j.at("k").get<double>(),
                                          j.at("quantum_max").get<double>());
  });
}

Json to_json(const Strategy& s) {
  Json preps = Json::array();
  for (const auto& p : s.preparations) preps.push_back(vec_json(p.bloch.vec()));
  Json bins = Json::array();
  for (const auto& b : s.binaries) bins.push_back(vec_json(b.axis()));
  return {{"preparations", preps}, {"binaries", bins}, {"povm", to_json(s.povm)}};
}

Json to_json(const BoundResult& b) {
  Json argmax = Json::object();
  if (b.argmax) argmax = to_json(*b.argmax);
  if (b.argmax_x) argmax["x"] = *b.argmax_x;
  Json diag = {{"restarts", b.diagnostics.restarts},
               {"converged_restarts", b.diagnostics.converged_restarts},
               {"iterations", b.diagnostics.iterations},
               {"residual", b.diagnostics.residual},
               {"converged", b.diagnostics.converged}};
  Json out = {{"kind", to_string(b.kind)}, {"value", b.value},   {"k", b.k},
              {"heuristic", b.heuristic},  {"argmax", argmax},   {"diagnostics", diag}};
  if (!b.assignments.empty()) {
    Json a = Json::array();
    for (const auto& v : b.assignments) a.push_back({{"assignment", v.label}, {"value", v.value}});
    out["assignments"] = a;
  }
  return out;
}

BoundResult bound_from_json(const Json& j) {
  return guarded("bound JSON", [&] {
    BoundResult b;
    b.kind = parse_bound_kind(j.at("kind").get<std::string>());
    b.value = j.at("value").get<double>();
    b.k = j.at("k").get<double>();
    b.heuristic = j.value("heuristic", true);
    if (j.contains("argmax") && j["argmax"].contains("x")) b.argmax_x = j["argmax"]["x"].get<double>();
    return b;
  });
}

Json to_json(const EnvelopeCurve& e) {
  Json bins = Json::array();
  for (const auto& b : e.bins()) {
    bins.push_back({{"a_lo", b.a_lo}, {"a_hi", b.a_hi}, {"min_f", b.min_f}, {"count", b.count}});
  }
  return {{"bin_width", e.bin_width()}, {"bins", bins}};
}

EnvelopeCurve envelope_from_json(const Json& j) {
  return guarded("envelope JSON", [&] {
    std::vector<EnvelopeBin> bins;
    for (const auto& b : j.at("bins")) {
      bins.push_back({b.at("a_lo").get<double>(), b.at("a_hi").get<double>(), b.at("min_f").get<double>(),
                      b.at("count").get<long>()});
    }
    return EnvelopeCurve::from_bins(j.at("bin_width").get<double>(), std::move(bins));
  });
}

Json to_json(const ExperimentConfig& c) {
  Json preps = Json::array();
  for (const auto& p : c.preparations) preps.push_back({{"hwp", p.hwp_deg}, {"qwp", p.qwp_deg}});
  Json out = {{"preparations", preps},
              {"visibilities", {{"z", c.visibilities.z}, {"x", c.visibilities.x}, {"y", c.visibilities.y}}},
              {"budget", c.budget},
              {"motor_fwhm_deg", c.motor_fwhm_deg}};
  if (c.binary_axes) {
    Json axes = Json::array();
    for (const auto& a : *c.binary_axes) axes.push_back(vec_json(a));
    out["binary_axes"] = axes;
  }
  return out;
}

ExperimentConfig config_from_json(const Json& j) {
  return guarded("experiment config", [&] {
    ExperimentConfig c;
    for (const auto& p : j.at("preparations")) {
      c.preparations.push_back({p.at("hwp").get<double>(), p.at("qwp").get<double>()});
    }
    if (j.contains("visibilities")) {
      const auto& v = j["visibilities"];
      c.visibilities = {v.value("z", 1.0), v.value("x", 1.0), v.value("y", 1.0)};
    }
    c.budget = j.value("budget", c.budget);
    c.motor_fwhm_deg = j.value("motor_fwhm_deg", c.motor_fwhm_deg);
    if (j.contains("binary_axes")) {
      std::vector<Vec3> axes;
      for (const auto& a : j["binary_axes"]) axes.push_back(vec_from(a));
      c.binary_axes = axes;
    }
    c.check();
    return c;
  });
}

Json to_json(const WitnessReport& r) {
  Json bounds = {{"projective", r.projective_bound}, {"projective_heuristic", r.projective_heuristic}};
  if (r.three_outcome_bound) {
    bounds["three_outcome"] = *r.three_outcome_bound;
    bounds["three_outcome_heuristic"] = r.three_outcome_heuristic;
  }
  bounds["quantum"] = r.quantum_bound;
  Json verdicts = {{"non_projective_certified", r.non_projective_certified},
                   {"genuine_four_outcome_certified", r.genuine_four_outcome_certified}};
  Json out = {{"witness", r.witness}, {"k", r.k},           {"value", r.value},       {"stat_err", r.stat_err},
              {"syst_err", r.syst_err}, {"bounds", bounds}, {"verdicts", verdicts}};
  if (r.fidelity_estimate) {
    out["fidelity_estimate"] = *r.fidelity_estimate;
    out["fidelity_bin"] = {{"a_lo", r.fidelity_bin->a_lo},
                           {"a_hi", r.fidelity_bin->a_hi},
                           {"count", r.fidelity_bin->count}};
  } else {
    out["fidelity_estimate"] = nullptr;
  }
  if (!r.fidelity_note.empty()) out["fidelity_note"] = r.fidelity_note;
  return out;
}

void write_table_csv(std::ostream& os, const ProbabilityTable& t) {
  const Scenario& s = t.scenario();
  os << "x,y,b,p,stderr\n";
  auto row = [&](int x, Setting y) {
    for (int b = 0; b < t.outcomes(y); ++b) {
      os << x << ',' << setting_text(y) << ',' << b << ',' << format_double(t.p(x, y, b)) << ','
         << format_double(t.stderr_of(x, y, b)) << '\n';
    }
  };
  for (int x = 0; x < s.n_preparations; ++x) {
    for (int y = 0; y < s.binary_settings; ++y) row(x, Setting::binary(y));
    row(x, Setting::povm());
  }
}

ProbabilityTable read_table_csv(std::istream& is, const Scenario& scenario) {
  ProbabilityTable t(scenario);
  int line_no = 0;
  expect_header(is, {"x", "y", "b", "p", "stderr"}, line_no);
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto c = split_csv(line);
    if (c.size() != 5) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 5 fields");
    const int x = static_cast<int>(parse_int(c[0], line_no));
    const Setting y = parse_setting(c[1], line_no);
    const int b = static_cast<int>(parse_int(c[2], line_no));
    try {
      t.set_p(x, y, b, parse_double(c[3], line_no));
      if (!c[4].empty()) t.set_stderr(x, y, b, parse_double(c[4], line_no));
    } catch (const std::out_of_range&) {
      throw std::invalid_argument("line " + std::to_string(line_no) + ": index outside the scenario");
    }
  }
  t.check_normalized();
  return t;
}

void write_counts_csv(std::ostream& os, const std::vector<CountsRecord>& records) {
  os << "x,y,b,n\n";
  for (const auto& r : records) os << r.x << ',' << setting_text(r.y) << ',' << r.b << ',' << r.n << '\n';
}

std::vector<CountsRecord> read_counts_csv(std::istream& is) {
  int line_no = 0;
  expect_header(is, {"x", "y", "b", "n"}, line_no);
  std::vector<CountsRecord> out;
  std::string line;
  while (std::getline(is, line)) {
    ++line_no;
    if (skip_line(line)) continue;
    const auto c = split_csv(line);
    if (c.size() != 4) throw std::invalid_argument("line " + std::to_string(line_no) + ": expected 4 fields");
    CountsRecord r;
    r.x = static_cast<int>(parse_int(c[0], line_no));
    r.y = parse_setting(c[1], line_no);
    r.b = static_cast<int>(parse_int(c[2], line_no));
    r.n = parse_int(c[3], line_no);
    if (r.n < 0) throw std::invalid_argument("line " + std::to_string(line_no) + ": negative count");
    out.push_back(r);
  }
  return out;
}

void write_samples_csv(std::ostream& os, const std::vector<SamplePoint>& points) {
  os << "sample_id,A,F\n";
  for (const auto& p : points) {
    os << p.povm_id << ',' << format_double(p.witness_value) << ',' << format_double(p.fidelity) << '\n';
  }
}

void write_curve_csv(std::ostream& os, const std::vector<VisibilityResult>& curve) {
  os << "k,bound_kind,bound,v_crit\n";
  for (const auto& r : curve) {
    os << format_double(r.k) << ',' << to_string(r.bound_kind) << ',' << format_double(r.bound_value) << ','
       << format_double(r.v_crit) << '\n';
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << contents;
  out.flush();
  if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace povmcert
