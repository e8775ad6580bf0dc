#include "povmcert/optimize.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "parallel.hpp"

namespace povmcert {

namespace {

constexpr double kDegenerate = 1e-14;
constexpr double kBallTol = 1e-10;

const Vec3 kTieAxis(-1.0, 0.0, 0.0);

// Unit direction of the traceless part of a Hermitian matrix, i.e. the Bloch
// vector of its top eigenvector.
Vec3 top_axis(const Mat2& m, const char* who) {
  if (!is_hermitian(m)) {
    throw std::invalid_argument(std::string(who) + ": matrix is not Hermitian");
  }
  const Vec3 b = 0.5 * bloch_from_matrix(m);
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if (b.norm() <= kDegenerate * scale) return kTieAxis;
  return b.normalized();
}

PovmElement zero_element() { return PovmElement(0.0, BlochVector()); }

Povm povm_from_ball(const std::vector<int>& support_idx, const std::vector<Vec3>& pts, int outcomes) {
  Povm p;
  p.elements.assign(outcomes, zero_element());
  const EnclosingBall ball = min_enclosing_ball(pts);
  if (ball.radius <= 1e-12) {
    p.elements[support_idx.front()] = PovmElement(1.0, BlochVector());
    return p;
  }
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (ball.weights[i] <= 0.0) continue;
    Vec3 n = ball.center - pts[i];
    n /= n.norm();
    p.elements[support_idx[i]] = PovmElement(ball.weights[i], BlochVector(n));
  }
  return p;
}

Povm projective_pair(const Vec3& mi, const Vec3& mj, int i, int j, int outcomes) {
  Vec3 d = mj - mi;
  d = d.norm() < 1e-12 ? Vec3(Vec3::UnitZ()) : Vec3(d.normalized());
  Povm p;
  p.elements.assign(outcomes, zero_element());
  p.elements[i] = PovmElement(0.5, BlochVector(d));
  p.elements[j] = PovmElement(0.5, BlochVector(-d));
  return p;
}

void check_preps(const std::vector<QubitState>& preps, int outcomes) {
  if (outcomes != 3 && outcomes != 4) {
    throw std::invalid_argument("optimal_penalty_povm: outcomes must be 3 or 4");
  }
  if (static_cast<int>(preps.size()) < outcomes) {
    throw std::invalid_argument("optimal_penalty_povm: fewer preparations than outcomes");
  }
}

}  // namespace

void OptimizerConfig::check() const {
  if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
  if (max_iters < 1) throw std::invalid_argument("max_iters must be >= 1");
  if (!(tol > 0.0)) throw std::invalid_argument("tolerance must be > 0");
  if (threads < 1) throw std::invalid_argument("threads must be >= 1");
}

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::ProjectiveClosedForm:
      return "projective-closed-form";
    case BoundKind::ProjectiveNumeric:
      return "projective-numeric";
    case BoundKind::ThreeOutcomeNumeric:
      return "three-outcome-numeric";
    case BoundKind::QuantumSeesaw:
      return "quantum-seesaw";
  }
  return "?";
}

BoundKind parse_bound_kind(const std::string& s) {
  for (auto k : {BoundKind::ProjectiveClosedForm, BoundKind::ProjectiveNumeric,
                 BoundKind::ThreeOutcomeNumeric, BoundKind::QuantumSeesaw}) {
    if (to_string(k) == s) return k;
  }
  throw std::invalid_argument("unknown bound kind '" + s + "'");
}

Observable optimal_binary_observable(const Mat2& w) {
  return Observable(top_axis(w, "optimal_binary_observable"));
}

QubitState optimal_preparation(const Mat2& l) {
  return QubitState::from_bloch(top_axis(l, "optimal_preparation"));
}

EnclosingBall min_enclosing_ball(const std::vector<Vec3>& points) {
  const int n = static_cast<int>(points.size());
  if (n == 0 || n > 4) throw std::invalid_argument("min_enclosing_ball: need 1 to 4 points");

  EnclosingBall best;
  best.radius = std::numeric_limits<double>::infinity();
  for (int mask = 1; mask < (1 << n); ++mask) {
    std::vector<int> idx;
    for (int i = 0; i < n; ++i)
      if (mask & (1 << i)) idx.push_back(i);
    const int s = static_cast<int>(idx.size());
    const Vec3& q0 = points[idx[0]];

    Vec3 center = q0;
    std::vector<double> bary(s, 0.0);
    bary[0] = 1.0;
    if (s > 1) {
      Eigen::MatrixXd d(3, s - 1);
      for (int i = 1; i < s; ++i) d.col(i - 1) = points[idx[i]] - q0;
      const Eigen::MatrixXd g = d.transpose() * d;
      Eigen::VectorXd rhs(s - 1);
      for (int i = 0; i < s - 1; ++i) rhs[i] = 0.5 * g(i, i);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(g);
      lu.setThreshold(1e-10);
      if (lu.rank() < s - 1) continue;  // affinely dependent subset
      const Eigen::VectorXd mu = lu.solve(rhs);
      center = q0 + d * mu;
      bary[0] = 1.0 - mu.sum();
      for (int i = 1; i < s; ++i) bary[i] = mu[i - 1];
    }
    bool inside_hull = true;
    for (double b : bary) inside_hull = inside_hull && b >= -kBallTol;
    if (!inside_hull) continue;

    const double r = (center - q0).norm();
    if (r >= best.radius) continue;
    bool encloses = true;
    for (const auto& p : points) encloses = encloses && (p - center).norm() <= r + 1e-9;
    if (!encloses) continue;

    best.center = center;
    best.radius = r;
    best.weights.assign(n, 0.0);
    double total = 0.0;
    for (int i = 0; i < s; ++i) {
      const double b = std::max(0.0, bary[i]);
      best.weights[idx[i]] = b;
      total += b;
    }
    for (auto& b : best.weights) b /= total;
  }
  return best;
}

Povm optimal_penalty_povm(const std::vector<QubitState>& preps, int outcomes) {
  return optimal_penalty_povm(preps, outcomes, PovmConstraint::general());
}

Povm optimal_penalty_povm(const std::vector<QubitState>& preps, int outcomes,
                          const PovmConstraint& c) {
  check_preps(preps, outcomes);
  using Mode = PovmConstraint::Mode;
  switch (c.mode) {
    case Mode::Fixed:
      if (!c.fixed || static_cast<int>(c.fixed->size()) != outcomes) {
        throw std::invalid_argument("fixed povm has the wrong number of outcomes");
      }
      return *c.fixed;
    case Mode::Pair:
      if (c.first < 0 || c.second < 0 || c.first >= outcomes || c.second >= outcomes ||
          c.first == c.second) {
        throw std::invalid_argument("invalid projective outcome pair");
      }
      return projective_pair(preps[c.first].bloch.vec(), preps[c.second].bloch.vec(), c.first,
                             c.second, outcomes);
    case Mode::Zero:
    case Mode::General: {
      if (c.mode == Mode::Zero && (c.first < 0 || c.first >= outcomes)) {
        throw std::invalid_argument("invalid zero outcome");
      }
      std::vector<int> idx;
      std::vector<Vec3> pts;
      for (int x = 0; x < outcomes; ++x) {
        if (c.mode == Mode::Zero && x == c.first) continue;
        idx.push_back(x);
        pts.push_back(preps[x].bloch.vec());
      }
      return povm_from_ball(idx, pts, outcomes);
    }
  }
  throw std::logic_error("unreachable");
}

double penalty_sum(const std::vector<QubitState>& preps, const Povm& povm) {
  double s = 0.0;
  for (std::size_t x = 0; x < povm.size() && x < preps.size(); ++x) {
    s += povm[x].weight * (1.0 + preps[x].bloch.vec().dot(povm[x].bloch.vec()));
  }
  return s;
}

Strategy random_strategy(const Scenario& s, RngStream& rng) {
  Strategy st;
  for (int x = 0; x < s.n_preparations; ++x) st.preparations.push_back(QubitState{random_unit_vector(rng)});
  for (int y = 0; y < s.binary_settings; ++y) st.binaries.emplace_back(random_unit_vector(rng).vec());
  st.povm = optimal_penalty_povm(st.preparations, s.povm_outcomes);
  return st;
}

SeesawRun seesaw_run(const WitnessSpec& w, Strategy s, const PovmConstraint& c, int max_iters,
                     double tol, std::vector<double>* trace) {
  const Scenario& sc = w.scenario();
  const int X = sc.n_preparations;
  const int Y = sc.binary_settings;
  const int O = sc.povm_outcomes;
  if (c.mode == PovmConstraint::Mode::Fixed) s.povm = optimal_penalty_povm(s.preparations, O, c);

  SeesawRun run;
  double prev = strategy_value(w, s);
  for (int it = 1; it <= max_iters; ++it) {
    std::vector<Mat2> rho(X);
    for (int x = 0; x < X; ++x) rho[x] = s.preparations[x].density();

    for (int y = 0; y < Y; ++y) {
      Mat2 wy = Mat2::Zero();
      for (int x = 0; x < X; ++x) wy += (w.coeff(x, y, 0) - w.coeff(x, y, 1)) * rho[x];
      s.binaries[y] = optimal_binary_observable(wy);
    }

    s.povm = optimal_penalty_povm(s.preparations, O, c);

    for (int x = 0; x < X; ++x) {
      Mat2 lx = Mat2::Zero();
      for (int y = 0; y < Y; ++y) {
        lx += w.coeff(x, y, 0) * s.binaries[y].projector(0) + w.coeff(x, y, 1) * s.binaries[y].projector(1);
      }
      if (x < O) lx -= w.k() * povm_element_matrix(s.povm[x]);
      s.preparations[x] = optimal_preparation(lx);
    }

    const double v = strategy_value(w, s);
    if (trace) trace->push_back(v);
    run.iterations = it;
    run.residual = std::abs(v - prev);
    prev = v;
    if (run.residual < tol) {
      run.converged = true;
      break;
    }
  }
  run.value = prev;
  run.strategy = std::move(s);
  return run;
}

namespace {

BoundResult best_of_restarts(const WitnessSpec& w, const OptimizerConfig& cfg,
                             const PovmConstraint& c) {
  cfg.check();
  std::vector<SeesawRun> runs(cfg.restarts);
  detail::parallel_for(cfg.restarts, cfg.threads, [&](int r) {
    RngStream rng(cfg.seed, static_cast<std::uint64_t>(r));
    Strategy init = random_strategy(w.scenario(), rng);
    runs[r] = seesaw_run(w, std::move(init), c, cfg.max_iters, cfg.tol);
  });

  BoundResult out;
  out.kind = BoundKind::QuantumSeesaw;
  out.k = w.k();
  out.heuristic = true;
  int best = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    if (runs[r].value > runs[best].value) best = r;
    if (runs[r].converged) ++out.diagnostics.converged_restarts;
  }
  out.value = runs[best].value;
  out.argmax = runs[best].strategy;
  out.diagnostics.restarts = cfg.restarts;
  out.diagnostics.iterations = runs[best].iterations;
  out.diagnostics.residual = runs[best].residual;
  out.diagnostics.converged = runs[best].converged;
  return out;
}

// Max over a list of restricted assignments, keeping the per-assignment values.
BoundResult best_of_assignments(const WitnessSpec& w, const OptimizerConfig& cfg, BoundKind kind,
                                const std::vector<std::pair<std::string, PovmConstraint>>& cases) {
  BoundResult out;
  bool first = true;
  int restarts = 0;
  int converged = 0;
  for (const auto& [label, c] : cases) {
    BoundResult r = best_of_restarts(w, cfg, c);
    restarts += r.diagnostics.restarts;
    converged += r.diagnostics.converged_restarts;
    out.assignments.push_back({label, r.value});
    if (first || r.value > out.value) {
      auto assignments = std::move(out.assignments);
      out = std::move(r);
      out.assignments = std::move(assignments);
      first = false;
    }
  }
  out.kind = kind;
  out.diagnostics.restarts = restarts;
  out.diagnostics.converged_restarts = converged;
  return out;
}

void check_k(double k) {
  if (!std::isfinite(k) || k < 0.0) throw std::invalid_argument("penalty weight k must be >= 0");
}

BoundResult closed_form(double k, const std::function<double(double)>& f) {
  check_k(k);
  BoundResult out;
  out.kind = BoundKind::ProjectiveClosedForm;
  out.k = k;
  out.heuristic = false;
  const double x = maximize_1d(f, -1.0, 1.0);
  out.argmax_x = x;
  out.value = f(x);
  out.diagnostics.converged = true;
  return out;
}

}  // namespace

BoundResult seesaw_maximize(const WitnessSpec& w, const OptimizerConfig& cfg, const PovmConstraint& c) {
  return best_of_restarts(w, cfg, c);
}

BoundResult maximize_given_povm(const WitnessSpec& w, const Povm& povm, const OptimizerConfig& cfg) {
  if (static_cast<int>(povm.size()) != w.scenario().povm_outcomes) {
    throw std::invalid_argument("maximize_given_povm: povm outcome count does not match the witness");
  }
  return best_of_restarts(w, cfg, PovmConstraint::fixed_povm(povm));
}

double sic_projective_objective(double k, double x) {
  const double rk = 3.0 + 144.0 * k * k;
  const double s2 = std::sqrt(2.0);
  return (1.0 - 2.0 * k) / 2.0 + s2 / 24.0 * std::sqrt(std::max(0.0, 6.0 - 4.0 * x)) +
         s2 / 24.0 *
             std::sqrt(std::max(0.0, 2.0 * rk + 4.0 * x + 48.0 * k * s2 * std::sqrt(std::max(0.0, 1.0 + x))));
}

double symtrine_projective_objective(double k, double x) {
  const double rk = 3.0 + 81.0 * k * k;
  const double s2 = std::sqrt(2.0);
  return (1.0 - 2.0 * k) / 2.0 +
         s2 / 18.0 *
             std::sqrt(std::max(0.0, 2.0 * rk - 4.0 * x + 36.0 * k * s2 * std::sqrt(std::max(0.0, 1.0 - x)))) +
         1.0 / 18.0 * std::sqrt(std::max(0.0, 3.0 + 2.0 * x + 2.0 * s2 * std::sqrt(std::max(0.0, 1.0 + x))));
}

BoundResult projective_bound_sic(double k) {
  return closed_form(k, [k](double x) { return sic_projective_objective(k, x); });
}

BoundResult projective_bound_symtrine(double k) {
  return closed_form(k, [k](double x) { return symtrine_projective_objective(k, x); });
}

BoundResult projective_bound_numeric(const WitnessSpec& w, const OptimizerConfig& cfg) {
  const int O = w.scenario().povm_outcomes;
  std::vector<std::pair<std::string, PovmConstraint>> cases;
  for (int i = 0; i < O; ++i)
    for (int j = i + 1; j < O; ++j) {
      std::ostringstream label;
      label << "pair(" << i << "," << j << ")";
      cases.emplace_back(label.str(), PovmConstraint::pair(i, j));
    }
  return best_of_assignments(w, cfg, BoundKind::ProjectiveNumeric, cases);
}

BoundResult three_outcome_max(const WitnessSpec& w, const OptimizerConfig& cfg) {
  const int O = w.scenario().povm_outcomes;
  if (O != 4) {
    throw std::invalid_argument("three_outcome_max applies only to four-outcome povm settings");
  }
  std::vector<std::pair<std::string, PovmConstraint>> cases;
  for (int z = 0; z < O; ++z) cases.emplace_back("zero(" + std::to_string(z) + ")", PovmConstraint::zero(z));
  return best_of_assignments(w, cfg, BoundKind::ThreeOutcomeNumeric, cases);
}

double maximize_1d(const std::function<double(double)>& f, double lo, double hi, int subintervals,
                   double tol) {
  if (!(hi > lo) || subintervals < 2) throw std::invalid_argument("maximize_1d: bad interval");
  const int n = subintervals;
  std::vector<double> xs(n + 1), fs(n + 1);
  for (int i = 0; i <= n; ++i) {
    xs[i] = lo + (hi - lo) * i / n;
    fs[i] = f(xs[i]);
  }
  double best_x = xs[0];
  double best_f = fs[0];
  for (int i = 0; i <= n; ++i) {
    if (fs[i] > best_f) {
      best_f = fs[i];
      best_x = xs[i];
    }
  }
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int i = 0; i <= n; ++i) {
    const bool left_ok = i == 0 || fs[i] >= fs[i - 1];
    const bool right_ok = i == n || fs[i] >= fs[i + 1];
    if (!(left_ok && right_ok)) continue;
    double a = xs[std::max(0, i - 1)];
    double b = xs[std::min(n, i + 1)];
    double c = b - invphi * (b - a);
    double d = a + invphi * (b - a);
    double fc = f(c);
    double fd = f(d);
    while (b - a > tol) {
      if (fc >= fd) {
        b = d;
        d = c;
        fd = fc;
        c = b - invphi * (b - a);
        fc = f(c);
      } else {
        a = c;
        c = d;
        fc = fd;
        d = a + invphi * (b - a);
        fd = f(d);
      }
    }
    const double x = 0.5 * (a + b);
    const double fx = f(x);
    if (fx > best_f) {
      best_f = fx;
      best_x = x;
    }
  }
  return best_x;
}

}  // namespace povmcert
