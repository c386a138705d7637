#pragma once

// Multistart derivative-free search on S(F^{n+1}) for parameters whose
// (G, phi)-averages vanish.
//
// Atom-cloud residuals are piecewise constant in u, which starves a simplex
// search of descent signal.  Instead of stochastic perturbation averaging the
// solver anneals a deterministic soft assignment: each atom spreads over the
// regions with softmin weights exp(-|v - g|^2 / (2 sigma^2)), and sigma is
// driven to zero over a fixed schedule, ending with the exact objective.
// Everything is a pure function of (instance, config), so results are
// identical regardless of thread count.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "equipart/algebra.hpp"
#include "equipart/averages.hpp"
#include "equipart/groups.hpp"
#include "equipart/measures.hpp"
#include "equipart/partition.hpp"
#include "equipart/rng.hpp"

namespace equipart {

struct SolveConfig {
  int restarts = 64;
  int max_iters = 2000;   // objective evaluations per restart
  double step = 0.5;      // initial simplex scale on the tangent chart
  double tol = 1e-8;      // rho_target on the aggregate residual
  std::uint64_t seed = 7;
  double margin_floor = 1e-6;  // epsilon_X below which params count as excluded
  double smoothing = 0.0;      // initial soft-assignment width; 0 = auto
  int threads = 0;             // 0 = hardware concurrency (result-invariant)
};

inline void validate_config(const SolveConfig& c) {
  if (c.restarts < 1) throw std::invalid_argument("config: restarts must be positive");
  if (c.max_iters < 1) throw std::invalid_argument("config: max_iters must be positive");
  if (!(c.step > 0)) throw std::invalid_argument("config: step must be positive");
  if (!(c.tol >= 1e-12)) throw std::invalid_argument("config: tol must be >= 1e-12");
  if (!(c.margin_floor > 0)) throw std::invalid_argument("config: margin floor must be positive");
  if (c.smoothing < 0) throw std::invalid_argument("config: smoothing must be >= 0");
  if (c.threads < 0) throw std::invalid_argument("config: threads must be >= 0");
}

struct SolveResult {
  PartitionParams params;
  AverageReport report;
  bool converged = false;
  int iterations = 0;     // objective evaluations spent by the winning restart
  int restart_index = -1;
  double margin = 0.0;
  double wall_time_sec = 0.0;
};

namespace detail {

/// The objective shared by solve, solve_coset, and the oracle: region values
/// per measure combined linearly into one average per condition.
class Residualizer {
 public:
  // Plain mode: one automorphism per measure, conditions = measures.
  Residualizer(const FiniteSubgroup& G, const std::vector<MassDistribution>& dists,
               const std::vector<Automorphism>& phis)
      : G_(&G), dists_(&dists) {
    if (dists.empty()) throw std::invalid_argument("residual: no measures given");
    if (dists.size() != phis.size())
      throw std::invalid_argument("residual: need one automorphism per measure");
    for (const auto& phi : phis) require_matching_group(G, phi, "residual");
    check_dists();
    // coefficients[c][g] multiplies values[g] of the condition's measure.
    for (std::size_t i = 0; i < dists.size(); ++i) {
      std::vector<FScalar> coeff;
      coeff.reserve(static_cast<std::size_t>(G.order()));
      for (int g = 0; g < G.order(); ++g)
        coeff.push_back(G.element(G.inv(phis[i](g))));
      coeffs_.push_back(std::move(coeff));
      measure_of_condition_.push_back(i);
    }
  }

  // Coset mode: conditions = measures x cosets.
  Residualizer(const FiniteSubgroup& G, const std::vector<MassDistribution>& dists,
               const CosetDecomposition& dec, const std::vector<Automorphism>& phis)
      : G_(&G), dists_(&dists) {
    if (dists.empty()) throw std::invalid_argument("residual: no measures given");
    if (static_cast<int>(phis.size()) != dec.count())
      throw std::invalid_argument("residual: need one automorphism per coset");
    const FiniteSubgroup H = subgroup_as_group(G, dec);
    for (const auto& phi : phis) require_matching_group(H, phi, "residual");
    check_dists();
    for (std::size_t i = 0; i < dists.size(); ++i) {
      for (int l = 0; l < dec.count(); ++l) {
        std::vector<FScalar> coeff(static_cast<std::size_t>(G.order()),
                                   FScalar::zero(G.algebra));
        for (int t = 0; t < dec.subgroup_order(); ++t) {
          const int member =
              dec.members[static_cast<std::size_t>(l)][static_cast<std::size_t>(t)];
          coeff[static_cast<std::size_t>(member)] =
              H.element(H.inv(phis[static_cast<std::size_t>(l)](t)));
        }
        coeffs_.push_back(std::move(coeff));
        measure_of_condition_.push_back(i);
      }
    }
  }

  const FiniteSubgroup& group() const { return *G_; }
  int ambient_dim() const { return (*dists_)[0].ambient_dim(); }
  int real_dim() const { return dim(G_->algebra) * (ambient_dim() + 1); }

  /// Exact averages (hard assignment, boundary mass to smallest tied index).
  AverageReport evaluate(const PartitionParams& params) const {
    std::vector<std::vector<FScalar>> values;
    values.reserve(dists_->size());
    for (const auto& d : *dists_) values.push_back(measure_regions(d, params, *G_).values);
    return combine(values);
  }

  /// Soft-assignment averages; sigma = 0 falls back to the exact evaluation.
  AverageReport evaluate_soft(const PartitionParams& params, double sigma) const {
    if (sigma <= 0) return evaluate(params);
    std::vector<std::vector<FScalar>> values;
    values.reserve(dists_->size());
    for (const auto& d : *dists_) values.push_back(soft_region_values(d, params, sigma));
    return combine(values);
  }

 private:
  void check_dists() {
    const Algebra a = G_->algebra;
    const int n = (*dists_)[0].ambient_dim();
    for (const auto& d : *dists_)
      if (d.algebra() != a || d.ambient_dim() != n)
        throw std::invalid_argument("residual: measures must share the group's algebra "
                                    "and one ambient dimension");
  }

  std::vector<FScalar> soft_region_values(const MassDistribution& dist,
                                          const PartitionParams& params,
                                          double sigma) const {
    const int m = G_->order();
    std::vector<FScalar> vals(static_cast<std::size_t>(m), FScalar::zero(G_->algebra));
    std::vector<double> d2(static_cast<std::size_t>(m));
    const double inv2s2 = 1.0 / (2.0 * sigma * sigma);
    for (const auto& atom : dist.atoms()) {
      const FScalar v = fiber_value(atom.x, params);
      double dmin = std::numeric_limits<double>::infinity();
      for (int g = 0; g < m; ++g) {
        d2[static_cast<std::size_t>(g)] = distance_sq(v, G_->element(g));
        dmin = std::min(dmin, d2[static_cast<std::size_t>(g)]);
      }
      double z = 0;
      for (int g = 0; g < m; ++g) {
        d2[static_cast<std::size_t>(g)] =
            std::exp(-(d2[static_cast<std::size_t>(g)] - dmin) * inv2s2);
        z += d2[static_cast<std::size_t>(g)];
      }
      for (int g = 0; g < m; ++g) {
        const double p = d2[static_cast<std::size_t>(g)] / z;
        if (p > 1e-300) vals[static_cast<std::size_t>(g)] += p * atom.w;
      }
    }
    return vals;
  }

  AverageReport combine(const std::vector<std::vector<FScalar>>& values) const {
    std::vector<FScalar> avgs;
    avgs.reserve(coeffs_.size());
    for (std::size_t c = 0; c < coeffs_.size(); ++c) {
      const auto& vals = values[measure_of_condition_[c]];
      FScalar acc = FScalar::zero(G_->algebra);
      for (int g = 0; g < G_->order(); ++g) {
        const FScalar& k = coeffs_[c][static_cast<std::size_t>(g)];
        if (norm_sq(k) > 0) acc += k * vals[static_cast<std::size_t>(g)];
      }
      avgs.push_back(acc);
    }
    return AverageReport::from_averages(std::move(avgs));
  }

  const FiniteSubgroup* G_;
  const std::vector<MassDistribution>* dists_;
  std::vector<std::vector<FScalar>> coeffs_;
  std::vector<std::size_t> measure_of_condition_;
};

/// Orthonormal basis of the hyperplane normal to unit vector c, via the
/// Householder reflector exchanging c with +-e_1.
inline std::vector<std::vector<double>> tangent_basis(const std::vector<double>& c) {
  const std::size_t D = c.size();
  std::vector<double> w = c;
  const double s = (c[0] >= 0) ? 1.0 : -1.0;
  w[0] += s;
  double ww = 0;
  for (double x : w) ww += x * x;
  std::vector<std::vector<double>> basis;
  basis.reserve(D - 1);
  for (std::size_t j = 1; j < D; ++j) {
    std::vector<double> b(D, 0.0);
    b[j] = 1.0;
    const double f = 2.0 * w[j] / ww;
    for (std::size_t k = 0; k < D; ++k) b[k] -= f * w[k];
    basis.push_back(std::move(b));
  }
  return basis;
}

inline std::vector<double> chart_point(const std::vector<double>& c,
                                       const std::vector<std::vector<double>>& basis,
                                       const std::vector<double>& t) {
  std::vector<double> p = c;
  for (std::size_t j = 0; j < t.size(); ++j)
    for (std::size_t k = 0; k < p.size(); ++k) p[k] += t[j] * basis[j][k];
  double n = 0;
  for (double x : p) n += x * x;
  n = std::sqrt(n);
  for (double& x : p) x /= n;
  return p;
}

struct SimplexOutcome {
  std::vector<double> best_t;
  double best_f = std::numeric_limits<double>::infinity();
  int evals = 0;
};

/// Nelder-Mead with standard coefficients; deterministic ordering via stable
/// sort.  Stops on eval budget, on reaching f_target, or on simplex collapse.
template <typename F>
SimplexOutcome nelder_mead(F&& f, int dim, double step, int max_evals, double f_target) {
  struct Vertex {
    std::vector<double> t;
    double f;
  };
  SimplexOutcome out;
  std::vector<Vertex> simplex;
  simplex.reserve(static_cast<std::size_t>(dim) + 1);
  {
    Vertex v0{std::vector<double>(static_cast<std::size_t>(dim), 0.0), 0.0};
    v0.f = f(v0.t);
    ++out.evals;
    simplex.push_back(std::move(v0));
  }
  for (int j = 0; j < dim && out.evals < max_evals; ++j) {
    Vertex v{std::vector<double>(static_cast<std::size_t>(dim), 0.0), 0.0};
    v.t[static_cast<std::size_t>(j)] = step;
    v.f = f(v.t);
    ++out.evals;
    simplex.push_back(std::move(v));
  }
  auto record_best = [&] {
    for (const auto& v : simplex)
      if (v.f < out.best_f) {
        out.best_f = v.f;
        out.best_t = v.t;
      }
  };
  record_best();
  if (static_cast<int>(simplex.size()) < dim + 1) return out;

  const double alpha = 1.0, gamma = 2.0, rho = 0.5, shrink = 0.5;
  while (out.evals < max_evals && out.best_f > f_target) {
    std::stable_sort(simplex.begin(), simplex.end(),
                     [](const Vertex& a, const Vertex& b) { return a.f < b.f; });
    const Vertex& best = simplex.front();
    const Vertex& worst = simplex.back();
    // Collapse tests: value spread and geometric extent.
    double extent = 0;
    for (const auto& v : simplex)
      for (int k = 0; k < dim; ++k)
        extent = std::max(extent, std::abs(v.t[static_cast<std::size_t>(k)] -
                                           best.t[static_cast<std::size_t>(k)]));
    if (worst.f - best.f <= 1e-15 * (1.0 + std::abs(best.f)) && extent <= 1e-12) break;

    std::vector<double> centroid(static_cast<std::size_t>(dim), 0.0);
    for (std::size_t i = 0; i + 1 < simplex.size(); ++i)
      for (int k = 0; k < dim; ++k)
        centroid[static_cast<std::size_t>(k)] += simplex[i].t[static_cast<std::size_t>(k)];
    for (double& c : centroid) c /= dim;

    auto blend = [&](double coef) {
      std::vector<double> t(static_cast<std::size_t>(dim));
      for (int k = 0; k < dim; ++k)
        t[static_cast<std::size_t>(k)] =
            centroid[static_cast<std::size_t>(k)] +
            coef * (centroid[static_cast<std::size_t>(k)] -
                    worst.t[static_cast<std::size_t>(k)]);
      return t;
    };

    std::vector<double> tr = blend(alpha);
    const double fr = f(tr);
    ++out.evals;
    if (fr < best.f) {
      if (out.evals < max_evals) {
        std::vector<double> te = blend(gamma);
        const double fe = f(te);
        ++out.evals;
        simplex.back() = (fe < fr) ? Vertex{std::move(te), fe} : Vertex{std::move(tr), fr};
      } else {
        simplex.back() = Vertex{std::move(tr), fr};
      }
    } else if (fr < simplex[simplex.size() - 2].f) {
      simplex.back() = Vertex{std::move(tr), fr};
    } else if (out.evals < max_evals) {
      std::vector<double> tc = blend(fr < worst.f ? rho : -rho);
      const double fc = f(tc);
      ++out.evals;
      if (fc < std::min(fr, worst.f)) {
        simplex.back() = Vertex{std::move(tc), fc};
      } else {
        // Shrink toward the best vertex.
        for (std::size_t i = 1; i < simplex.size() && out.evals < max_evals; ++i) {
          for (int k = 0; k < dim; ++k)
            simplex[i].t[static_cast<std::size_t>(k)] =
                best.t[static_cast<std::size_t>(k)] +
                shrink * (simplex[i].t[static_cast<std::size_t>(k)] -
                          best.t[static_cast<std::size_t>(k)]);
          simplex[i].f = f(simplex[i].t);
          ++out.evals;
        }
      }
    }
    record_best();
  }
  return out;
}

inline std::vector<double> random_unit_vector(std::uint64_t seed, std::uint64_t stream,
                                              int D) {
  std::vector<double> v(static_cast<std::size_t>(D));
  for (int t = 0; 2 * t < D; ++t) {
    const auto [g1, g2] = rng::gaussian_pair(seed, stream, static_cast<std::uint64_t>(t));
    v[static_cast<std::size_t>(2 * t)] = g1;
    if (2 * t + 1 < D) v[static_cast<std::size_t>(2 * t + 1)] = g2;
  }
  double n = 0;
  for (double x : v) n += x * x;
  n = std::sqrt(n);
  for (double& x : v) x /= n;
  return v;
}

inline double min_site_gap(const FiniteSubgroup& G) {
  double gap = 2.0;
  for (int p = 0; p < G.order(); ++p)
    for (int q = p + 1; q < G.order(); ++q)
      gap = std::min(gap, norm(G.element(p) - G.element(q)));
  return gap;
}

struct RestartOutcome {
  PartitionParams params;
  AverageReport report;
  double margin = 0;
  bool converged = false;
  int evals = 0;
};

inline RestartOutcome run_restart(const Residualizer& prob, const SolveConfig& cfg,
                                  int restart_index) {
  const int D = prob.real_dim();
  const Algebra a = prob.group().algebra;
  const double sigma0 =
      cfg.smoothing > 0 ? cfg.smoothing : 0.25 * min_site_gap(prob.group());
  const std::vector<double> sigmas = {sigma0, sigma0 / 4, sigma0 / 16, sigma0 / 64, 0.0};
  const double penalty_scale = 1.0;  // residuals are normalized by the caller's masses
  const double margin_soft = 10.0 * cfg.margin_floor;

  auto objective = [&](const PartitionParams& params, double sigma) {
    double f = prob.evaluate_soft(params, sigma).aggregate;
    const double mg = excluded_set_margin(params, prob.group());
    if (mg < margin_soft) f += penalty_scale * (1.0 - mg / margin_soft);
    return f;
  };

  RestartOutcome out;
  std::vector<double> center =
      random_unit_vector(cfg.seed, static_cast<std::uint64_t>(restart_index), D);
  int budget = cfg.max_iters;
  const int per_stage = std::max(16, cfg.max_iters / static_cast<int>(sigmas.size()));
  for (std::size_t s = 0; s < sigmas.size() && budget > 0; ++s) {
    const double sigma = sigmas[s];
    const auto basis = tangent_basis(center);
    auto f = [&](const std::vector<double>& t) {
      const auto p = chart_point(center, basis, t);
      return objective(make_params(FVector::from_reals(a, p)), sigma);
    };
    const bool last = (s + 1 == sigmas.size());
    const int stage_budget = last ? budget : std::min(budget, per_stage);
    // Target 0, not tol: atom-cloud residuals have exact-zero plateaus, and
    // polishing into one keeps the result at least as good as any grid oracle.
    SimplexOutcome so = nelder_mead(f, D - 1, cfg.step, stage_budget, 0.0);
    out.evals += so.evals;
    budget -= so.evals;
    if (!so.best_t.empty()) center = chart_point(center, basis, so.best_t);
  }

  out.params = make_params(FVector::from_reals(a, center));
  out.report = prob.evaluate(out.params);
  out.margin = excluded_set_margin(out.params, prob.group());
  out.converged = out.report.aggregate <= cfg.tol && out.margin > cfg.margin_floor;
  return out;
}

/// Runs restarts in index-ordered batches sized by the thread count and picks
/// the first converged restart (smallest index), else the smallest residual
/// with index tie-break.  The winner is invariant under the batch size, so
/// thread counts never change the result.
inline SolveResult run_multistart(const Residualizer& prob, const SolveConfig& cfg) {
  validate_config(cfg);
  if (dim(prob.group().algebra) * (prob.ambient_dim() + 1) != prob.real_dim())
    throw std::logic_error("run_multistart: dimension bookkeeping broke");
  const auto t0 = std::chrono::steady_clock::now();
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;

  std::vector<RestartOutcome> outcomes;
  outcomes.reserve(static_cast<std::size_t>(cfg.restarts));
  bool stop = false;
  for (int base = 0; base < cfg.restarts && !stop; base += threads) {
    const int batch = std::min(threads, cfg.restarts - base);
    std::vector<RestartOutcome> results(static_cast<std::size_t>(batch));
    if (batch == 1) {
      results[0] = run_restart(prob, cfg, base);
    } else {
      std::vector<std::thread> pool;
      pool.reserve(static_cast<std::size_t>(batch));
      for (int j = 0; j < batch; ++j)
        pool.emplace_back([&, j] { results[static_cast<std::size_t>(j)] =
                                       run_restart(prob, cfg, base + j); });
      for (auto& th : pool) th.join();
    }
    for (auto& r : results) {
      if (r.converged) stop = true;
      outcomes.push_back(std::move(r));
    }
  }

  int winner = -1;
  for (std::size_t i = 0; i < outcomes.size(); ++i)
    if (outcomes[i].converged) {
      winner = static_cast<int>(i);
      break;
    }
  if (winner < 0) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < outcomes.size(); ++i)
      if (outcomes[i].report.aggregate < best) {
        best = outcomes[i].report.aggregate;
        winner = static_cast<int>(i);
      }
  }

  const RestartOutcome& w = outcomes[static_cast<std::size_t>(winner)];
  SolveResult res;
  res.params = w.params;
  res.report = w.report;
  res.converged = w.converged;
  res.iterations = w.evals;
  res.restart_index = winner;
  res.margin = w.margin;
  res.wall_time_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return res;
}

}  // namespace detail

/// Exact (G, phi_i)-averages of every measure at u, with residual norms.
inline AverageReport residual(const FiniteSubgroup& G, const PartitionParams& params,
                              const std::vector<MassDistribution>& dists,
                              const std::vector<Automorphism>& phis) {
  return detail::Residualizer(G, dists, phis).evaluate(params);
}

/// Coset form: one average per (measure, coset) pair, flattened measure-major.
inline AverageReport coset_residual(const FiniteSubgroup& G, const PartitionParams& params,
                                    const std::vector<MassDistribution>& dists,
                                    const CosetDecomposition& dec,
                                    const std::vector<Automorphism>& phis) {
  return detail::Residualizer(G, dists, dec, phis).evaluate(params);
}

/// Searches for u with vanishing (G, phi_i)-averages.  Returns the best point
/// found; converged=false flags a search failure (the zero exists regardless,
/// but the search is heuristic).
inline SolveResult solve(const FiniteSubgroup& G,
                         const std::vector<MassDistribution>& dists,
                         const std::vector<Automorphism>& phis, const SolveConfig& cfg) {
  return detail::run_multistart(detail::Residualizer(G, dists, phis), cfg);
}

/// Same search with per-coset average conditions (k conditions per measure).
inline SolveResult solve_coset(const FiniteSubgroup& G,
                               const std::vector<MassDistribution>& dists,
                               const CosetDecomposition& dec,
                               const std::vector<Automorphism>& phis,
                               const SolveConfig& cfg) {
  return detail::run_multistart(detail::Residualizer(G, dists, dec, phis), cfg);
}

struct OracleResult {
  PartitionParams best_params;
  AverageReport best_report;
  long long grid_points = 0;
  long long sign_changes = 0;  // consecutive grid points whose sign pattern flips
  long long sign_patterns = 0; // distinct sign patterns seen
};

namespace detail {

template <typename Fn>
void for_each_sphere_grid_point(int D, long long resolution, Fn&& fn) {
  std::vector<double> p(static_cast<std::size_t>(D));
  if (D == 2) {
    for (long long i = 0; i < resolution; ++i) {
      const double th = 2.0 * std::numbers::pi * static_cast<double>(i) /
                        static_cast<double>(resolution);
      p[0] = std::cos(th);
      p[1] = std::sin(th);
      fn(p);
    }
  } else if (D == 3) {
    // Fibonacci spiral.
    const double ga = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (long long i = 0; i < resolution; ++i) {
      const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                                 static_cast<double>(resolution);
      const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
      const double th = ga * static_cast<double>(i);
      p[0] = r * std::cos(th);
      p[1] = r * std::sin(th);
      p[2] = z;
      fn(p);
    }
  } else if (D == 4) {
    // Hopf-coordinate rings: eta stratifies the two circle factors.
    const int n_eta = std::max(
        1, static_cast<int>(std::llround(std::cbrt(static_cast<double>(resolution) / 16.0))));
    const double per_ring =
        std::max(1.0, static_cast<double>(resolution) / static_cast<double>(n_eta));
    for (int i = 0; i < n_eta; ++i) {
      const double eta = std::asin(std::sqrt((i + 0.5) / n_eta));
      const double ce = std::cos(eta), se = std::sin(eta);
      const int n1 = std::max(1, static_cast<int>(std::llround(std::sqrt(per_ring * ce / se))));
      const int n2 = std::max(1, static_cast<int>(std::llround(std::sqrt(per_ring * se / ce))));
      for (int a = 0; a < n1; ++a) {
        const double x1 = 2.0 * std::numbers::pi * a / n1;
        for (int b = 0; b < n2; ++b) {
          const double x2 = 2.0 * std::numbers::pi * b / n2;
          p[0] = ce * std::cos(x1);
          p[1] = ce * std::sin(x1);
          p[2] = se * std::cos(x2);
          p[3] = se * std::sin(x2);
          fn(p);
        }
      }
    }
  } else {
    throw std::invalid_argument("oracle_grid: sphere dimension " + std::to_string(D - 1) +
                                " exceeds the desk-scale limit of 3");
  }
}

inline std::string sign_pattern(const AverageReport& rep, double zero_tol) {
  std::string s;
  for (const auto& a : rep.averages)
    for (int k = 0; k < a.dimension(); ++k)
      s.push_back(a[k] > zero_tol ? '+' : (a[k] < -zero_tol ? '-' : '0'));
  return s;
}

inline OracleResult run_oracle(const Residualizer& prob, long long resolution) {
  if (resolution < 1) throw std::invalid_argument("oracle_grid: resolution must be positive");
  const int D = prob.real_dim();
  const Algebra a = prob.group().algebra;
  OracleResult out;
  double best = std::numeric_limits<double>::infinity();
  std::string prev_pattern;
  std::vector<std::string> patterns;
  for_each_sphere_grid_point(D, resolution, [&](const std::vector<double>& p) {
    const PartitionParams params = make_params(FVector::from_reals(a, p));
    const AverageReport rep = prob.evaluate(params);
    ++out.grid_points;
    if (rep.aggregate < best) {
      best = rep.aggregate;
      out.best_params = params;
      out.best_report = rep;
    }
    const std::string pat = sign_pattern(rep, 1e-12);
    if (!prev_pattern.empty() && pat != prev_pattern) ++out.sign_changes;
    prev_pattern = pat;
    if (std::find(patterns.begin(), patterns.end(), pat) == patterns.end())
      patterns.push_back(pat);
  });
  out.sign_patterns = static_cast<long long>(patterns.size());
  return out;
}

}  // namespace detail

/// Exhaustive residual scan over a near-uniform sphere grid; the independent
/// desk-scale certifier for solve.  Limited to sphere dimension <= 3.
inline OracleResult oracle_grid(const FiniteSubgroup& G,
                                const std::vector<MassDistribution>& dists,
                                const std::vector<Automorphism>& phis,
                                long long resolution) {
  return detail::run_oracle(detail::Residualizer(G, dists, phis), resolution);
}

/// Coset variant of the oracle (same grid, coset-average residual).
inline OracleResult oracle_grid_coset(const FiniteSubgroup& G,
                                      const std::vector<MassDistribution>& dists,
                                      const CosetDecomposition& dec,
                                      const std::vector<Automorphism>& phis,
                                      long long resolution) {
  return detail::run_oracle(detail::Residualizer(G, dists, dec, phis), resolution);
}

}  // namespace equipart
