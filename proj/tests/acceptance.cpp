// Acceptance gate: one line per criterion, PASS or FAIL with the measured
// quantities. Exits nonzero if any criterion fails.
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <string>
#include <vector>

#include "msp/msp.hpp"

using namespace msp;

namespace {

int failures = 0;

void report(int id, bool pass, const std::string& detail) {
  std::printf("criterion %2d: %s  %s\n", id, pass ? "PASS" : "FAIL",
              detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

std::string fmt(const char* f, ...) {
  va_list args;
  va_start(args, f);
  char buf[512];
  std::vsnprintf(buf, sizeof(buf), f, args);
  va_end(args);
  return buf;
}

RandomRecipe suite_recipe(int k, std::uint64_t salt) {
  RandomRecipe recipe;
  recipe.k = k;
  recipe.seed = Rng::derive_seed(9001, static_cast<std::uint64_t>(k), salt);
  return recipe;
}

// criteria 1 and 2 share the random suite: 20 systems at each k
const std::vector<int> kSuiteKs{1, 2, 3, 5, 10};
constexpr int kSuiteTrials = 20;

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  double worst = 0.0;
  for (int k : kSuiteKs) {
    const RandomRecipe recipe = suite_recipe(k, 0xC1);
    for (int t = 0; t < kSuiteTrials && ok; ++t) {
      const auto sys = random_system(recipe, static_cast<std::uint64_t>(t));
      const auto chain = schur_chain(sys);
      const auto spectrum = gen_eigs(assemble_full(sys), dense_pk(sys, chain));
      const auto [n_even, n_odd] = signature_counts(sys);
      std::size_t plus = 0, minus = 0;
      for (double v : spectrum.values) {
        const double dev = std::min(std::abs(v - 1.0), std::abs(v + 1.0));
        worst = std::max(worst, dev);
        if (dev > 1e-8) {
          ok = false;
          break;
        }
        if (v > 0.0)
          ++plus;
        else
          ++minus;
      }
      if (ok && (plus != n_even || minus != n_odd)) ok = false;
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 60.0) ok = false;
  report(1, ok,
         fmt("two eigenvalue clustering on 100 systems (k in "
             "{1,2,3,5,10}): max deviation from {-1,+1} = %.2e, "
             "multiplicities = signature counts, %.1fs (< 60s)",
             worst, secs));
}

void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  std::size_t worst_iters = 0;
  for (int k : kSuiteKs) {
    const RandomRecipe recipe = suite_recipe(k, 0xC1);
    for (int t = 0; t < kSuiteTrials && ok; ++t) {
      const auto sys = random_system(recipe, static_cast<std::uint64_t>(t));
      const auto chain = schur_chain(sys);
      const auto set = ideal_blocks(chain);
      Rng rng(Rng::derive_seed(recipe.seed, static_cast<std::uint64_t>(t), 2));
      Vector w(sys.dim());
      for (auto& v : w) v = rng.uniform01();
      const Vector b = sys.apply(w);
      const auto res = minres_solve(
          [&sys](const Vector& v) { return sys.apply(v); },
          [&](const Vector& v) { return apply_pk_inverse(set, sys, v); }, b,
          1e-10);
      worst_iters = std::max(worst_iters, res.iterations);
      if (!res.converged || res.iterations > 3) ok = false;
    }
  }
  report(2, ok,
         fmt("exact factorized preconditioner converges on the same suite: "
             "max %zu iterations (<= 3 allowed) at tol 1e-10, %.1fs",
             worst_iters, seconds_since(start)));
}

void criterion_3() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  double worst_violation = 0.0;
  for (int k : {1, 2, 3}) {
    const auto bounds = pd_bound_intervals(k);
    if (!bounds) {
      ok = false;
      break;
    }
    const auto rows = eig_experiment(k, 100, false, 2025);
    for (const auto& r : rows) {
      if (!within_pd_bounds(*bounds, r.eigenvalue, 1e-8)) {
        ok = false;
        const double v = std::min(
            std::min(std::abs(r.eigenvalue - bounds->neg_lo),
                     std::abs(r.eigenvalue - bounds->neg_hi)),
            std::min(std::abs(r.eigenvalue - bounds->pos_lo),
                     std::abs(r.eigenvalue - bounds->pos_hi)));
        worst_violation = std::max(worst_violation, v);
      }
    }
  }
  const double secs = seconds_since(start);
  if (secs >= 120.0) ok = false;
  report(3, ok,
         ok ? fmt("block diagonal spectra inside the exact-constant intervals "
                  "for k = 1, 2, 3 (100 trials each, slack 1e-8), %.1fs "
                  "(< 120s)",
                  secs)
            : fmt("interval violation up to %.2e, %.1fs", worst_violation,
                  secs));
}

void criterion_4() {
  bool ok = true;
  double worst = 0.0;
  for (int k : {2, 3, 4}) {
    for (double c : {0.5, 2.0}) {
      const RandomRecipe recipe = suite_recipe(k, 0xC4);
      for (int t = 0; t < 3 && ok; ++t) {
        const auto sys = random_system(recipe, static_cast<std::uint64_t>(t));
        const auto chain = schur_chain(sys);
        std::vector<double> factors(static_cast<std::size_t>(k) + 1, 1.0);
        factors.back() = c;
        const auto spectrum =
            gen_eigs(assemble_full(sys), dense_pk(sys, chain, factors));
        const double target = (k % 2 == 0 ? 1.0 : -1.0) / c;
        const std::size_t nk = sys.block_size(static_cast<std::size_t>(k));
        std::size_t moved = 0;
        for (double v : spectrum.values) {
          const double d_target = std::abs(v - target);
          const double d_unit = std::min(std::abs(v - 1.0), std::abs(v + 1.0));
          if (d_target <= 1e-8)
            ++moved;
          else if (d_unit > 1e-8) {
            ok = false;
            worst = std::max(worst, std::min(d_target, d_unit));
          }
        }
        if (moved != nk) ok = false;
      }
    }
  }
  report(4, ok,
         fmt("scaled final Schur block moves exactly n_k eigenvalues to "
             "(-1)^k/c for c in {0.5,2}, k in {2,3,4}%s",
             ok ? "" : fmt(" (violation %.2e)", worst).c_str()));
}

void criterion_5() {
  bool ok = true;
  double worst = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int k = 1 + (i % 5);
    const RandomRecipe recipe = suite_recipe(k, 0xC5);
    const auto sys = random_system(recipe, static_cast<std::uint64_t>(i));
    const auto chain = schur_chain(sys);
    const double rel = reconstruct_from_factorization(sys, chain);
    worst = std::max(worst, rel);
    if (!(rel <= 1e-10)) ok = false;
  }
  report(5, ok,
         fmt("factorization identity on 10 systems (k <= 5): max relative "
             "residual %.2e (<= 1e-10)",
             worst));
}

void criterion_6() {
  bool ok = true;
  double worst_lower = 0.0, worst_diag = 0.0;
  for (int i = 0; i < 10; ++i) {
    const int k = 1 + (i % 4);
    const RandomRecipe recipe = suite_recipe(k, 0xC6);
    const auto sys = random_system(recipe, static_cast<std::uint64_t>(i));
    const auto chain = schur_chain(sys);
    const auto dev = pl_similarity_deviation(sys, chain);
    worst_lower = std::max(worst_lower, dev.lower);
    worst_diag = std::max(worst_diag, dev.diagonal);
    if (!(dev.lower <= 1e-10 && dev.diagonal <= 1e-8)) ok = false;
  }
  report(6, ok,
         fmt("forward-factor similarity is block triangular with identity "
             "diagonal on 10 systems (k <= 4): strict-lower %.2e, "
             "diagonal deviation %.2e (certifies all eigenvalues within "
             "1e-8 of 1)",
             worst_lower, worst_diag));
}

void criterion_7() {
  const RandomRecipe recipe = suite_recipe(3, 0xC7);
  const auto sys = random_system(recipe, 0);
  const auto chain = schur_chain(sys);
  const auto set = ideal_blocks(chain);
  const Vector v(sys.dim(), 1.0);

  set.reset_counts();
  apply_pk_inverse(set, sys, v);
  bool ok = set.inv[3].use_count() == 1;
  for (std::size_t j = 0; j < 3; ++j)
    if (set.inv[j].use_count() != 2) ok = false;

  set.reset_counts();
  apply_pd_inverse(set, sys, v);
  for (std::size_t j = 0; j <= 3; ++j)
    if (set.inv[j].use_count() != 1) ok = false;

  report(7, ok,
         "factorized apply uses each leading inverse exactly twice and the "
         "final one once; block diagonal uses each exactly once");
}

void criterion_8() {
  const auto start = std::chrono::steady_clock::now();
  struct Reference {
    int k;
    double pd;
    double pk;
  };
  const std::vector<Reference> ref{
      {1, 29.0, 8.74}, {2, 44.6, 15.2}, {3, 51.2, 21.2}, {5, 62.6, 27.7}};

  const auto rows = iteration_experiment({1, 2, 3, 5}, 100, 2025);
  const auto means = iteration_means(rows);
  auto mean_of = [&](int k, const std::string& label) {
    for (const auto& m : means)
      if (m.k == k && m.preconditioner == label) return m.mean_iterations;
    return -1.0;
  };

  bool ok = true;
  std::string detail;
  for (const auto& r : ref) {
    const double pd = mean_of(r.k, "pd_hat");
    const double pk = mean_of(r.k, "pk_hat");
    const bool pd_in = pd >= 0.7 * r.pd && pd <= 1.3 * r.pd;
    const bool pk_in = pk >= 0.7 * r.pk && pk <= 1.3 * r.pk;
    const bool ratio_ok = r.k < 2 || pk / pd <= 0.6;
    if (!pd_in || !pk_in || !ratio_ok) ok = false;
    detail += fmt("k=%d %.1f/%.1f ", r.k, pd, pk);
  }
  const double secs = seconds_since(start);
  if (secs >= 300.0) ok = false;
  report(8, ok,
         fmt("perturbed-block iteration means within +-30%% of the reference "
             "values and ratio <= 0.6 for k >= 2: %s(100 trials, %.1fs "
             "< 300s)",
             detail.c_str(), secs));
}

void criterion_9() {
  bool ok = true;
  double lo = 10.0, hi = 0.0;
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (double h : {0.125, 0.0625})
    for (double alpha : {1e-6, 1e-8})
      for (double lambda : {1e-8, 1e-10}) {
        const auto p = build_quadruple_saddle(h, alpha, lambda);
        const double gamma = alpha + lambda;
        const auto target =
            dense_matched_target(*p.fem.mass, *p.fem.stiffness, gamma);
        const auto shat =
            dense_matching_approx(*p.fem.mass, *p.fem.stiffness, gamma);
        const auto spectrum = gen_eigs(target, shat);
        lo = std::min(lo, spectrum.min());
        hi = std::max(hi, spectrum.max());
        if (spectrum.min() < inv_sqrt2 - 1e-8 || spectrum.max() > std::sqrt(2.0) + 1e-8)
          ok = false;
      }
  report(9, ok,
         fmt("matching approximation spectrum within [1/sqrt2, sqrt2] on the "
             "assembled quadruple problem (h in {2^-3,2^-4}, four parameter "
             "pairs): observed [%.9f, %.9f]",
             lo, hi));
}

void criterion_10() {
  const auto start = std::chrono::steady_clock::now();
  bool caps_ok = true, order_ok = true, converged_ok = true;
  int cells_in_caps = 0, cells = 0;
  std::string table;
  for (double h : {0.0625, 0.03125, 0.015625})
    for (double alpha : {1.0, 1e-2, 1e-4}) {
      const auto p = build_double_saddle(h, alpha);
      const auto approx = double_saddle_approx(p, 5);
      const auto apply_a = [&p](const Vector& v) { return p.system.apply(v); };
      const auto pd = minres_solve(
          apply_a,
          [&](const Vector& v) { return apply_pd_inverse(approx, p.system, v); },
          p.rhs, 1e-10);
      const auto pk = minres_solve(
          apply_a,
          [&](const Vector& v) { return apply_pk_inverse(approx, p.system, v); },
          p.rhs, 1e-10);
      ++cells;
      if (!pd.converged || !pk.converged) converged_ok = false;
      const bool cell_ok = pk.iterations <= 15 && pd.iterations <= 35;
      if (cell_ok)
        ++cells_in_caps;
      else
        caps_ok = false;
      if (pk.iterations > pd.iterations) order_ok = false;
      if (!cell_ok)
        table += fmt("[h=%g alpha=%g pd=%zu pk=%zu] ", h, alpha, pd.iterations,
                     pk.iterations);
    }
  const double secs = seconds_since(start);
  const bool ok = caps_ok && order_ok && converged_ok && secs < 180.0;
  report(
      10, ok,
      ok ? fmt("double-problem grid within caps (pk <= 15, pd <= 35, "
               "pk <= pd in all cells), %.1fs (< 180s)",
               secs)
         : fmt("caps pk <= 15 / pd <= 35 hold in %d/%d cells, pk <= pd in "
               "all: exceeded at %s- the approximate final Schur complement "
               "drops the boundary observation term, leaving eigenvalue "
               "outliers ~4/alpha that the native relative-residual stop at "
               "1e-10 must resolve (a backward-error stop, as used for the "
               "reference counts, exits ~3 orders earlier on this problem); "
               "%.1fs",
               cells_in_caps, cells, table.c_str(), secs));
}

void criterion_11() {
  const auto start = std::chrono::steady_clock::now();
  const std::vector<int> ms{1, 2, 3, 4, 5, 7, 10, 20};
  bool monotone_ok = true, m1_ok = true, ratio_ok = true;
  for (double h : {0.0625, 0.03125, 0.015625}) {
    const auto p = build_double_saddle(h, 1e-2);
    const auto apply_a = [&p](const Vector& v) { return p.system.apply(v); };
    std::vector<std::size_t> pd_counts, pk_counts;
    for (int m : ms) {
      const auto approx = double_saddle_approx(p, m);
      pd_counts.push_back(
          minres_solve(apply_a,
                       [&](const Vector& v) {
                         return apply_pd_inverse(approx, p.system, v);
                       },
                       p.rhs, 1e-10)
              .iterations);
      pk_counts.push_back(
          minres_solve(apply_a,
                       [&](const Vector& v) {
                         return apply_pk_inverse(approx, p.system, v);
                       },
                       p.rhs, 1e-10)
              .iterations);
    }
    for (std::size_t i = 1; i < ms.size(); ++i) {
      if (pd_counts[i] > pd_counts[i - 1] + 2) monotone_ok = false;
      if (pk_counts[i] > pk_counts[i - 1] + 2) monotone_ok = false;
    }
    const double d1 = static_cast<double>(pd_counts[0]);
    const double f1 = static_cast<double>(pk_counts[0]);
    if (std::abs(d1 - f1) > 0.2 * std::max(d1, f1)) m1_ok = false;
    for (std::size_t i = 0; i < ms.size(); ++i)
      if (ms[i] >= 3 && !(static_cast<double>(pk_counts[i]) <=
                          0.7 * static_cast<double>(pd_counts[i])))
        ratio_ok = false;
  }
  const bool ok = monotone_ok && m1_ok && ratio_ok;
  report(11, ok,
         fmt("Chebyshev sweep at alpha 1e-2: counts non-increasing in m "
             "(+2 slack)%s, m=1 counts within 20%%%s, pk <= 0.7 pd for "
             "m >= 3%s; %.1fs",
             monotone_ok ? "" : " VIOLATED", m1_ok ? "" : " VIOLATED",
             ratio_ok ? "" : " VIOLATED", seconds_since(start)));
}

void criterion_12() {
  const auto start = std::chrono::steady_clock::now();
  bool converged_ok = true, order_ok = true;
  double ratio_sum = 0.0;
  int cells = 0;
  for (double h : {0.125, 0.0625, 0.03125})
    for (double lambda : {1e-8, 1e-10})
      for (double alpha : {1e-6, 1e-8, 1e-10}) {
        const auto p = build_quadruple_saddle(h, alpha, lambda);
        const auto approx = quadruple_saddle_approx(p, 5);
        const auto apply_a = [&p](const Vector& v) {
          return p.system.apply(v);
        };
        const auto pd = minres_solve(
            apply_a,
            [&](const Vector& v) {
              return apply_pd_inverse(approx, p.system, v);
            },
            p.rhs, 1e-10);
        const auto pk = minres_solve(
            apply_a,
            [&](const Vector& v) {
              return apply_pk_inverse(approx, p.system, v);
            },
            p.rhs, 1e-10);
        if (!pd.converged || !pk.converged) converged_ok = false;
        if (pk.iterations > pd.iterations) order_ok = false;
        ratio_sum += static_cast<double>(pk.iterations) /
                     static_cast<double>(pd.iterations);
        ++cells;
      }
  const double mean_ratio = ratio_sum / cells;
  const double secs = seconds_since(start);
  const bool ok = converged_ok && order_ok && mean_ratio <= 0.75 && secs < 600.0;
  report(12, ok,
         fmt("quadruple-problem grid (18 cells): both preconditioners "
             "converge%s, pk <= pd in every cell%s, grid-mean ratio %.3f "
             "(<= 0.75), %.1fs (< 600s)",
             converged_ok ? "" : " VIOLATED", order_ok ? "" : " VIOLATED",
             mean_ratio, secs));
}

void criterion_13() {
  bool ok = true;
  std::string note;

  for (const TriMesh& mesh : {structured_square_mesh(3), disc_mesh(3)}) {
    const FemOperators fem = assemble(mesh);
    double area = 0.0;
    for (std::size_t t = 0; t < mesh.triangles.size(); ++t)
      area += triangle_area(mesh, t);
    double perimeter = 0.0;
    for (const auto& e : mesh.boundary_edges)
      perimeter += std::hypot(mesh.vertices[e[0]][0] - mesh.vertices[e[1]][0],
                              mesh.vertices[e[0]][1] - mesh.vertices[e[1]][1]);
    double mass_sum = 0.0, boundary_sum = 0.0;
    const auto md = fem.mass->to_dense();
    const auto qd = fem.boundary_mass->to_dense();
    for (std::size_t i = 0; i < md.rows(); ++i)
      for (std::size_t j = 0; j < md.cols(); ++j) {
        mass_sum += md(i, j);
        boundary_sum += qd(i, j);
      }
    const Vector k1 = fem.stiffness->mul(Vector(fem.dim(), 1.0));
    double kernel = 0.0;
    for (double v : k1) kernel = std::max(kernel, std::abs(v));
    if (std::abs(mass_sum - area) > 1e-12 ||
        std::abs(boundary_sum - perimeter) > 1e-12 || kernel > 1e-12)
      ok = false;
  }

  const auto p = build_double_saddle(0.0625, 1.0);
  if (p.system.dim() != 867) ok = false;

  report(13, ok,
         fmt("mass sum = area, stiffness kernel, boundary mass = perimeter "
             "(1e-12, square and disc); double-problem DoF at h=2^-4 is %zu "
             "(expected 867)",
             p.system.dim()));
}

}  // namespace

int main() {
  const auto start = std::chrono::steady_clock::now();
  criterion_1();
  criterion_2();
  criterion_3();
  criterion_4();
  criterion_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10();
  criterion_11();
  criterion_12();
  criterion_13();
  std::printf("%d of 13 criteria passed in %.1fs\n", 13 - failures,
              seconds_since(start));
  return failures == 0 ? 0 : 1;
}
