// Experiment driver for multiple saddle-point preconditioning studies.
//
// Subcommands generate CSV tables (deterministic for a fixed seed) and print
// a short human-readable summary with CPU times to stdout. Timing never goes
// into the CSV files. Exit codes: 0 ok, 1 failed check or runtime error,
// 2 usage error.

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <msp/msp.hpp>

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, format, v);
  return buf;
}

// A failed result check (as opposed to a usage or runtime error).
struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void write_file(const std::string& path, const std::string& content) {
  std::ofstream os(path);
  if (!os) throw msp::Error("cannot open for write: " + path);
  os << content;
}

std::vector<int> parse_levels(const std::vector<double>& hs) {
  std::vector<int> levels;
  levels.reserve(hs.size());
  for (double h : hs) levels.push_back(msp::level_from_h(h));
  return levels;
}

// ---------------------------------------------------------------------------

struct EigBoundsOptions {
  std::vector<int> ks{1, 2, 3};
  int trials = 100;
  std::uint64_t seed = 1;
  double slack = 1e-8;
  std::string out;
};

void run_eig_bounds(const EigBoundsOptions& opt) {
  std::vector<msp::EigRecord> all;
  bool violated = false;
  for (int k : opt.ks) {
    const auto start = Clock::now();
    const auto rows = msp::eig_experiment(k, opt.trials, false, opt.seed);
    const auto bounds = msp::pd_bound_intervals(k);
    std::size_t outside = 0;
    double lo = rows.front().eigenvalue, hi = rows.front().eigenvalue;
    for (const auto& r : rows) {
      lo = std::min(lo, r.eigenvalue);
      hi = std::max(hi, r.eigenvalue);
      if (bounds && !msp::within_pd_bounds(*bounds, r.eigenvalue, opt.slack))
        ++outside;
    }
    std::cout << "k=" << k << ": " << rows.size() << " eigenvalues in ["
              << fmt("%.6f", lo) << ", " << fmt("%.6f", hi) << "]";
    if (bounds)
      std::cout << ", outside known intervals: " << outside;
    else
      std::cout << ", no interval table for this k";
    std::cout << "  (" << fmt("%.2f", seconds_since(start)) << "s)\n";
    if (outside > 0) violated = true;
    all.insert(all.end(), rows.begin(), rows.end());
  }
  if (!opt.out.empty()) {
    std::ostringstream csv;
    msp::write_eig_csv(csv, all);
    write_file(opt.out, csv.str());
    std::cout << "wrote " << opt.out << "\n";
  }
  if (violated) throw CheckFailure("eigenvalues found outside the known inclusion intervals");
}

// ---------------------------------------------------------------------------

struct EigPerturbedOptions {
  std::vector<int> ks{2};
  int trials = 20;
  std::uint64_t seed = 1;
  double magnitude = 0.3;
  std::string out;
};

void run_eig_perturbed(const EigPerturbedOptions& opt) {
  std::vector<msp::EigRecord> all;
  for (int k : opt.ks) {
    const auto start = Clock::now();
    const auto rows = msp::eig_experiment(k, opt.trials, true, opt.seed, opt.magnitude);
    std::map<std::string, std::pair<double, double>> ranges;
    std::map<std::string, double> closest;
    for (const auto& r : rows) {
      auto [it, fresh] = ranges.try_emplace(
          r.preconditioner, std::pair{r.eigenvalue, r.eigenvalue});
      if (!fresh) {
        it->second.first = std::min(it->second.first, r.eigenvalue);
        it->second.second = std::max(it->second.second, r.eigenvalue);
      }
      auto [cit, cfresh] = closest.try_emplace(r.preconditioner, std::abs(r.eigenvalue));
      if (!cfresh) cit->second = std::min(cit->second, std::abs(r.eigenvalue));
    }
    std::cout << "k=" << k << " (" << opt.trials << " trials):\n";
    for (const auto& [label, range] : ranges)
      std::cout << "  " << label << ": eigenvalues in [" << fmt("%.6f", range.first)
                << ", " << fmt("%.6f", range.second)
                << "], smallest magnitude " << fmt("%.6f", closest[label]) << "\n";
    std::cout << "  (" << fmt("%.2f", seconds_since(start)) << "s)\n";
    all.insert(all.end(), rows.begin(), rows.end());
  }
  if (!opt.out.empty()) {
    std::ostringstream csv;
    msp::write_eig_csv(csv, all);
    write_file(opt.out, csv.str());
    std::cout << "wrote " << opt.out << "\n";
  }
}

// ---------------------------------------------------------------------------

struct ItersRandomOptions {
  std::vector<int> ks{1, 2, 3, 4, 5, 10};
  int trials = 100;
  std::uint64_t seed = 1;
  double tol = 1e-10;
  double magnitude = 0.3;
  std::string out;
  std::string means_out;
};

void run_iters_random(const ItersRandomOptions& opt) {
  const auto start = Clock::now();
  const auto rows = msp::iteration_experiment(opt.ks, opt.trials, opt.seed,
                                              opt.tol, opt.magnitude);
  const auto means = msp::iteration_means(rows);
  std::cout << "k    mean dof   block diagonal   factorized\n";
  for (int k : opt.ks) {
    double pd = 0.0, pk = 0.0, dof = 0.0;
    for (const auto& m : means) {
      if (m.k != k) continue;
      if (m.preconditioner == "pd_hat") pd = m.mean_iterations;
      if (m.preconditioner == "pk_hat") {
        pk = m.mean_iterations;
        dof = m.mean_dof;
      }
    }
    std::printf("%-4d %-10.1f %-16.2f %-10.2f\n", k, dof, pd, pk);
  }
  std::cout << "(" << fmt("%.2f", seconds_since(start)) << "s)\n";
  if (!opt.out.empty()) {
    std::ostringstream csv;
    msp::write_iter_csv(csv, rows);
    write_file(opt.out, csv.str());
    std::cout << "wrote " << opt.out << "\n";
  }
  if (!opt.means_out.empty()) {
    std::ostringstream csv;
    msp::write_iter_means_csv(csv, means);
    write_file(opt.means_out, csv.str());
    std::cout << "wrote " << opt.means_out << "\n";
  }
}

// ---------------------------------------------------------------------------

struct PdeRow {
  std::map<std::string, std::string> fields;
};

void append_pde_csv(std::ostringstream& csv, const std::vector<std::string>& cols,
                    const std::vector<PdeRow>& rows) {
  for (std::size_t i = 0; i < cols.size(); ++i)
    csv << cols[i] << (i + 1 < cols.size() ? ',' : '\n');
  for (const auto& row : rows)
    for (std::size_t i = 0; i < cols.size(); ++i)
      csv << row.fields.at(cols[i]) << (i + 1 < cols.size() ? ',' : '\n');
}

struct SolveOutcome {
  std::size_t iterations;
  bool converged;
  double seconds;
};

SolveOutcome timed_minres(const msp::BlockSaddleSystem& sys,
                          const msp::BlockApproxSet& approx, bool factorized,
                          const msp::Vector& rhs, double tol, std::size_t maxit) {
  const auto start = Clock::now();
  const auto apply_a = [&](const msp::Vector& x) { return sys.apply(x); };
  const auto apply_m = [&](const msp::Vector& v) {
    return factorized ? msp::apply_pk_inverse(approx, sys, v)
                      : msp::apply_pd_inverse(approx, sys, v);
  };
  const auto result = msp::minres_solve(apply_a, apply_m, rhs, tol, maxit);
  return {result.iterations, result.converged, seconds_since(start)};
}

struct PdeDoubleOptions {
  std::vector<double> hs{0.0625, 0.03125, 0.015625};
  std::vector<double> alphas{1.0, 0.1, 0.01, 0.001, 0.0001};
  int cheb = 5;
  double tol = 1e-10;
  std::size_t maxit = 0;
  std::string out;
};

void run_pde_double(const PdeDoubleOptions& opt) {
  parse_levels(opt.hs);  // validate spacings up front
  std::vector<PdeRow> rows;
  std::cout << "h        alpha      dof     block diagonal   factorized\n";
  for (double h : opt.hs) {
    for (double alpha : opt.alphas) {
      const auto problem = msp::build_double_saddle(h, alpha);
      const auto approx = msp::double_saddle_approx(problem, opt.cheb);
      const auto pd = timed_minres(problem.system, approx, false, problem.rhs,
                                   opt.tol, opt.maxit);
      const auto pk = timed_minres(problem.system, approx, true, problem.rhs,
                                   opt.tol, opt.maxit);
      std::printf("%-8s %-10s %-7zu %4zu (%6.2fs)   %4zu (%6.2fs)%s\n",
                  msp::format_g17(h).c_str(), msp::format_g17(alpha).c_str(),
                  problem.system.dim(), pd.iterations, pd.seconds,
                  pk.iterations, pk.seconds,
                  pd.converged && pk.converged ? "" : "  [not converged]");
      for (bool factorized : {false, true}) {
        const auto& r = factorized ? pk : pd;
        PdeRow row;
        row.fields["h"] = msp::format_g17(h);
        row.fields["alpha"] = msp::format_g17(alpha);
        row.fields["dof"] = std::to_string(problem.system.dim());
        row.fields["preconditioner"] = factorized ? "pk" : "pd";
        row.fields["iterations"] = std::to_string(r.iterations);
        row.fields["converged"] = r.converged ? "1" : "0";
        rows.push_back(std::move(row));
      }
    }
  }
  if (!opt.out.empty()) {
    std::ostringstream csv;
    append_pde_csv(csv, {"h", "alpha", "dof", "preconditioner", "iterations", "converged"},
                   rows);
    write_file(opt.out, csv.str());
    std::cout << "wrote " << opt.out << "\n";
  }
}

struct PdeQuadrupleOptions {
  std::vector<double> hs{0.125, 0.0625, 0.03125};
  std::vector<double> lambdas{1e-8, 1e-10};
  std::vector<double> alphas{1e-6, 1e-8, 1e-10};
  double rho = 1e-5;
  int cheb = 5;
  double tol = 1e-10;
  std::size_t maxit = 0;
  std::string out;
};

void run_pde_quadruple(const PdeQuadrupleOptions& opt) {
  parse_levels(opt.hs);
  std::vector<PdeRow> rows;
  std::cout << "h        lambda     alpha      dof     block diagonal   factorized\n";
  for (double h : opt.hs) {
    for (double lambda : opt.lambdas) {
      for (double alpha : opt.alphas) {
        const auto problem = msp::build_quadruple_saddle(h, alpha, lambda, opt.rho);
        const auto approx = msp::quadruple_saddle_approx(problem, opt.cheb);
        const auto pd = timed_minres(problem.system, approx, false, problem.rhs,
                                     opt.tol, opt.maxit);
        const auto pk = timed_minres(problem.system, approx, true, problem.rhs,
                                     opt.tol, opt.maxit);
        std::printf("%-8s %-10s %-10s %-7zu %4zu (%6.2fs)   %4zu (%6.2fs)%s\n",
                    msp::format_g17(h).c_str(), msp::format_g17(lambda).c_str(),
                    msp::format_g17(alpha).c_str(), problem.system.dim(),
                    pd.iterations, pd.seconds, pk.iterations, pk.seconds,
                    pd.converged && pk.converged ? "" : "  [not converged]");
        for (bool factorized : {false, true}) {
          const auto& r = factorized ? pk : pd;
          PdeRow row;
          row.fields["h"] = msp::format_g17(h);
          row.fields["lambda"] = msp::format_g17(lambda);
          row.fields["alpha"] = msp::format_g17(alpha);
          row.fields["dof"] = std::to_string(problem.system.dim());
          row.fields["preconditioner"] = factorized ? "pk" : "pd";
          row.fields["iterations"] = std::to_string(r.iterations);
          row.fields["converged"] = r.converged ? "1" : "0";
          rows.push_back(std::move(row));
        }
      }
    }
  }
  if (!opt.out.empty()) {
    std::ostringstream csv;
    append_pde_csv(csv,
                   {"h", "lambda", "alpha", "dof", "preconditioner", "iterations",
                    "converged"},
                   rows);
    write_file(opt.out, csv.str());
    std::cout << "wrote " << opt.out << "\n";
  }
}

struct ChebSweepOptions {
  std::vector<int> ms{1, 2, 3, 4, 5, 7, 10, 20};
  std::vector<double> hs{0.0625, 0.03125, 0.015625};
  double alpha = 0.01;
  double tol = 1e-10;
  std::size_t maxit = 0;
  std::string out;
};

void run_cheb_sweep(const ChebSweepOptions& opt) {
  parse_levels(opt.hs);
  std::vector<PdeRow> rows;
  std::cout << "h        m    block diagonal   factorized\n";
  for (double h : opt.hs) {
    const auto problem = msp::build_double_saddle(h, opt.alpha);
    for (int m : opt.ms) {
      const auto approx = msp::double_saddle_approx(problem, m);
      const auto pd = timed_minres(problem.system, approx, false, problem.rhs,
                                   opt.tol, opt.maxit);
      const auto pk = timed_minres(problem.system, approx, true, problem.rhs,
                                   opt.tol, opt.maxit);
      std::printf("%-8s %-4d %4zu (%6.2fs)   %4zu (%6.2fs)%s\n",
                  msp::format_g17(h).c_str(), m, pd.iterations, pd.seconds,
                  pk.iterations, pk.seconds,
                  pd.converged && pk.converged ? "" : "  [not converged]");
      for (bool factorized : {false, true}) {
        const auto& r = factorized ? pk : pd;
        PdeRow row;
        row.fields["h"] = msp::format_g17(h);
        row.fields["alpha"] = msp::format_g17(opt.alpha);
        row.fields["m"] = std::to_string(m);
        row.fields["preconditioner"] = factorized ? "pk" : "pd";
        row.fields["iterations"] = std::to_string(r.iterations);
        row.fields["converged"] = r.converged ? "1" : "0";
        rows.push_back(std::move(row));
      }
    }
  }
  if (!opt.out.empty()) {
    std::ostringstream csv;
    append_pde_csv(csv, {"h", "alpha", "m", "preconditioner", "iterations", "converged"},
                   rows);
    write_file(opt.out, csv.str());
    std::cout << "wrote " << opt.out << "\n";
  }
}

// ---------------------------------------------------------------------------

struct VerifyOptions {
  std::uint64_t seed = 1;
};

void check(bool ok, const std::string& what) {
  if (!ok) throw CheckFailure(what);
  std::cout << "ok: " << what << "\n";
}

void run_verify(const VerifyOptions& opt) {
  {
    msp::RandomRecipe recipe;
    recipe.k = 3;
    recipe.seed = opt.seed;
    const auto sys = msp::random_system(recipe, 0);
    const auto chain = msp::schur_chain(sys);
    check(msp::reconstruct_from_factorization(sys, chain) <= 1e-10,
          "block factorization reconstructs the system matrix");

    const auto spectrum = msp::gen_eigs(msp::assemble_full(sys),
                                    msp::dense_pk(sys, chain));
    bool two_point = true;
    for (double v : spectrum.values)
      if (std::abs(std::abs(v) - 1.0) > 1e-8) two_point = false;
    check(two_point, "exact factorized preconditioner clusters eigenvalues at +-1");

    const auto exact = msp::ideal_blocks(chain);
    exact.reset_counts();
    msp::Vector v(sys.dim(), 1.0);
    msp::apply_pk_inverse(exact, sys, v);
    bool counts_ok = exact.inv[3].use_count() == 1;
    for (std::size_t j = 0; j < 3; ++j)
      if (exact.inv[j].use_count() != 2) counts_ok = false;
    check(counts_ok, "factorized apply uses each inner solve twice (last level once)");
  }
  check(msp::zero_a_spectrum_check(2, 5, opt.seed) <= 1e-8,
        "zero-diagonal ensemble spectrum matches the cosine value set");
  {
    const auto problem = msp::build_double_saddle(0.125, 0.01);
    const auto chain = msp::schur_chain(problem.system);
    const auto exact = msp::ideal_blocks(chain);
    const auto result = msp::minres_solve(
        [&](const msp::Vector& x) { return problem.system.apply(x); },
        [&](const msp::Vector& v) {
          return msp::apply_pk_inverse(exact, problem.system, v);
        },
        problem.rhs, 1e-10);
    check(result.converged && result.iterations <= 3,
          "exactly preconditioned saddle problem solves in at most 3 iterations");
  }
  std::cout << "all checks passed\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"block preconditioning experiments for multiple saddle-point systems"};
  app.require_subcommand(1);

  EigBoundsOptions eb;
  auto* eig_bounds = app.add_subcommand(
      "eig-bounds", "eigenvalue spread of the block diagonal preconditioned system");
  eig_bounds->add_option("--k", eb.ks, "saddle depths")->delimiter(',');
  eig_bounds->add_option("--trials", eb.trials, "systems per depth");
  eig_bounds->add_option("--seed", eb.seed, "rng seed");
  eig_bounds->add_option("--slack", eb.slack, "interval slack");
  eig_bounds->add_option("--out", eb.out, "csv output path");

  EigPerturbedOptions ep;
  auto* eig_perturbed = app.add_subcommand(
      "eig-perturbed", "spectra with randomly scaled Schur complement blocks");
  eig_perturbed->add_option("--k", ep.ks, "saddle depths")->delimiter(',');
  eig_perturbed->add_option("--trials", ep.trials, "systems per depth");
  eig_perturbed->add_option("--seed", ep.seed, "rng seed");
  eig_perturbed->add_option("--magnitude", ep.magnitude, "perturbation magnitude");
  eig_perturbed->add_option("--out", ep.out, "csv output path");

  ItersRandomOptions ir;
  auto* iters_random = app.add_subcommand(
      "iters-random", "MINRES iteration counts on random systems");
  iters_random->add_option("--k", ir.ks, "saddle depths")->delimiter(',');
  iters_random->add_option("--trials", ir.trials, "systems per depth");
  iters_random->add_option("--seed", ir.seed, "rng seed");
  iters_random->add_option("--tol", ir.tol, "relative residual tolerance");
  iters_random->add_option("--magnitude", ir.magnitude, "perturbation magnitude");
  iters_random->add_option("--out", ir.out, "per-trial csv output path");
  iters_random->add_option("--means-out", ir.means_out, "per-depth means csv path");

  PdeDoubleOptions pdd;
  auto* pde_double = app.add_subcommand(
      "pde-double", "boundary-observation control problem (square, depth 2)");
  pde_double->set_help_flag("--help", "print help");
  pde_double->add_option("--h", pdd.hs, "mesh spacings (powers of 1/2)")->delimiter(',');
  pde_double->add_option("--alpha", pdd.alphas, "regularization values")->delimiter(',');
  pde_double->add_option("--cheb-m", pdd.cheb, "Chebyshev steps for mass solves");
  pde_double->add_option("--tol", pdd.tol, "relative residual tolerance");
  pde_double->add_option("--maxit", pdd.maxit, "iteration cap (0 = automatic)");
  pde_double->add_option("--out", pdd.out, "csv output path");

  PdeQuadrupleOptions pdq;
  auto* pde_quadruple = app.add_subcommand(
      "pde-quadruple", "state-constrained control problem (disc, depth 4)");
  pde_quadruple->set_help_flag("--help", "print help");
  pde_quadruple->add_option("--h", pdq.hs, "mesh spacings (powers of 1/2)")->delimiter(',');
  pde_quadruple->add_option("--lambda", pdq.lambdas, "homotopy values")->delimiter(',');
  pde_quadruple->add_option("--alpha", pdq.alphas, "regularization values")->delimiter(',');
  pde_quadruple->add_option("--rho", pdq.rho, "augmented Lagrangian parameter");
  pde_quadruple->add_option("--cheb-m", pdq.cheb, "Chebyshev steps for mass solves");
  pde_quadruple->add_option("--tol", pdq.tol, "relative residual tolerance");
  pde_quadruple->add_option("--maxit", pdq.maxit, "iteration cap (0 = automatic)");
  pde_quadruple->add_option("--out", pdq.out, "csv output path");

  ChebSweepOptions cs;
  auto* cheb_sweep = app.add_subcommand(
      "cheb-sweep", "iteration counts as the inner mass approximation degrades");
  cheb_sweep->set_help_flag("--help", "print help");
  cheb_sweep->add_option("--m", cs.ms, "Chebyshev step counts")->delimiter(',');
  cheb_sweep->add_option("--h", cs.hs, "mesh spacings (powers of 1/2)")->delimiter(',');
  cheb_sweep->add_option("--alpha", cs.alpha, "regularization value");
  cheb_sweep->add_option("--tol", cs.tol, "relative residual tolerance");
  cheb_sweep->add_option("--maxit", cs.maxit, "iteration cap (0 = automatic)");
  cheb_sweep->add_option("--out", cs.out, "csv output path");

  VerifyOptions vo;
  auto* verify = app.add_subcommand("verify", "fast structural self-checks");
  verify->add_option("--seed", vo.seed, "rng seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*eig_bounds) run_eig_bounds(eb);
    if (*eig_perturbed) run_eig_perturbed(ep);
    if (*iters_random) run_iters_random(ir);
    if (*pde_double) run_pde_double(pdd);
    if (*pde_quadruple) run_pde_quadruple(pdq);
    if (*cheb_sweep) run_cheb_sweep(cs);
    if (*verify) run_verify(vo);
  } catch (const CheckFailure& e) {
    std::cerr << "check failed: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
