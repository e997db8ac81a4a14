#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <msp/block_system.hpp>
#include <msp/eigensolver.hpp>
#include <msp/minres.hpp>
#include <msp/preconditioners.hpp>
#include <msp/rng.hpp>
#include <msp/util.hpp>

namespace msp {

// Random block saddle ensemble: n_j ~ floor(20 + 10u), A_j a symmetrized
// uniform matrix shifted to be positive (semi)definite, B_j uniform on [0,1).
// The leading block gets a 1.01x shift so it is strictly definite; the others
// are shifted exactly to the boundary.
struct RandomRecipe {
  int k = 1;
  std::uint64_t seed = 0;
  int size_base = 20;
  int size_spread = 10;
  // Replace A_1..A_k by zero blocks (pure-constraint ensemble).
  bool zero_diagonals = false;
  // Sort sizes non-increasing so every B_j has full row rank almost surely.
  bool sort_sizes_descending = false;
};

namespace detail {

inline DenseMatrix random_spd_block(std::size_t n, bool strict, Rng& rng) {
  DenseMatrix r(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) r(i, j) = rng.uniform01();
  r.symmetrize();
  const double lam_min = sym_eigs(r).min();
  if (lam_min < 0.0) {
    const double shift = (strict ? 1.01 : 1.0) * (-lam_min);
    for (std::size_t i = 0; i < n; ++i) r(i, i) += shift;
  }
  return r;
}

}  // namespace detail

inline BlockSaddleSystem random_system(const RandomRecipe& recipe,
                                       std::uint64_t trial = 0) {
  Rng rng = Rng::substream(recipe.seed, trial);
  const std::size_t levels = static_cast<std::size_t>(recipe.k) + 1;

  std::vector<std::size_t> sizes(levels);
  for (auto& n : sizes)
    n = static_cast<std::size_t>(recipe.size_base +
                                 static_cast<int>(recipe.size_spread *
                                                  rng.uniform01()));
  if (recipe.sort_sizes_descending)
    std::sort(sizes.begin(), sizes.end(), std::greater<>());

  std::vector<Block> diag;
  diag.reserve(levels);
  diag.push_back(Block::dense(detail::random_spd_block(sizes[0], true, rng)));
  for (std::size_t j = 1; j < levels; ++j) {
    if (recipe.zero_diagonals)
      diag.push_back(Block::zero(sizes[j], sizes[j]));
    else
      diag.push_back(Block::dense(detail::random_spd_block(sizes[j], false, rng)));
  }

  std::vector<Block> sub;
  sub.reserve(levels - 1);
  for (std::size_t j = 1; j < levels; ++j) {
    DenseMatrix b(sizes[j], sizes[j - 1]);
    for (std::size_t i = 0; i < b.rows(); ++i)
      for (std::size_t c = 0; c < b.cols(); ++c) b(i, c) = rng.uniform01();
    sub.push_back(Block::dense(std::move(b)));
  }

  return BlockSaddleSystem(std::move(diag), std::move(sub));
}

// One multiplicative factor per level, c_j = 1 + magnitude * (2u - 1).
inline std::vector<double> perturbation_factors(std::size_t levels,
                                                double magnitude, Rng& rng) {
  std::vector<double> c(levels);
  for (auto& v : c) v = 1.0 + magnitude * (2.0 * rng.uniform01() - 1.0);
  return c;
}

inline BlockApproxSet perturbed_blocks(const SchurChain& chain,
                                       std::uint64_t seed,
                                       double magnitude = 0.3) {
  Rng rng(seed);
  return scaled_blocks(chain, perturbation_factors(chain.levels(), magnitude, rng));
}

// ---------------------------------------------------------------------------
// Eigenvalue experiment: spectra of the preconditioned operators per trial.

struct EigRecord {
  int k = 0;
  int trial = 0;
  std::string preconditioner;  // "pd", "pd_hat", or "pk_hat"
  double eigenvalue = 0.0;
};

inline std::vector<EigRecord> eig_experiment(int k, int trials, bool perturbed,
                                             std::uint64_t seed,
                                             double magnitude = 0.3) {
  const std::uint64_t base =
      Rng::derive_seed(seed, static_cast<std::uint64_t>(k), 0xA11CE);
  RandomRecipe recipe;
  recipe.k = k;
  recipe.seed = base;

  std::vector<std::vector<EigRecord>> per_trial(
      static_cast<std::size_t>(trials));
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const BlockSaddleSystem sys = random_system(recipe, t);
    const DenseMatrix full = assemble_full(sys);
    const SchurChain chain = schur_chain(sys);

    auto emit = [&](const std::string& label, const DenseMatrix& prec) {
      const Spectrum eigs = gen_eigs(full, prec);
      for (std::size_t i = 0; i < eigs.size(); ++i)
        per_trial[t].push_back(
            {k, static_cast<int>(t), label, eigs.values[i]});
    };

    emit("pd", dense_pd(sys, chain));
    if (perturbed) {
      Rng prng(Rng::derive_seed(base, t, 1));
      const std::vector<double> c =
          perturbation_factors(chain.levels(), magnitude, prng);
      emit("pd_hat", dense_pd(sys, chain, c));
      emit("pk_hat", dense_pk(sys, chain, c));
    }
  });

  std::vector<EigRecord> rows;
  for (auto& chunk : per_trial)
    rows.insert(rows.end(), chunk.begin(), chunk.end());
  return rows;
}

inline void write_eig_csv(std::ostream& os, const std::vector<EigRecord>& rows) {
  os << "k,trial,preconditioner,eigenvalue\n";
  for (const auto& r : rows)
    os << r.k << ',' << r.trial << ',' << r.preconditioner << ','
       << format_g17(r.eigenvalue) << '\n';
}

// ---------------------------------------------------------------------------
// Iteration-count experiment: MINRES with the perturbed block diagonal and
// factorized preconditioners on the same system, rhs, and perturbation draw.

struct IterRecord {
  int k = 0;
  std::string preconditioner;  // "pd_hat" or "pk_hat"
  int trial = 0;
  std::size_t iterations = 0;
  std::size_t dof = 0;
};

struct IterationAverage {
  int k = 0;
  std::string preconditioner;
  double mean_iterations = 0.0;
  double mean_dof = 0.0;
  int trials = 0;
};

inline std::vector<IterRecord> iteration_experiment(
    const std::vector<int>& ks, int trials, std::uint64_t seed,
    double tol = 1e-10, double magnitude = 0.3) {
  std::vector<IterRecord> rows;
  for (int k : ks) {
    const std::uint64_t base =
        Rng::derive_seed(seed, static_cast<std::uint64_t>(k), 0xA11CE);
    RandomRecipe recipe;
    recipe.k = k;
    recipe.seed = base;

    std::vector<std::array<IterRecord, 2>> per_trial(
        static_cast<std::size_t>(trials));
    parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
      const BlockSaddleSystem sys = random_system(recipe, t);
      const SchurChain chain = schur_chain(sys);
      const BlockApproxSet approx =
          perturbed_blocks(chain, Rng::derive_seed(base, t, 1), magnitude);

      Rng rhs_rng(Rng::derive_seed(base, t, 2));
      Vector w(sys.dim());
      for (auto& v : w) v = rhs_rng.uniform01();
      const Vector b = sys.apply(w);

      const auto apply_a = [&](const Vector& x) { return sys.apply(x); };
      const MinresResult pd = minres_solve(
          apply_a,
          [&](const Vector& v) { return apply_pd_inverse(approx, sys, v); }, b,
          tol);
      const MinresResult pk = minres_solve(
          apply_a,
          [&](const Vector& v) { return apply_pk_inverse(approx, sys, v); }, b,
          tol);

      per_trial[t][0] = {k, "pd_hat", static_cast<int>(t), pd.iterations,
                         sys.dim()};
      per_trial[t][1] = {k, "pk_hat", static_cast<int>(t), pk.iterations,
                         sys.dim()};
    });
    for (auto& pair : per_trial) {
      rows.push_back(pair[0]);
      rows.push_back(pair[1]);
    }
  }
  return rows;
}

inline std::vector<IterationAverage> iteration_means(
    const std::vector<IterRecord>& rows) {
  std::vector<IterationAverage> out;
  for (const auto& r : rows) {
    auto it = std::find_if(out.begin(), out.end(), [&](const auto& m) {
      return m.k == r.k && m.preconditioner == r.preconditioner;
    });
    if (it == out.end()) {
      out.push_back({r.k, r.preconditioner, 0.0, 0.0, 0});
      it = std::prev(out.end());
    }
    it->mean_iterations += static_cast<double>(r.iterations);
    it->mean_dof += static_cast<double>(r.dof);
    it->trials += 1;
  }
  for (auto& m : out) {
    m.mean_iterations /= m.trials;
    m.mean_dof /= m.trials;
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
    return a.k != b.k ? a.k < b.k : a.preconditioner < b.preconditioner;
  });
  return out;
}

inline void write_iter_csv(std::ostream& os,
                           const std::vector<IterRecord>& rows) {
  os << "k,preconditioner,trial,iterations,dof\n";
  for (const auto& r : rows)
    os << r.k << ',' << r.preconditioner << ',' << r.trial << ','
       << r.iterations << ',' << r.dof << '\n';
}

inline void write_iter_means_csv(std::ostream& os,
                                 const std::vector<IterationAverage>& rows) {
  os << "k,preconditioner,mean_iterations,mean_dof,trials\n";
  for (const auto& r : rows)
    os << r.k << ',' << r.preconditioner << ','
       << format_g17(r.mean_iterations) << ',' << format_g17(r.mean_dof)
       << ',' << r.trials << '\n';
}

// ---------------------------------------------------------------------------
// Zero-diagonal ensemble: the block diagonal preconditioned spectrum is a
// fixed set of cosine values independent of the matrix entries.

inline std::vector<double> zero_a_value_set(int k) {
  std::vector<double> values{-1.0, 1.0};
  for (int j = 0; j <= k; ++j)
    for (int i = 0; i <= j; ++i)
      values.push_back(2.0 * std::cos((2 * i + 1) * std::numbers::pi /
                                      (2 * j + 3)));
  std::sort(values.begin(), values.end());
  values.erase(std::unique(values.begin(), values.end(),
                           [](double a, double b) { return std::abs(a - b) < 1e-12; }),
               values.end());
  return values;
}

// Largest distance from any computed eigenvalue to the predicted value set,
// over the given number of trials.
inline double zero_a_spectrum_check(int k, int trials, std::uint64_t seed) {
  RandomRecipe recipe;
  recipe.k = k;
  recipe.seed = Rng::derive_seed(seed, static_cast<std::uint64_t>(k), 0x0A);
  recipe.zero_diagonals = true;
  recipe.sort_sizes_descending = true;

  const std::vector<double> values = zero_a_value_set(k);
  std::vector<double> worst(static_cast<std::size_t>(trials), 0.0);
  parallel_for(static_cast<std::size_t>(trials), [&](std::size_t t) {
    const BlockSaddleSystem sys = random_system(recipe, t);
    const SchurChain chain = schur_chain(sys);
    const Spectrum eigs = gen_eigs(assemble_full(sys), dense_pd(sys, chain));
    for (double lam : eigs.values) {
      double dist = std::numeric_limits<double>::infinity();
      for (double v : values) dist = std::min(dist, std::abs(lam - v));
      worst[t] = std::max(worst[t], dist);
    }
  });
  return *std::max_element(worst.begin(), worst.end());
}

// ---------------------------------------------------------------------------
// Known inclusion intervals for the exact block diagonal preconditioner.

struct PdBounds {
  double neg_lo = 0.0;
  double neg_hi = 0.0;
  double pos_lo = 0.0;
  double pos_hi = 0.0;
};

inline std::optional<PdBounds> pd_bound_intervals(int k) {
  const double pi = std::numbers::pi;
  switch (k) {
    case 1:
      return PdBounds{-1.0, 2.0 * std::cos(3.0 * pi / 5.0), 1.0,
                      2.0 * std::cos(pi / 5.0)};
    case 2:
      return PdBounds{-2.0 * std::cos(pi / 5.0), 2.0 * std::cos(3.0 * pi / 5.0),
                      2.0 * std::cos(3.0 * pi / 7.0), 2.0 * std::cos(pi / 7.0)};
    case 3:
      return PdBounds{-2.0 * std::cos(pi / 7.0), 2.0 * std::cos(5.0 * pi / 9.0),
                      2.0 * std::cos(3.0 * pi / 7.0), 2.0 * std::cos(pi / 9.0)};
    default:
      return std::nullopt;
  }
}

inline bool within_pd_bounds(const PdBounds& b, double eig, double slack) {
  const bool in_neg = eig >= b.neg_lo - slack && eig <= b.neg_hi + slack;
  const bool in_pos = eig >= b.pos_lo - slack && eig <= b.pos_hi + slack;
  return in_neg || in_pos;
}

}  // namespace msp
