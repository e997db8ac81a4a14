// Random ensembles, the eigenvalue/iteration experiments, and the closed-form
// spectra used to validate them.
#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "msp/eigensolver.hpp"
#include "msp/experiments.hpp"

namespace {

using namespace msp;

TEST(RandomSystem, DeterministicAndWellSized) {
  RandomRecipe recipe;
  recipe.k = 2;
  recipe.seed = 101;

  const auto sys_a = random_system(recipe, 4);
  const auto sys_b = random_system(recipe, 4);
  EXPECT_EQ(sys_a.sizes(), sys_b.sizes());
  EXPECT_LE((assemble_full(sys_a) - assemble_full(sys_b)).max_abs(), 0.0);

  for (std::size_t n : sys_a.sizes()) {
    EXPECT_GE(n, 20u);
    EXPECT_LT(n, 30u);
  }

  // different trials draw different systems
  const auto sys_c = random_system(recipe, 5);
  const bool same_sizes = sys_a.sizes() == sys_c.sizes();
  if (same_sizes)
    EXPECT_GT((assemble_full(sys_a) - assemble_full(sys_c)).max_abs(), 1e-6);
}

TEST(RandomSystem, DiagonalBlocksHaveRequiredDefiniteness) {
  RandomRecipe recipe;
  recipe.k = 3;
  recipe.seed = 12;
  const auto sys = random_system(recipe, 0);
  EXPECT_TRUE(sys.a(0).is_positive_definite());
  for (std::size_t j = 1; j <= sys.k(); ++j)
    EXPECT_TRUE(sys.a(j).is_positive_semidefinite());
}

TEST(RandomSystem, ZeroDiagonalRecipeSortsSizes) {
  RandomRecipe recipe;
  recipe.k = 3;
  recipe.seed = 5;
  recipe.zero_diagonals = true;
  recipe.sort_sizes_descending = true;
  const auto sys = random_system(recipe, 2);
  for (std::size_t j = 1; j <= sys.k(); ++j) {
    EXPECT_LE(sys.block_size(j), sys.block_size(j - 1));
    EXPECT_TRUE(sys.a(j).is_zero());
  }
}

TEST(Perturbation, FactorsStayInBand) {
  Rng rng(77);
  const auto c = perturbation_factors(50, 0.3, rng);
  ASSERT_EQ(c.size(), 50u);
  for (double v : c) {
    EXPECT_GE(v, 0.7);
    EXPECT_LE(v, 1.3);
  }
  // nontrivial spread
  double lo = 2.0, hi = 0.0;
  for (double v : c) {
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  EXPECT_LT(lo, 0.9);
  EXPECT_GT(hi, 1.1);
}

TEST(ZeroDiagonalSpectrum, HandBuiltCosineOracle) {
  // sizes (3,2,1), A_1 = A_2 = 0: the block diagonal preconditioned spectrum
  // is the cosine set with multiplicities n_j - n_{j+1}
  std::vector<Block> diag;
  DenseMatrix a0(3, 3);
  a0(0, 0) = 2.0;
  a0(1, 1) = 3.0;
  a0(2, 2) = 4.0;
  diag.push_back(Block::dense(std::move(a0)));
  diag.push_back(Block::zero(2, 2));
  diag.push_back(Block::zero(1, 1));
  std::vector<Block> sub;
  sub.push_back(
      Block::dense(DenseMatrix::from_rows({{1, 0, 0}, {0, 1, 0}})));
  sub.push_back(Block::dense(DenseMatrix::from_rows({{1, 0}})));
  const BlockSaddleSystem sys(std::move(diag), std::move(sub));

  const auto chain = schur_chain(sys);
  auto spectrum = gen_eigs(assemble_full(sys), dense_pd(sys, chain));
  std::sort(spectrum.values.begin(), spectrum.values.end());

  const double pi = std::numbers::pi;
  const std::vector<double> expected{
      2.0 * std::cos(5.0 * pi / 7.0), 2.0 * std::cos(3.0 * pi / 5.0),
      2.0 * std::cos(3.0 * pi / 7.0), 1.0,
      2.0 * std::cos(pi / 5.0),       2.0 * std::cos(pi / 7.0)};
  ASSERT_EQ(spectrum.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    EXPECT_NEAR(spectrum.values[i], expected[i], 1e-8) << "position " << i;
}

TEST(ZeroDiagonalSpectrum, RandomTrialsHitValueSet) {
  EXPECT_LE(zero_a_spectrum_check(2, 5, 1234), 1e-8);
}

TEST(ZeroDiagonalSpectrum, ValueSetContents) {
  const auto values = zero_a_value_set(2);
  EXPECT_EQ(values.size(), 7u);
  EXPECT_TRUE(std::is_sorted(values.begin(), values.end()));
  const double pi = std::numbers::pi;
  const std::vector<double> expected{
      2.0 * std::cos(5.0 * pi / 7.0), -1.0,
      2.0 * std::cos(3.0 * pi / 5.0), 2.0 * std::cos(3.0 * pi / 7.0),
      1.0,                            2.0 * std::cos(pi / 5.0),
      2.0 * std::cos(pi / 7.0)};
  ASSERT_EQ(values.size(), expected.size());
  for (std::size_t i = 0; i < expected.size(); ++i)
    EXPECT_NEAR(values[i], expected[i], 1e-12);
}

TEST(PdBounds, IntervalsMatchExactConstants) {
  const auto b1 = pd_bound_intervals(1);
  ASSERT_TRUE(b1.has_value());
  EXPECT_NEAR(b1->neg_lo, -1.0, 1e-15);
  EXPECT_NEAR(b1->neg_hi, (1.0 - std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_NEAR(b1->pos_lo, 1.0, 1e-15);
  EXPECT_NEAR(b1->pos_hi, (1.0 + std::sqrt(5.0)) / 2.0, 1e-12);

  const auto b2 = pd_bound_intervals(2);
  ASSERT_TRUE(b2.has_value());
  EXPECT_NEAR(b2->neg_lo, -(1.0 + std::sqrt(5.0)) / 2.0, 1e-12);
  EXPECT_NEAR(b2->neg_hi, (1.0 - std::sqrt(5.0)) / 2.0, 1e-12);

  EXPECT_TRUE(pd_bound_intervals(3).has_value());
  EXPECT_FALSE(pd_bound_intervals(4).has_value());
  EXPECT_FALSE(pd_bound_intervals(0).has_value());

  EXPECT_TRUE(within_pd_bounds(*b1, 1.3, 0.0));
  EXPECT_TRUE(within_pd_bounds(*b1, -0.8, 0.0));
  EXPECT_FALSE(within_pd_bounds(*b1, 0.2, 0.0));
  EXPECT_FALSE(within_pd_bounds(*b1, 1.62, 1e-8));
  EXPECT_TRUE(within_pd_bounds(*b1, 1.62, 1e-2));
}

TEST(EigExperiment, EmitsSpectraPerTrialAndPreconditioner) {
  const int k = 2, trials = 3;
  const auto rows = eig_experiment(k, trials, true, 42);

  std::map<std::pair<int, std::string>, std::size_t> counts;
  for (const auto& r : rows) {
    EXPECT_EQ(r.k, k);
    EXPECT_TRUE(std::isfinite(r.eigenvalue));
    counts[{r.trial, r.preconditioner}]++;
  }
  // three labels per trial, equal counts within a trial (the system dim)
  ASSERT_EQ(counts.size(), static_cast<std::size_t>(3 * trials));
  for (int t = 0; t < trials; ++t) {
    const auto dim = counts[std::make_pair(t, std::string("pd"))];
    EXPECT_GT(dim, 0u);
    EXPECT_EQ(counts[std::make_pair(t, std::string("pd_hat"))], dim);
    EXPECT_EQ(counts[std::make_pair(t, std::string("pk_hat"))], dim);
  }

  // exact mode emits only the pd rows
  const auto exact_rows = eig_experiment(k, trials, false, 42);
  for (const auto& r : exact_rows) EXPECT_EQ(r.preconditioner, "pd");

  // deterministic: a second run yields byte-identical CSV
  std::ostringstream a, b;
  write_eig_csv(a, rows);
  write_eig_csv(b, eig_experiment(k, trials, true, 42));
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(a.str().substr(0, a.str().find('\n')),
            "k,trial,preconditioner,eigenvalue");
}

TEST(EigExperiment, ExactPdRowsRespectBoundIntervals) {
  for (int k : {1, 2, 3}) {
    const auto bounds = pd_bound_intervals(k);
    ASSERT_TRUE(bounds.has_value());
    const auto rows = eig_experiment(k, 5, false, 7);
    for (const auto& r : rows)
      EXPECT_TRUE(within_pd_bounds(*bounds, r.eigenvalue, 1e-8))
          << "k " << k << " eig " << r.eigenvalue;
  }
}

TEST(EigExperiment, FactorizedKeepsSmallEigenvaluesAway) {
  // perturbed-factor runs: the smallest magnitude eigenvalue under the
  // factorized preconditioner is at least that of the block diagonal in
  // at least 90% of trials
  const int k = 3, trials = 20;
  const auto rows = eig_experiment(k, trials, true, 1);
  std::vector<double> min_pd(trials, 1e300), min_pk(trials, 1e300);
  for (const auto& r : rows) {
    if (r.preconditioner == "pd_hat")
      min_pd[r.trial] = std::min(min_pd[r.trial], std::abs(r.eigenvalue));
    else if (r.preconditioner == "pk_hat")
      min_pk[r.trial] = std::min(min_pk[r.trial], std::abs(r.eigenvalue));
  }
  int wins = 0;
  for (int t = 0; t < trials; ++t)
    if (min_pk[t] >= min_pd[t]) ++wins;
  EXPECT_GE(wins, (trials * 9) / 10);
}

TEST(IterExperiment, ReproducibleAndOrdered) {
  const std::vector<int> ks{1, 2};
  const int trials = 5;
  const auto rows = iteration_experiment(ks, trials, 99);
  ASSERT_EQ(rows.size(), ks.size() * trials * 2);

  std::ostringstream a, b;
  write_iter_csv(a, rows);
  write_iter_csv(b, iteration_experiment(ks, trials, 99));
  EXPECT_EQ(a.str(), b.str());

  for (const auto& r : rows) {
    EXPECT_GT(r.iterations, 0u);
    EXPECT_GT(r.dof, 0u);
  }
}

TEST(IterExperiment, FactorizedBeatsBlockDiagonalOnAverage) {
  const auto rows = iteration_experiment({2}, 5, 31);
  const auto means = iteration_means(rows);
  ASSERT_EQ(means.size(), 2u);
  // sorted by (k, label): pd_hat before pk_hat
  EXPECT_EQ(means[0].preconditioner, "pd_hat");
  EXPECT_EQ(means[1].preconditioner, "pk_hat");
  EXPECT_EQ(means[0].trials, 5);
  EXPECT_LT(means[1].mean_iterations, means[0].mean_iterations);

  std::ostringstream os;
  write_iter_means_csv(os, means);
  EXPECT_EQ(os.str().substr(0, os.str().find('\n')),
            "k,preconditioner,mean_iterations,mean_dof,trials");
}

}  // namespace
