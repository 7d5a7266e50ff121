#include "womac/mechanisms.hpp"

#include <gtest/gtest.h>

#include "support/generators.hpp"
#include "support/invariants.hpp"
#include "support/naive_womac.hpp"

namespace womac {
namespace {

OutcomeVector binary(std::initializer_list<double> values) {
  Vector y(static_cast<Eigen::Index>(values.size()));
  Eigen::Index i = 0;
  for (double v : values) y[i++] = v;
  return OutcomeVector(y, OutcomeKind::Binary);
}

TEST(Standard, ExactCopyWins) {
  Matrix w(3, 3);
  w << 0.4, 1, 0.6, 0.5, 0, 0.2, 0.3, 1, 0.9;
  const auto result = run_standard(PredictionMatrix(w), binary({1, 0, 1}));
  EXPECT_EQ(result.scores[1], 0.0);
  EXPECT_EQ(result.winner, 1u);
  EXPECT_EQ(result.mechanism_tag, MechanismTag::Standard);
}

TEST(Standard, HandArithmetic) {
  Matrix w(1, 2);
  w << 0.9, 0.2;
  const auto result = run_standard(PredictionMatrix(w), binary({1}));
  EXPECT_NEAR(result.scores[0], 0.01, 1e-15);
  EXPECT_NEAR(result.scores[1], 0.64, 1e-15);
  EXPECT_EQ(result.winner, 0u);
}

TEST(Standard, EqualsBroadcastScoring) {
  testing::Gen gen(3);
  const Matrix w = gen.reports(6, 5);
  const Vector y = gen.binary(6);
  const auto direct = run_standard(PredictionMatrix(w), OutcomeVector(y, OutcomeKind::Binary));
  const auto composed = score_all(w, ReferenceMatrix(y.replicate(1, 5)));
  EXPECT_EQ(direct.scores, composed.scores);
  EXPECT_EQ(direct.winner, composed.winner);
}

TEST(Standard, ShapeMismatch) {
  EXPECT_THROW(run_standard(PredictionMatrix(Matrix::Zero(2, 2)), binary({1})), DimensionError);
}

TEST(Oracular, HandArithmetic) {
  Matrix w(2, 2);
  w << 0.1, -0.2, -0.1, 0.2;
  const auto result = run_oracular(PredictionMatrix(w), OracleVector{Vector::Zero(2)});
  EXPECT_NEAR(result.scores[0], 0.02, 1e-15);
  EXPECT_NEAR(result.scores[1], 0.08, 1e-15);
  EXPECT_EQ(result.winner, 0u);
  EXPECT_EQ(result.mechanism_tag, MechanismTag::Oracular);
}

TEST(Oracular, CoincidesWithStandardOnNoiselessOutcomes) {
  testing::Gen gen(4);
  const Matrix w = gen.reports(5, 4);
  const Vector theta = gen.continuous(5);
  const auto oracular = run_oracular(PredictionMatrix(w), OracleVector{theta});
  const auto standard = run_standard(PredictionMatrix(w), OutcomeVector(theta, OutcomeKind::Continuous));
  EXPECT_EQ(oracular.scores, standard.scores);
  EXPECT_EQ(oracular.winner, standard.winner);
  // Column equal to theta wins.
  Matrix with_truth = w;
  with_truth.col(2) = theta;
  EXPECT_EQ(run_oracular(PredictionMatrix(with_truth), OracleVector{theta}).winner, 2u);
}

TEST(Womac, IdenticalExperts) {
  Matrix w(4, 5);
  for (Eigen::Index i = 0; i < 4; ++i) w.row(i).setConstant(0.1 * static_cast<double>(i + 1));
  const auto y = binary({1, 0, 0, 1});
  for (double k : {0.05, 0.3, 1.0}) {
    const auto run = run_womac(PredictionMatrix(w), y, WomacConfig{TopKAverage{k}});
    EXPECT_EQ(run.reference.values(), w);
    EXPECT_EQ(run.result.scores, std::vector<double>(5, 0.0));
    EXPECT_EQ(run.result.winner, 0u);
    EXPECT_EQ(womac_score_only(PredictionMatrix(w), y, WomacConfig{TopKAverage{k}}), std::vector<double>(5, 0.0));
  }
}

TEST(Womac, SingleTopPeerPerCell) {
  // Expert 0 beats expert 1 beats expert 2 on every leave-one-out subset, so
  // with k = 0.5 each cell keeps exactly one peer: the best one besides j.
  Matrix w(3, 3);
  w << 0.9, 0.6, 0.2,  //
      0.1, 0.4, 0.7,   //
      0.8, 0.5, 0.3;
  const naive::Instance instance{w, binary({1, 0, 1}).values()};
  Matrix expected(3, 3);
  expected << 0.6, 0.9, 0.9,  //
      0.4, 0.1, 0.1,          //
      0.5, 0.8, 0.8;
  EXPECT_EQ(naive::reference_topk(instance, 0.5), expected);

  const auto run = run_womac(PredictionMatrix(w), binary({1, 0, 1}), WomacConfig{TopKAverage{0.5}});
  EXPECT_EQ(run.reference.values(), expected);
  EXPECT_NEAR(run.result.scores[0], 0.27, 1e-15);
  EXPECT_NEAR(run.result.scores[1], 0.27, 1e-15);
  EXPECT_NEAR(run.result.scores[2], 1.10, 1e-15);
  EXPECT_EQ(run.result.tied_winners, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(run.result.mechanism_tag, MechanismTag::WomacTopK);
}

TEST(Womac, MatchesNaiveLoopOnRandomInstance) {
  testing::Gen gen(10);
  const Matrix w = gen.reports(10, 8);
  const Vector y = gen.binary(10);
  const naive::Instance instance{w, y};
  const OutcomeVector outcomes(y, OutcomeKind::Binary);

  const auto topk = run_womac(PredictionMatrix(w), outcomes, WomacConfig{TopKAverage{0.3}});
  EXPECT_LE((topk.reference.values() - naive::reference_topk(instance, 0.3)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(womac_score_only(PredictionMatrix(w), outcomes, WomacConfig{TopKAverage{0.3}}), topk.result.scores);

  const auto lsq = run_womac(PredictionMatrix(w), outcomes, WomacConfig{LeastSquares{3, 0.1}});
  EXPECT_LE((lsq.reference.values() - naive::reference_lsq(instance, 3, 0.1)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_EQ(lsq.result.mechanism_tag, MechanismTag::WomacLSQ);
}

TEST(Womac, LeastSquaresRecoversLinearTruth) {
  // y is an exact affine function of expert 0; with expert 0 as the only
  // screened peer the fit reproduces it on the held-out row.
  Matrix w(6, 3);
  w << 0.1, 0.9, 0.5,  //
      0.3, 0.2, 0.4,   //
      0.5, 0.6, 0.1,   //
      0.7, 0.3, 0.8,   //
      0.2, 0.7, 0.6,   //
      0.9, 0.1, 0.3;
  Vector y = 2.0 * w.col(0).array() - 0.1;
  w.col(1) = y;  // expert 1 reports y exactly and ranks first for others
  const auto run = run_womac(PredictionMatrix(w), OutcomeVector(y, OutcomeKind::Continuous),
                             WomacConfig{LeastSquares{1, 0.0}});
  for (Eigen::Index i = 0; i < 6; ++i) {
    EXPECT_NEAR(run.reference.values()(i, 0), y[i], 1e-12);
    EXPECT_NEAR(run.reference.values()(i, 2), y[i], 1e-12);
  }
}

TEST(Womac, UnderdeterminedLeastSquaresIsMinimumNorm) {
  // m = 2 leaves a single training row; every cell is rank deficient.
  Matrix w(2, 4);
  w << 0.2, 0.4, 0.6, 0.8, 0.3, 0.1, 0.9, 0.5;
  const Vector y = (Vector(2) << 1.0, 0.0).finished();
  const naive::Instance instance{w, y};
  const auto run = run_womac(PredictionMatrix(w), OutcomeVector(y, OutcomeKind::Binary),
                             WomacConfig{LeastSquares{3, 0.0}});
  EXPECT_LE((run.reference.values() - naive::reference_lsq(instance, 3, 0.0)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Womac, Validation) {
  const auto y2 = binary({1, 0});
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(1, 3)), binary({1}), WomacConfig{}), ValidationError);
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(2, 2)), y2, WomacConfig{TopKAverage{0.5}}), ValidationError);
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(2, 3)), y2, WomacConfig{TopKAverage{0.0}}), ValidationError);
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(2, 3)), y2, WomacConfig{LeastSquares{3, 0.0}}),
               ValidationError);
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(2, 3)), y2, WomacConfig{LeastSquares{0, 0.0}}),
               ValidationError);
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(2, 3)), y2, WomacConfig{LeastSquares{1, -1.0}}),
               ValidationError);
  EXPECT_THROW(run_womac(PredictionMatrix(Matrix::Zero(3, 3)), y2, WomacConfig{}), DimensionError);
}

TEST(Womac, Properties) {
  for (auto result : {testing::check_self_exclusion(100, 21), testing::check_womac_translation(100, 22),
                      testing::check_naive_equivalence(40, 23, 1e-12)}) {
    EXPECT_TRUE(result.ok()) << result.first_failure;
  }
}

TEST(SharedReference, AllColumnsIdentical) {
  const Vector t = (Vector(3) << 0.1, 0.5, 0.9).finished();
  const auto ref = ReferenceMatrix::broadcast(t, 4);
  for (Eigen::Index j = 0; j < 4; ++j) EXPECT_EQ(ref.values().col(j), t);
}

TEST(ScoringProperties, TranslationMonotonicityPermutation) {
  for (auto result : {testing::check_translation_invariance(200, 31), testing::check_monotonicity(200, 32),
                      testing::check_permutation_equivariance(200, 33)}) {
    EXPECT_TRUE(result.ok()) << result.first_failure;
  }
}

}  // namespace
}  // namespace womac
