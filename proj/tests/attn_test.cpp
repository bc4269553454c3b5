#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "oracle/attn_oracle.hpp"
#include "subseg/attn.hpp"
#include "subseg/error.hpp"
#include "subseg/rng.hpp"

using namespace subseg;
using namespace subseg::attn;

namespace {

oracle::Vec to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const oracle::Vec& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }

std::vector<std::size_t> random_ids(Rng& rng, std::size_t length, std::size_t vocab) {
  std::vector<std::size_t> ids(length);
  for (auto& id : ids)
    id = static_cast<std::size_t>(rng.below(vocab));
  return ids;
}

ModelShape random_shape(Rng& rng) {
  return {2 + rng.below(6), 2 + rng.below(6), 1 + rng.below(8), 1 + rng.below(8), 1 + rng.below(8), 1 + rng.below(8)};
}

}  // namespace

TEST(Gru, ZeroParametersHalveTheState) {
  // all gates 0.5, candidate tanh(0) = 0
  const auto cell = GruParams::zeros(3, 2);
  const Vector h = (Vector(2) << 0.8, -0.4).finished();
  const Vector out = gru_step(cell, Vector::Ones(3), h);
  EXPECT_DOUBLE_EQ(out[0], 0.4);
  EXPECT_DOUBLE_EQ(out[1], -0.2);
}

TEST(Gru, MatchesOracle) {
  Rng rng(1);
  for (int trial = 0; trial < 50; ++trial) {
    const auto in = 1 + rng.below(8), st = 1 + rng.below(8);
    const auto cell = random_gru(rng, in, st);
    const Vector x = random_vector(rng, in) * 20.0, h = random_vector(rng, st) * 5.0;
    const auto expected = oracle::gru(cell, to_std(x), to_std(h));
    const Vector got = gru_step(cell, x, h);
    for (std::size_t i = 0; i < expected.size(); ++i)
      EXPECT_NEAR(got[static_cast<Eigen::Index>(i)], expected[i], 1e-12);
  }
}

TEST(Attend, UniformWhenScoresTie) {
  Rng rng(2);
  const auto params = random_attention(rng, 3, 4, 2);
  const Vector h = (Vector(2) << 0.3, -0.7).finished();
  const std::vector<Vector> annotations(5, h);
  const auto a = attend(Vector::Zero(4), annotations, params);
  for (Eigen::Index i = 0; i < 5; ++i)
    EXPECT_NEAR(a.weights[i], 0.2, 1e-15);
  EXPECT_NEAR((a.context - h).norm(), 0.0, 1e-15);
}

TEST(Attend, SingleAnnotation) {
  Rng rng(3);
  const auto params = random_attention(rng, 3, 2, 4);
  const std::vector<Vector> annotations{random_vector(rng, 4)};
  const auto a = attend(random_vector(rng, 2), annotations, params);
  EXPECT_DOUBLE_EQ(a.weights[0], 1.0);
  EXPECT_NEAR((a.context - annotations[0]).norm(), 0.0, 1e-15);
}

TEST(Attend, MatchesOracle) {
  Rng rng(4);
  for (int trial = 0; trial < 50; ++trial) {
    const auto a_dim = 1 + rng.below(8), dz = 1 + rng.below(8), dh = 1 + rng.below(8), n = 1 + rng.below(8);
    const auto params = random_attention(rng, a_dim, dz, dh);
    std::vector<Vector> hs;
    std::vector<oracle::Vec> hs_std;
    for (std::size_t i = 0; i < n; ++i) {
      hs.push_back(random_vector(rng, dh) * 10.0);
      hs_std.push_back(to_std(hs.back()));
    }
    const Vector z = random_vector(rng, dz) * 10.0;
    const auto got = attend(z, hs, params);
    const auto expected = oracle::attend(to_std(z), hs_std, params);
    EXPECT_NEAR(std::abs(got.weights.sum() - 1.0), 0.0, 1e-12);
    EXPECT_NEAR((got.scores - to_eigen(expected.scores)).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
    EXPECT_NEAR((got.weights - to_eigen(expected.weights)).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
    EXPECT_NEAR((got.context - to_eigen(expected.context)).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
  }
}

TEST(Attend, EmptyAnnotationsRejected) {
  Rng rng(5);
  EXPECT_THROW(attend(Vector::Zero(2), {}, random_attention(rng, 2, 2, 2)), Error);
}

TEST(Attend, DimensionMismatchNamesShapes) {
  Rng rng(6);
  const std::vector<Vector> hs{Vector::Zero(3)};
  try {
    attend(Vector::Zero(2), hs, random_attention(rng, 2, 2, 4));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension);
    EXPECT_NE(std::string(e.what()).find('3'), std::string::npos);
    EXPECT_NE(std::string(e.what()).find('4'), std::string::npos);
  }
}

TEST(Softmax, ShiftInvariantAndStable) {
  const Vector s = (Vector(3) << 1000.0, 1001.0, 999.0).finished();
  const Vector p = softmax(s), q = softmax((s.array() - 1000.0).matrix());
  EXPECT_NEAR((p - q).norm(), 0.0, 1e-15);
  EXPECT_TRUE(p.allFinite());
}

TEST(Encoder, MatchesOracle) {
  Rng rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const auto shape = random_shape(rng);
    const auto model = random_model(rng, shape);
    const auto ids = random_ids(rng, 1 + rng.below(8), shape.source_vocab);
    const auto got = encode(ids, model.source_embedding, model.encoder_forward, model.encoder_backward);
    const auto expected = oracle::encode(ids, model.source_embedding, model.encoder_forward, model.encoder_backward);
    ASSERT_EQ(got.size(), expected.size());
    for (std::size_t i = 0; i < got.size(); ++i)
      EXPECT_NEAR((got[i] - to_eigen(expected[i])).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
  }
}

TEST(Encoder, ReversalSwapsDirections) {
  Rng rng(8);
  auto model = random_model(rng, {});
  model.encoder_backward = model.encoder_forward;
  const std::vector<std::size_t> ids{1, 4, 0, 2};
  const std::vector<std::size_t> reversed(ids.rbegin(), ids.rend());
  const auto a = encode(ids, model.source_embedding, model.encoder_forward, model.encoder_backward);
  const auto b = encode(reversed, model.source_embedding, model.encoder_forward, model.encoder_backward);
  const auto d = model.encoder_forward.state_dim();
  for (std::size_t i = 0; i < ids.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[ids.size() - 1 - i];
    EXPECT_NEAR((x.head(d) - y.tail(d)).norm(), 0.0, 1e-15);
    EXPECT_NEAR((x.tail(d) - y.head(d)).norm(), 0.0, 1e-15);
  }
}

TEST(Encoder, UnknownIdIsVocabularyError) {
  Rng rng(9);
  const auto model = random_model(rng, {});
  const std::vector<std::size_t> ids{99};
  try {
    encode(ids, model.source_embedding, model.encoder_forward, model.encoder_backward);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::vocabulary);
  }
}

TEST(Decoder, MatchesOracle) {
  Rng rng(10);
  for (int trial = 0; trial < 30; ++trial) {
    const auto t = 1 + rng.below(8), c = 1 + rng.below(8), z = 1 + rng.below(8);
    const auto cell = random_gru(rng, t + c, z);
    const DecoderState state{random_vector(rng, z), random_vector(rng, t)};
    const Vector context = random_vector(rng, c);
    const Vector got = decode_step(state, context, cell);
    const auto expected = oracle::decode_step(to_std(state.z), to_std(state.t_prev), to_std(context), cell);
    EXPECT_NEAR((got - to_eigen(expected)).lpNorm<Eigen::Infinity>(), 0.0, 1e-12);
    EXPECT_LE(got.lpNorm<Eigen::Infinity>(), 1.0);
  }
}

TEST(Decoder, WrongInputSizeIsDimensionError) {
  Rng rng(11);
  const auto cell = random_gru(rng, 5, 3);
  try {
    decode_step({Vector::Zero(3), Vector::Zero(2)}, Vector::Zero(2), cell);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::dimension);
  }
}

TEST(LogLikelihood, MatchesOracle) {
  Rng rng(12);
  for (int trial = 0; trial < 30; ++trial) {
    const auto shape = random_shape(rng);
    const auto model = random_model(rng, shape);
    const auto src = random_ids(rng, 1 + rng.below(8), shape.source_vocab);
    const auto tgt = random_ids(rng, 1 + rng.below(8), shape.target_vocab);
    const double got = sentence_log_likelihood(model, src, tgt);
    EXPECT_NEAR(got, oracle::log_likelihood(model, src, tgt), 1e-10);
    EXPECT_LE(got, 0.0);
  }
}

TEST(LogLikelihood, SingleWordVocabularyIsCertain) {
  Rng rng(13);
  ModelShape shape;
  shape.target_vocab = 1;
  const auto model = random_model(rng, shape);
  const std::vector<std::size_t> src{0, 3, 1}, tgt{0, 0, 0};
  EXPECT_DOUBLE_EQ(sentence_log_likelihood(model, src, tgt), 0.0);
}

TEST(LogLikelihood, StepDistributionsNormalized) {
  Rng rng(14);
  const auto model = random_model(rng, {});
  const std::vector<std::size_t> src{1, 2}, tgt{3, 4, 0};
  for (const auto& p : step_distributions(model, src, tgt)) {
    EXPECT_NEAR(p.sum(), 1.0, 1e-12);
    EXPECT_GE(p.minCoeff(), 0.0);
  }
}

TEST(LogLikelihood, UnknownTargetIsVocabularyError) {
  Rng rng(15);
  const auto model = random_model(rng, {});
  const std::vector<std::size_t> src{1}, tgt{5};
  try {
    sentence_log_likelihood(model, src, tgt);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::vocabulary);
  }
}

TEST(LogLikelihood, CorpusObjectiveIsMean) {
  Rng rng(16);
  const auto model = random_model(rng, {});
  const std::vector<std::pair<IdSequence, IdSequence>> pairs{{{1, 2}, {3}}, {{0}, {4, 4}}};
  const double a = sentence_log_likelihood(model, pairs[0].first, pairs[0].second);
  const double b = sentence_log_likelihood(model, pairs[1].first, pairs[1].second);
  EXPECT_NEAR(corpus_objective(model, pairs), (a + b) / 2.0, 1e-15);
}

TEST(RandomInit, RowMajorFill) {
  Rng a(17), b(17);
  const Matrix m = random_matrix(a, 2, 3);
  for (Eigen::Index r = 0; r < 2; ++r) {
    for (Eigen::Index c = 0; c < 3; ++c)
      EXPECT_EQ(m(r, c), -0.1 + 0.2 * b.unit());
  }
  EXPECT_LE(m.cwiseAbs().maxCoeff(), 0.1);
}

TEST(GradCheck, LinearFunctionIsExact) {
  const std::vector<double> w{1.5, -2.0, 0.25};
  const ScalarFn fn = [&](std::span<const double> x) { return w[0] * x[0] + w[1] * x[1] + w[2] * x[2]; };
  const std::vector<double> x{0.3, 0.1, -0.7};
  EXPECT_LT(grad_check(fn, x, w), 1e-9);
}

TEST(GradCheck, DetectsWrongGradient) {
  const ScalarFn fn = [](std::span<const double> x) { return x[0] * x[0]; };
  const std::vector<double> x{1.0}, wrong{1.0};
  EXPECT_GT(grad_check(fn, x, wrong), 0.4);
}

TEST(GradCheck, NonFiniteIsNumericError) {
  const ScalarFn fn = [](std::span<const double>) { return std::numeric_limits<double>::quiet_NaN(); };
  const std::vector<double> x{1.0}, g{0.0};
  try {
    grad_check(fn, x, g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::numeric);
  }
}

TEST(GradCheck, ScorePathGradient) {
  Rng rng(18);
  for (int trial = 0; trial < 500; ++trial) {
    const auto a_dim = 1 + rng.below(8), dz = 1 + rng.below(8), dh = 1 + rng.below(8), n = 1 + rng.below(8);
    const auto params = random_attention(rng, a_dim, dz, dh);
    const auto probe = conditioned_probe(rng, n, dz, dh);
    const ScalarFn fn = [&](std::span<const double> flat) {
      return score_path_objective(unflatten(flat, a_dim, dz, dh), probe);
    };
    EXPECT_LT(grad_check(fn, flatten(params), score_path_gradient(params, probe)), 1e-4);
  }
}

TEST(GradCheck, ConditionedProbeBounds) {
  Rng rng(20);
  for (int trial = 0; trial < 200; ++trial) {
    const auto dz = 1 + rng.below(8), dh = 1 + rng.below(8), n = 1 + rng.below(8);
    const auto probe = conditioned_probe(rng, n, dz, dh);
    EXPECT_GE(probe.z_prev.cwiseAbs().minCoeff(), 0.5);
    EXPECT_LE(probe.z_prev.cwiseAbs().maxCoeff(), 1.0);
    for (const auto& h : probe.annotations) {
      EXPECT_GE(h.cwiseAbs().minCoeff(), 0.5);
      EXPECT_TRUE((h.array() * probe.annotations[0].array() > 0.0).all());
    }
    EXPECT_GE(probe.score_weights.minCoeff(), 0.5);
    EXPECT_LT(2.0 * probe.direction.lpNorm<1>(), 0.5);
  }
}

TEST(Flatten, RoundTrip) {
  Rng rng(19);
  const auto params = random_attention(rng, 3, 2, 4);
  const auto back = unflatten(flatten(params), 3, 2, 4);
  EXPECT_EQ(back.v, params.v);
  EXPECT_EQ(back.W, params.W);
  EXPECT_EQ(back.U, params.U);
  EXPECT_EQ(flatten(params).size(), 3u + 6u + 12u);
}

TEST(InvariantSuite, AllChecksPass) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    for (const auto& check : run_invariant_suite(seed, 1 + seed % 8, 1 + (seed * 3) % 8))
      EXPECT_TRUE(check.passed) << check.name << " seed " << seed << " value " << check.value;
  }
}

TEST(InvariantSuite, RejectsEmptyShape) {
  EXPECT_THROW(run_invariant_suite(0, 0, 4), Error);
}
