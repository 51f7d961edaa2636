#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "fcm_oracle.hpp"
#include "readsort/context_model.hpp"
#include "readsort/error.hpp"

using namespace readsort;

namespace {

EnsembleConfig fcm_ensemble(std::initializer_list<int> orders, double alpha = 1.0 / 16) {
  EnsembleConfig cfg;
  for (int k : orders) cfg.models.emplace_back(FcmConfig::make(k, alpha));
  return cfg;
}

std::string random_acgt(std::mt19937_64& rng, std::size_t n) {
  std::string s(n, 'A');
  for (auto& c : s) c = "ACGT"[rng() % 4];
  return s;
}

}  // namespace

TEST(ContextModel, TrainCountsHandCountedContext) {
  ModelEnsemble ens(fcm_ensemble({2}));
  ens.train(to_symbols("ACGTACGT"));
  EXPECT_EQ(ens.count(0, to_symbols("AC"), 2), 2u);
  EXPECT_EQ(ens.count(0, to_symbols("AC"), 0), 0u);
  EXPECT_EQ(ens.count(0, to_symbols("GT"), 0), 1u);
}

TEST(ContextModel, EmptyAndShortTrainingLeavesContextsEmpty) {
  ModelEnsemble ens(fcm_ensemble({2}));
  ens.train({});
  ens.train(to_symbols("A"));
  for (Symbol s = 0; s < 4; ++s) EXPECT_EQ(ens.count(0, to_symbols("AA"), s), 0u);
}

TEST(ContextModel, EstimatorMatchesHandComputation) {
  ModelEnsemble ens(fcm_ensemble({2}, 1.0));
  ens.train(to_symbols("ACGTACGT"));
  ens.freeze();
  EXPECT_DOUBLE_EQ(ens.probability(to_symbols("AC"), 2), 0.5);
}

TEST(ContextModel, UntrainedIsUniform) {
  ModelEnsemble ens(fcm_ensemble({2}, 1.0));
  ens.freeze();
  const auto p = ens.probability(to_symbols("GG"));
  for (double v : p) EXPECT_DOUBLE_EQ(v, 0.25);
  const auto seq = to_symbols("ACGTTGCAAC");
  EXPECT_DOUBLE_EQ(ens.code_length(seq), 2.0 * seq.size());
  ModelEnsemble def;
  def.freeze();
  EXPECT_NEAR(def.code_length(seq), 2.0 * seq.size(), 1e-9);
}

TEST(ContextModel, Order0AllA) {
  ModelEnsemble ens(fcm_ensemble({0}, 1.0));
  ens.train(to_symbols("AAAA"));
  ens.freeze();
  EXPECT_NEAR(ens.code_length(to_symbols("AAAA")), -4 * std::log2(0.625), 1e-12);
  EXPECT_NEAR(ens.code_length(to_symbols("AAAA")), 2.7123, 1e-4);
  EXPECT_EQ(ens.code_length({}), 0.0);
}

TEST(ContextModel, DistributionsNormalize) {
  std::mt19937_64 rng(3);
  ModelEnsemble ens;
  ens.train(to_symbols(random_acgt(rng, 5000)));
  ens.freeze();
  for (int i = 0; i < 50; ++i) {
    const auto ctx = to_symbols(random_acgt(rng, 1 + rng() % 25));
    const auto p = ens.probability(ctx);
    EXPECT_NEAR(p[0] + p[1] + p[2] + p[3], 1.0, 1e-12);
  }
}

TEST(ContextModel, FrozenRules) {
  ModelEnsemble ens(fcm_ensemble({3}));
  EXPECT_THROW((void)ens.code_length(to_symbols("ACG")), Error);
  ens.train(to_symbols("ACGTTT"));
  ens.freeze();
  try {
    ens.train(to_symbols("A"));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::FrozenModel);
  }
}

TEST(ContextModel, FrozenEstimationIsDeterministic) {
  std::mt19937_64 rng(5);
  ModelEnsemble ens;
  ens.train(to_symbols(random_acgt(rng, 20000)));
  ens.freeze();
  const auto x = to_symbols(random_acgt(rng, 3000));
  const double a = ens.code_length(x);
  EXPECT_EQ(a, ens.code_length(x));
  EXPECT_EQ(a, ens.code_length(x, 1e300));
  const double partial = ens.code_length(x, 100.0);
  EXPECT_GT(partial, 100.0);
  EXPECT_LE(partial, a);
}

TEST(ContextModel, CodeLengthBoundedByFloor) {
  std::mt19937_64 rng(9);
  ModelEnsemble ens;
  std::string train(20000, 'A');
  ens.train(to_symbols(train));
  ens.freeze();
  const auto x = to_symbols(random_acgt(rng, 500));
  EXPECT_LE(ens.code_length(x), 16.0 * x.size() + 1e-9);
}

// Exhaustive comparison against the map-based oracle.
TEST(ContextModel, MatchesOracleExhaustively) {
  std::mt19937_64 rng(11);
  const std::string training = random_acgt(rng, 400) + "ACGTACGTAAAAACCCC" + random_acgt(rng, 200);
  const std::vector<int> orders{0, 2, 5, 13};
  ModelEnsemble ens(fcm_ensemble({0, 2, 5, 13}));
  ens.train(to_symbols(training));
  ens.freeze();
  std::vector<oracle::Fcm> ref;
  for (int k : orders) {
    oracle::Fcm m;
    m.order = k;
    m.train(training);
    ref.push_back(std::move(m));
  }
  double worst = 0;
  for (int k = 0; k <= 6; ++k) {
    const std::size_t total = std::size_t{1} << (2 * k);
    for (std::size_t v = 0; v < total; ++v) {
      std::string s(static_cast<std::size_t>(k), 'A');
      for (int i = 0; i < k; ++i) s[i] = "ACGT"[(v >> (2 * i)) & 3];
      worst = std::max(worst, std::abs(ens.code_length(to_symbols(s)) - oracle::code_length(ref, s)));
    }
  }
  for (int i = 0; i < 200; ++i) {
    const std::string s = random_acgt(rng, rng() % 13);
    worst = std::max(worst, std::abs(ens.code_length(to_symbols(s)) - oracle::code_length(ref, s)));
  }
  EXPECT_LE(worst, 1e-9);
}

TEST(ContextModel, StcmWithoutSubstitutionsEqualsBase) {
  std::mt19937_64 rng(13);
  const auto training = to_symbols(random_acgt(rng, 3000));
  EnsembleConfig a = fcm_ensemble({6});
  EnsembleConfig b;
  StcmConfig st;
  st.base = FcmConfig::make(6);
  st.max_substitutions = 0;
  st.fallback_alpha = st.base.alpha;
  b.models.emplace_back(st);
  ModelEnsemble ea(a), eb(b);
  ea.train(training);
  eb.train(training);
  ea.freeze();
  eb.freeze();
  for (int i = 0; i < 20; ++i) {
    const auto x = to_symbols(random_acgt(rng, 200));
    EXPECT_NEAR(ea.code_length(x), eb.code_length(x), 1e-9);
  }
}

TEST(ContextModel, StcmToleratesSubstitutions) {
  std::mt19937_64 rng(17);
  std::string ref = random_acgt(rng, 5000);
  EnsembleConfig fcm = fcm_ensemble({12});
  EnsembleConfig tol;
  StcmConfig st;
  st.base = FcmConfig::make(12);
  st.max_substitutions = 3;
  tol.models.emplace_back(st);
  ModelEnsemble ef(fcm), et(tol);
  ef.train(to_symbols(ref));
  et.train(to_symbols(ref));
  ef.freeze();
  et.freeze();
  std::string read = ref.substr(1000, 600);
  for (std::size_t i = 50; i < read.size(); i += 50) read[i] = read[i] == 'A' ? 'C' : 'A';
  EXPECT_LT(et.code_length(to_symbols(read)), ef.code_length(to_symbols(read)));
}

TEST(ContextModel, SessionLearningMatchesTrainThenPredict) {
  // Adaptive use: predicting symbol j after learning symbols < j equals a
  // frozen model trained on the prefix, for a single-model ensemble.
  std::mt19937_64 rng(19);
  const std::string s = random_acgt(rng, 64);
  ModelEnsemble live(fcm_ensemble({3}));
  ModelEnsemble::Session session(live);
  for (std::size_t j = 0; j < s.size(); ++j) {
    const auto p = session.predict();
    if (j >= 3) {
      ModelEnsemble ref(fcm_ensemble({3}));
      ref.train(to_symbols(s.substr(0, j)));
      ref.freeze();
      const auto q = ref.probability(to_symbols(s.substr(j - 3, 3)));
      for (int k = 0; k < 4; ++k) ASSERT_NEAR(p[k], q[k], 1e-12) << "position " << j;
    }
    session.update(static_cast<Symbol>(Alphabet::index_of(s[j])), true);
  }
}

TEST(ContextModel, ConfigValidation) {
  EnsembleConfig empty;
  EXPECT_THROW(empty.validate(), Error);
  EnsembleConfig bad = fcm_ensemble({3});
  bad.gamma = 1.0;
  EXPECT_THROW(bad.validate(), Error);
  EnsembleConfig dense;
  FcmConfig f;
  f.order = 16;
  dense.models.emplace_back(f);
  EXPECT_THROW(dense.validate(), Error);
  EXPECT_NO_THROW(EnsembleConfig::analysis_default().validate());
}
