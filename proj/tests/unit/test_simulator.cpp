#include <gtest/gtest.h>

#include <map>

#include "readsort/alphabet.hpp"
#include "readsort/error.hpp"
#include "readsort/simulator.hpp"

using namespace readsort;

TEST(Simulator, GenomeIsDeterministicAcgt) {
  const auto g = gen_genome(10000, 5);
  EXPECT_EQ(g.size(), 10000u);
  EXPECT_EQ(g, gen_genome(10000, 5));
  EXPECT_NE(g, gen_genome(10000, 6));
  EXPECT_EQ(g.find_first_not_of("ACGT"), std::string::npos);
}

TEST(Simulator, GenomeComposition) {
  const auto g = gen_genome(200000, 7);
  std::map<char, double> freq;
  for (char c : g) freq[c] += 1.0 / g.size();
  for (char c : {'A', 'C', 'G', 'T'}) EXPECT_NEAR(freq[c], 0.25, 0.05) << c;
}

TEST(Simulator, ReadCountMatchesCoverage) {
  const auto db = gen_references(1, 10000, 1);
  SimConfig cfg;
  cfg.coverage = 50;
  cfg.seed = 3;
  const auto reads = simulate_reads(db.entries, cfg);
  EXPECT_NEAR(static_cast<double>(reads.records.size()), 50.0 * 10000 / 150, 0.02 * 3333);
}

TEST(Simulator, SameSeedSameReads) {
  const auto db = gen_references(3, 2000, 2);
  SimConfig cfg;
  cfg.coverage = 5;
  cfg.seed = 4;
  const auto a = simulate_reads(db.entries, cfg);
  EXPECT_EQ(a.records, simulate_reads(db.entries, cfg).records);
  EXPECT_EQ(a.records, simulate_reads(db.entries, cfg, 3).records);
  cfg.seed = 5;
  EXPECT_NE(a.records, simulate_reads(db.entries, cfg).records);
}

TEST(Simulator, ErrorFreeReadsComeFromTheirReference) {
  const auto db = gen_references(2, 3000, 8);
  for (bool paired : {true, false}) {
    SimConfig cfg;
    cfg.coverage = 5;
    cfg.sub_error_rate = 0.0;
    cfg.paired = paired;
    cfg.seed = 9;
    const auto sim = simulate_reads(db.entries, cfg);
    ASSERT_FALSE(sim.records.empty());
    for (std::size_t i = 0; i < sim.records.size(); ++i) {
      const auto& r = sim.records[i];
      const auto& ref = db.entries[sim.origin[i]].sequence;
      ASSERT_EQ(r.sequence.size(), 150u);
      ASSERT_EQ(r.quality.size(), 150u);
      const bool found = ref.find(r.sequence) != std::string::npos ||
                         ref.find(reverse_complement(r.sequence)) != std::string::npos;
      ASSERT_TRUE(found) << r.header;
      ASSERT_NE(r.header.find(db.entries[sim.origin[i]].id), std::string::npos);
    }
  }
}

TEST(Simulator, MatesShareSerialAndAreAdjacentInTruth) {
  const auto db = gen_references(1, 2000, 3);
  SimConfig cfg;
  cfg.coverage = 3;
  cfg.seed = 1;
  const auto sim = simulate_reads(db.entries, cfg);
  ASSERT_EQ(sim.records.size() % 2, 0u);
  for (std::size_t i = 0; i < sim.records.size(); i += 2) {
    const auto& a = sim.records[i].header;
    const auto& b = sim.records[i + 1].header;
    EXPECT_EQ(a.substr(a.size() - 2), "/1");
    EXPECT_EQ(b.substr(b.size() - 2), "/2");
    EXPECT_EQ(a.substr(0, a.size() - 2), b.substr(0, b.size() - 2));
  }
  const auto tsv = truth_tsv(sim, db.entries);
  EXPECT_EQ(tsv.substr(0, tsv.find('\n')), "read_id\tref_id");
  EXPECT_EQ(static_cast<std::size_t>(std::count(tsv.begin(), tsv.end(), '\n')), sim.records.size() + 1);
}

TEST(Simulator, RejectsShortReferencesAndBadConfig) {
  ReferenceDb db;
  db.entries.push_back({"tiny", "ACGTACGTAC"});
  try {
    simulate_reads(db.entries, SimConfig{});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::RefTooShort);
  }
  SimConfig bad;
  bad.coverage = 0;
  EXPECT_THROW(bad.validate(), Error);
}

TEST(Simulator, LowCoverageMayProduceNothing) {
  const auto db = gen_references(1, 300, 2);
  SimConfig cfg;
  cfg.coverage = 0.01;
  cfg.seed = 12;
  EXPECT_NO_THROW(simulate_reads(db.entries, cfg));
}
