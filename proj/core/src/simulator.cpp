#include "readsort/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "readsort/alphabet.hpp"
#include "readsort/error.hpp"
#include "readsort/hash.hpp"
#include "readsort/parallel.hpp"

namespace readsort {

namespace {

constexpr std::size_t kRepeatBlock = 500;
constexpr char kTopQuality = 'I';
constexpr char kMinQuality = '#';

struct Fragment {
  std::size_t ref = 0;
  std::size_t pos = 0;
  std::string mate1, mate2, qual1, qual2;
};

std::string quality_string(std::size_t len, int read_len, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> noise(-2, 2);
  std::string q(len, kTopQuality);
  for (std::size_t i = 0; i < len; ++i) {
    const int drop = static_cast<int>(i) * 10 / read_len;
    q[i] = static_cast<char>(std::clamp(kTopQuality - drop + noise(rng), int{kMinQuality}, int{kTopQuality}));
  }
  return q;
}

void add_errors(std::string& read, double rate, std::mt19937_64& rng) {
  if (rate <= 0.0) return;
  std::bernoulli_distribution hit(rate);
  std::uniform_int_distribution<int> shift(1, 3);
  for (auto& c : read) {
    if (!hit(rng)) continue;
    const int s = Alphabet::index_of(c);
    c = Alphabet::letter(static_cast<Symbol>((s + shift(rng)) & 3));
  }
}

std::vector<Fragment> simulate_one(const ReferenceEntry& ref, std::size_t index, const SimConfig& cfg) {
  std::mt19937_64 rng(derive_seed(cfg.seed, index));
  const std::size_t len = ref.sequence.size();
  const auto read_len = static_cast<std::size_t>(cfg.read_len);
  const double expected_reads = cfg.coverage * static_cast<double>(len) / cfg.read_len;
  const double expected_units = cfg.paired ? expected_reads / 2.0 : expected_reads;
  const double whole = std::floor(expected_units);
  std::bernoulli_distribution extra(expected_units - whole);
  const auto units = static_cast<std::size_t>(whole) + (extra(rng) ? 1 : 0);

  std::normal_distribution<double> insert(cfg.insert_mean, cfg.insert_sd);
  std::bernoulli_distribution reverse(0.5);
  std::vector<Fragment> out;
  out.reserve(units);
  for (std::size_t u = 0; u < units; ++u) {
    Fragment f;
    f.ref = index;
    std::size_t span_len = read_len;
    if (cfg.paired) {
      const auto drawn = static_cast<long long>(std::llround(insert(rng)));
      span_len = static_cast<std::size_t>(std::clamp<long long>(drawn, static_cast<long long>(read_len),
                                                                static_cast<long long>(len)));
    }
    f.pos = std::uniform_int_distribution<std::size_t>(0, len - span_len)(rng);
    std::string fragment = ref.sequence.substr(f.pos, span_len);
    if (reverse(rng)) fragment = reverse_complement(fragment);
    f.mate1 = fragment.substr(0, read_len);
    add_errors(f.mate1, cfg.sub_error_rate, rng);
    f.qual1 = quality_string(read_len, cfg.read_len, rng);
    if (cfg.paired) {
      f.mate2 = reverse_complement(fragment).substr(0, read_len);
      add_errors(f.mate2, cfg.sub_error_rate, rng);
      f.qual2 = quality_string(read_len, cfg.read_len, rng);
    }
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace

void SimConfig::validate() const {
  if (read_len < 1) throw Error(ErrorCode::InvalidConfig, "read_len must be at least 1");
  if (!(coverage > 0.0) || !std::isfinite(coverage)) throw Error(ErrorCode::InvalidConfig, "coverage must be positive");
  if (paired && insert_mean < read_len) throw Error(ErrorCode::InvalidConfig, "insert_mean must be >= read_len");
  if (!(insert_sd >= 0.0)) throw Error(ErrorCode::InvalidConfig, "insert_sd must be non-negative");
  if (!(sub_error_rate >= 0.0 && sub_error_rate < 1.0))
    throw Error(ErrorCode::InvalidConfig, "sub_error_rate must be in [0, 1)");
}

std::string gen_genome(std::size_t length, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::string g(length, 'A');
  for (auto& c : g) c = Alphabet::letter(static_cast<Symbol>(rng() >> 62));
  std::bernoulli_distribution copy(0.10);
  for (std::size_t start = kRepeatBlock; start + kRepeatBlock <= length; start += kRepeatBlock) {
    if (!copy(rng)) continue;
    const std::size_t from = std::uniform_int_distribution<std::size_t>(0, start - kRepeatBlock)(rng);
    std::copy_n(g.begin() + static_cast<std::ptrdiff_t>(from), kRepeatBlock, g.begin() + static_cast<std::ptrdiff_t>(start));
  }
  return g;
}

ReferenceDb gen_references(std::size_t count, std::size_t length, std::uint64_t seed) {
  ReferenceDb db;
  for (std::size_t i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof id, "ref%03zu", i + 1);
    db.entries.push_back(ReferenceEntry{id, gen_genome(length, derive_seed(seed, 1000003 + i))});
    db.total_bases += length;
  }
  return db;
}

SimulatedReads simulate_reads(std::span<const ReferenceEntry> refs, const SimConfig& cfg, int threads) {
  cfg.validate();
  const auto need = static_cast<std::size_t>(cfg.paired ? cfg.insert_mean : cfg.read_len);
  for (const auto& r : refs) {
    if (r.sequence.size() < need)
      throw Error(ErrorCode::RefTooShort, "reference '" + r.id + "' has " + std::to_string(r.sequence.size()) +
                                              " bases, need at least " + std::to_string(need));
    if (r.sequence.find_first_not_of("ACGT") != std::string::npos)
      throw Error(ErrorCode::InvalidConfig, "reference '" + r.id + "' contains bytes outside ACGT");
  }

  std::vector<std::vector<Fragment>> per_ref(refs.size());
  parallel_for(refs.size(), threads, [&](std::size_t i) { per_ref[i] = simulate_one(refs[i], i, cfg); });

  std::vector<Fragment> all;
  for (auto& v : per_ref) std::move(v.begin(), v.end(), std::back_inserter(all));
  std::mt19937_64 rng(cfg.seed);
  std::shuffle(all.begin(), all.end(), rng);

  SimulatedReads out;
  out.records.reserve(all.size() * (cfg.paired ? 2 : 1));
  std::size_t serial = 0;
  for (auto& f : all) {
    const std::string stem =
        "@SIM:" + std::to_string(++serial) + ":" + refs[f.ref].id + ":" + std::to_string(f.pos);
    if (cfg.paired) {
      out.records.push_back(FastqRecord{stem + "/1", std::move(f.mate1), "+", std::move(f.qual1)});
      out.records.push_back(FastqRecord{stem + "/2", std::move(f.mate2), "+", std::move(f.qual2)});
      out.origin.insert(out.origin.end(), 2, f.ref);
    } else {
      out.records.push_back(FastqRecord{stem, std::move(f.mate1), "+", std::move(f.qual1)});
      out.origin.push_back(f.ref);
    }
  }
  return out;
}

std::string truth_tsv(const SimulatedReads& sim, std::span<const ReferenceEntry> refs) {
  std::string out = "read_id\tref_id\n";
  for (std::size_t i = 0; i < sim.records.size(); ++i) {
    out.append(sim.records[i].header, 1);
    out += '\t';
    out += refs[sim.origin[i]].id;
    out += '\n';
  }
  return out;
}

}  // namespace readsort
