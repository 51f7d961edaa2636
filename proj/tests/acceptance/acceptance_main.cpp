// End-to-end acceptance checks. Prints one PASS/FAIL line per criterion and
// exits nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "coder_check.hpp"
#include "fastq_fuzz.hpp"
#include "fcm_oracle.hpp"
#include "readsort/builtin_codec.hpp"
#include "readsort/classification.hpp"
#include "readsort/hash.hpp"
#include "readsort/input.hpp"
#include "readsort/pipeline.hpp"
#include "readsort/read_filter.hpp"
#include "readsort/reorder_codec.hpp"
#include "readsort/simulator.hpp"

using namespace readsort;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return v[v.size() / 2];
}

std::string slurp(const fs::path& p) {
  const auto b = read_file_bytes(p);
  return {b.begin(), b.end()};
}

std::vector<FastqRecord> canonical(std::vector<FastqRecord> v) {
  std::sort(v.begin(), v.end(), [](const FastqRecord& a, const FastqRecord& b) {
    return std::tie(a.header, a.sequence, a.separator, a.quality) <
           std::tie(b.header, b.sequence, b.separator, b.quality);
  });
  return v;
}

fs::path scratch_root() {
  const fs::path p = default_work_dir() / ("readsort-acceptance-" + std::to_string(::getpid()));
  fs::create_directories(p);
  return p;
}

// ---------------------------------------------------------------------------
// 1. Losslessness over a fuzz corpus.

Verdict losslessness(const fs::path& root) {
  const ReferenceDb db = gen_references(2, 3000, 77);
  PipelineConfig cfg;
  cfg.compute_gain = false;
  std::size_t files = 0, bytes = 0, sorted_files = 0;
  std::string failure;
  for (std::size_t i = 0; i < 1000 && failure.empty(); ++i) {
    auto recs = fuzz::make_file(i, 2024);
    if (i >= 5 && i % 3 == 0) {
      // Mix in reads that do match the database, with some 'N' bases, so
      // the plan actually reorders.
      SimConfig sim;
      sim.coverage = 1 + static_cast<double>(i % 4);
      sim.seed = i;
      sim.paired = i % 2 == 0;
      auto extra = simulate_reads(db.entries, sim).records;
      std::mt19937_64 rng(i);
      for (auto& r : extra)
        if (rng() % 5 == 0) r.sequence[rng() % r.sequence.size()] = 'N';
      recs.insert(recs.begin() + static_cast<std::ptrdiff_t>(rng() % (recs.size() + 1)), extra.begin(), extra.end());
    }
    const std::string text = to_fastq_string(recs);
    bytes += text.size();

    std::vector<FastqRecord> unpacked, restored;
    if (i % 100 == 7) {
      // File-level path through the public pack/unpack commands.
      const fs::path dir = root / ("fuzz" + std::to_string(i));
      fs::create_directories(dir);
      write_file_text(dir / "in.fq", text);
      {
        std::ofstream out(dir / "db.fa");
        write_fasta(db, out);
      }
      PipelineConfig fc = cfg;
      fc.db_path = dir / "db.fa";
      fc.input_fastq = dir / "in.fq";
      fc.work_dir = dir;
      cmd_pack(fc, PackOutputs{dir / "a.rsqz", dir / "a.order", std::nullopt});
      UnpackConfig un;
      un.archive = dir / "a.rsqz";
      un.output = dir / "sorted.fq";
      un.work_dir = dir;
      cmd_unpack(un);
      un.sidecar = dir / "a.order";
      un.output = dir / "back.fq";
      cmd_unpack(un);
      if (slurp(dir / "back.fq") != text) failure = fmt("file %zu: restored bytes differ", i);
      unpacked = parse_fastq_string(slurp(dir / "sorted.fq"));
      restored = recs;
      fs::remove_all(dir);
    } else {
      const PackResult res = pack_records(recs, db, cfg);
      if (!res.plan.groups.empty()) ++sorted_files;
      unpacked = builtin_decompress(res.archive);
      const auto sidecar = parse_sidecar(serialize_sidecar(*res.sidecar));
      restored = restore_order(unpacked, sidecar);
      if (to_fastq_string(restored) != text) failure = fmt("file %zu: restored bytes differ", i);
    }
    if (failure.empty() && canonical(unpacked) != canonical(recs))
      failure = fmt("file %zu: sorted output is not the same multiset", i);
    ++files;
  }
  if (!failure.empty()) return {false, failure};
  return {true, fmt("%zu files, %.1f MB, %zu reordered", files, bytes / 1e6, sorted_files)};
}

// ---------------------------------------------------------------------------
// 2. Ensemble code length against the brute-force oracle.

Verdict estimator_oracle() {
  std::mt19937_64 rng(2);
  auto random_acgt = [&](std::size_t n) {
    std::string s(n, 'A');
    for (auto& c : s) c = "ACGT"[rng() % 4];
    return s;
  };
  const std::string training = random_acgt(600) + "AAAAAAAACCCCGGGGTTTTACGTACGT";
  const std::vector<int> orders{0, 1, 3, 6, 14};
  EnsembleConfig cfg;
  std::vector<oracle::Fcm> ref;
  for (int k : orders) {
    cfg.models.emplace_back(FcmConfig::make(k));
    oracle::Fcm m;
    m.order = k;
    m.train(training);
    ref.push_back(std::move(m));
  }
  ModelEnsemble ens(cfg);
  ens.train(to_symbols(training));
  ens.freeze();

  double worst = 0;
  std::size_t strings = 0;
  auto check = [&](const std::string& s) {
    worst = std::max(worst, std::abs(ens.code_length(to_symbols(s)) - oracle::code_length(ref, s)));
    ++strings;
  };
  for (int k = 0; k <= 6; ++k) {
    const std::size_t total = std::size_t{1} << (2 * k);
    for (std::size_t v = 0; v < total; ++v) {
      std::string s(static_cast<std::size_t>(k), 'A');
      for (int i = 0; i < k; ++i) s[i] = "ACGT"[(v >> (2 * i)) & 3];
      check(s);
    }
  }
  for (int i = 0; i < 200; ++i) check(random_acgt(rng() % 13));
  return {worst <= 1e-9, fmt("%zu strings, max |diff| = %.3g bits", strings, worst)};
}

// ---------------------------------------------------------------------------
// 3. Similarity and read-score formulas at their anchor points.

Verdict formula_contracts() {
  bool ok = true;
  for (std::size_t len : {std::size_t{1}, std::size_t{150}, std::size_t{20000}, std::size_t{123457}}) {
    const double l = static_cast<double>(len);
    ok &= similarity_from_bits(0.0, len) == 100.0;
    ok &= similarity_from_bits(2.0 * l, len) == 0.0;
    ok &= read_score_from_bits(l, len) == 0.5;
  }
  return {ok, "S(0)=100, S(2|x|)=0, R(|y|)=0.5"};
}

// ---------------------------------------------------------------------------
// 4. Filter separation with ground truth.

Verdict filter_separation() {
  const ReferenceDb db = gen_references(2, 20000, 4);
  SimConfig sim;
  sim.coverage = 20;
  sim.seed = 44;
  const SimulatedReads simulated = simulate_reads(db.entries, sim);

  // Ground truth goes through the TSV form.
  std::map<std::string, std::string> truth;
  {
    std::istringstream tsv(truth_tsv(simulated, db.entries));
    std::string line;
    std::getline(tsv, line);
    while (std::getline(tsv, line)) {
      const auto tab = line.find('\t');
      truth[line.substr(0, tab)] = line.substr(tab + 1);
    }
  }

  std::vector<FastqRecord> records = simulated.records;
  std::mt19937_64 rng(45);
  const std::size_t n_sim = records.size();
  for (int i = 0; i < 1000; ++i) {
    std::string seq(150, 'A');
    for (auto& c : seq) c = "ACGT"[rng() % 4];
    records.push_back({"@RANDOM:" + std::to_string(i), seq, "+", std::string(150, 'I')});
  }
  std::shuffle(records.begin(), records.end(), rng);

  const auto reads = map_reads(records, 0);
  ClassifyConfig ccfg;
  const ClassificationResult cls = classify(db, reads, ccfg);
  std::vector<FilterReference> selected;
  for (const auto& r : cls.selected())
    for (const auto& e : db.entries)
      if (e.id == r.ref_id) selected.push_back({e.id, map_sequence(e.sequence, reference_seed(0, e.id))});
  FilterConfig fcfg;
  fcfg.t2 = 0.5;
  const SortPlan plan = recursive_filter(reads, selected, fcfg);

  std::size_t sim_ok = 0, rnd_ok = 0, rnd_total = 0;
  for (const auto& g : plan.groups)
    for (auto i : g.read_indices) {
      const auto it = truth.find(records[i].header.substr(1));
      if (it != truth.end() && it->second == g.ref_id) ++sim_ok;
    }
  for (auto i : plan.residual)
    if (records[i].header.rfind("@RANDOM:", 0) == 0) ++rnd_ok;
  for (const auto& r : records) rnd_total += r.header.rfind("@RANDOM:", 0) == 0;
  const double sim_frac = static_cast<double>(sim_ok) / static_cast<double>(n_sim);
  const double rnd_frac = static_cast<double>(rnd_ok) / static_cast<double>(rnd_total);
  return {sim_frac >= 0.95 && rnd_frac >= 0.95 && cls.selected_count == 2,
          fmt("%zu selected refs, simulated in own group %.2f%%, random in residual %.2f%%", cls.selected_count,
              100 * sim_frac, 100 * rnd_frac)};
}

// ---------------------------------------------------------------------------
// 5-7, 10. Simulated datasets packed and unpacked through files.

struct Run {
  std::size_t refs = 0;
  double coverage = 0;
  std::uint64_t seed = 0;
  GainReport gain;
  double pack_seconds = 0;
  double unpack_seconds = 0;
  bool unpack_ok = false;
};

Run pack_dataset(const fs::path& root, std::size_t refs, double coverage, std::uint64_t seed) {
  Run run{refs, coverage, seed};
  const fs::path dir = root / fmt("r%zu-c%g-s%llu", refs, coverage, static_cast<unsigned long long>(seed));
  fs::create_directories(dir);
  const ReferenceDb db = gen_references(refs, 20000, derive_seed(seed, refs));
  SimConfig sim;
  sim.coverage = coverage;
  sim.seed = derive_seed(seed, 0x51);
  const auto reads = simulate_reads(db.entries, sim);
  {
    std::ofstream out(dir / "db.fa");
    write_fasta(db, out);
  }
  write_file_text(dir / "in.fq", to_fastq_string(reads.records));

  PipelineConfig cfg;
  cfg.db_path = dir / "db.fa";
  cfg.input_fastq = dir / "in.fq";
  cfg.work_dir = dir;
  cfg.seed = seed;
  auto t0 = Clock::now();
  const PackResult res = cmd_pack(cfg, PackOutputs{dir / "a.rsqz", dir / "a.order", dir / "report.json"});
  run.pack_seconds = seconds_since(t0);
  run.gain = *res.gain;

  fs::remove(dir / "db.fa");
  UnpackConfig un;
  un.archive = dir / "a.rsqz";
  un.sidecar = dir / "a.order";
  un.output = dir / "back.fq";
  un.work_dir = dir;
  t0 = Clock::now();
  try {
    cmd_unpack(un);
    run.unpack_seconds = seconds_since(t0);
    run.unpack_ok = slurp(dir / "back.fq") == slurp(dir / "in.fq");
  } catch (const std::exception& e) {
    std::fprintf(stderr, "unpack failed: %s\n", e.what());
  }
  fs::remove_all(dir);
  std::fprintf(stderr, "  refs=%zu cov=%g seed=%llu reads=%llu gain=%lld (seq %lld, hdr %lld, qual %lld) pack %.1fs unpack %.2fs\n",
               refs, coverage, static_cast<unsigned long long>(seed),
               static_cast<unsigned long long>(run.gain.reads), static_cast<long long>(run.gain.gain_bytes),
               static_cast<long long>(run.gain.sequences->gain()), static_cast<long long>(run.gain.headers->gain()),
               static_cast<long long>(run.gain.qualities->gain()), run.pack_seconds, run.unpack_seconds);
  return run;
}

double median_gain(const std::vector<Run>& runs, std::size_t refs, double coverage) {
  std::vector<double> g;
  for (const auto& r : runs)
    if (r.refs == refs && r.coverage == coverage) g.push_back(static_cast<double>(r.gain.gain_bytes));
  return median(g);
}

// ---------------------------------------------------------------------------
// 8. Sidecar size against the Stirling estimate.

Verdict order_cost() {
  std::mt19937_64 rng(8);
  bool ok = true;
  std::string detail;
  for (std::size_t n : {std::size_t{1000}, std::size_t{100000}}) {
    std::vector<std::size_t> perm(n);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    std::shuffle(perm.begin(), perm.end(), rng);
    const auto sc = encode_permutation(perm);
    const double bits = 8.0 * static_cast<double>(sc.payload.size());
    const double lo = stirling_order_bits(n);
    const double hi = static_cast<double>(n) * index_width(n) + 512;
    ok &= lo <= bits && bits <= hi && decode_permutation(sc) == perm;
    detail += fmt("n=%zu: %.0f <= %.0f <= %.0f; ", n, lo, bits, hi);
  }
  const double s1000 = stirling_order_bits(1000);
  ok &= std::abs(s1000 - 8523.09) <= 0.01;
  detail += fmt("stirling(1000) = %.4f", s1000);
  return {ok, detail};
}

// ---------------------------------------------------------------------------
// 9. Range coder tightness.

Verdict coder_tightness() {
  std::size_t ok = 0, decoded = 0;
  double worst_excess = -1e300;
  for (std::uint64_t i = 0; i < 100; ++i) {
    const auto o = coder_check::run_case(i);
    decoded += o.decoded;
    ok += coder_check::within_bound(o) && o.decoded;
    worst_excess = std::max(worst_excess, static_cast<double>(o.bytes) - o.model_bits / 8.0);
  }
  return {ok == 100, fmt("%zu/100 within bound, %zu/100 decoded exactly, worst excess %.1f bytes", ok, decoded,
                         worst_excess)};
}

struct Criterion {
  int number;
  const char* name;
  std::function<Verdict()> run;
};

}  // namespace

int main() {
  const fs::path root = scratch_root();
  std::vector<Run> runs;
  bool datasets_failed = false;
  std::string dataset_error;

  // Criterion 5 datasets, then the remaining coverage points for criterion 6.
  auto ensure_runs = [&]() {
    if (!runs.empty() || datasets_failed) return;
    try {
      for (std::size_t refs : {std::size_t{5}, std::size_t{20}, std::size_t{40}})
        for (std::uint64_t seed : {1, 2, 3}) runs.push_back(pack_dataset(root, refs, 50, seed));
      for (double cov : {2.0, 10.0})
        for (std::uint64_t seed : {1, 2, 3}) runs.push_back(pack_dataset(root, 20, cov, seed));
    } catch (const std::exception& e) {
      datasets_failed = true;
      dataset_error = e.what();
    }
  };
  auto dataset_guard = [&](auto body) -> Verdict {
    ensure_runs();
    if (datasets_failed) return {false, "dataset run failed: " + dataset_error};
    return body();
  };

  const std::vector<Criterion> criteria{
      {1, "losslessness over fuzz corpus", [&] { return losslessness(root); }},
      {2, "estimator matches brute-force oracle", estimator_oracle},
      {3, "similarity and read-score contracts", formula_contracts},
      {4, "filter separation", filter_separation},
      {5, "gain trend over reference count",
       [&] {
         return dataset_guard([&]() -> Verdict {
           const double g5 = median_gain(runs, 5, 50), g20 = median_gain(runs, 20, 50), g40 = median_gain(runs, 40, 50);
           return {g20 > 0 && g40 > 0 && g40 > g5,
                   fmt("median gain bytes: 5 refs %.0f, 20 refs %.0f, 40 refs %.0f", g5, g20, g40)};
         });
       }},
      {6, "gain trend over coverage",
       [&] {
         return dataset_guard([&]() -> Verdict {
           const double a = median_gain(runs, 20, 2), b = median_gain(runs, 20, 10), c = median_gain(runs, 20, 50);
           return {a < b && b < c, fmt("median gain bytes: cov 2 %.0f, cov 10 %.0f, cov 50 %.0f", a, b, c)};
         });
       }},
      {7, "sequence channel gain exceeds header gain",
       [&] {
         return dataset_guard([&]() -> Verdict {
           bool ok = true;
           std::string detail;
           for (const auto& r : runs) {
             if (r.refs != 20 || r.coverage != 50) continue;
             const auto seq = r.gain.sequences->gain(), hdr = r.gain.headers->gain();
             ok &= seq > 0 && seq > hdr;
             detail += fmt("seed %llu: sequences %lld, headers %lld; ", static_cast<unsigned long long>(r.seed),
                           static_cast<long long>(seq), static_cast<long long>(hdr));
           }
           return {ok, detail};
         });
       }},
      {8, "order cost bounds", order_cost},
      {9, "range coder tightness", coder_tightness},
      {10, "unpack without database, under 10% of pack time",
       [&] {
         return dataset_guard([&]() -> Verdict {
           bool ok = true;
           double worst = 0;
           std::string detail;
           for (const auto& r : runs) {
             if (r.coverage != 50) continue;
             const double ratio = r.unpack_seconds / r.pack_seconds;
             ok &= r.unpack_ok && ratio < 0.10;
             worst = std::max(worst, ratio);
             detail += fmt("%zu/%llu %.1f%%%s; ", r.refs, static_cast<unsigned long long>(r.seed), 100 * ratio,
                           r.unpack_ok ? "" : " (unpack failed)");
           }
           return {ok, fmt("worst ratio %.1f%%; ", 100 * worst) + detail};
         });
       }},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = seconds_since(t0);
    std::printf("criterion %2d: %s  %s [%.1fs] %s\n", c.number, v.pass ? "PASS" : "FAIL", c.name, secs,
                v.detail.c_str());
    std::fflush(stdout);
    failed += !v.pass;
  }
  fs::remove_all(root);
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
