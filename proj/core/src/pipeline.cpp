#include "readsort/pipeline.hpp"

#include <unistd.h>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <cstring>
#include <fstream>
#include <new>
#include <unordered_map>

#include <json.hpp>

#include "readsort/hash.hpp"
#include "readsort/input.hpp"

namespace readsort {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

template <typename Fn>
auto stage(const char* name, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const Error& e) {
    throw StageError(name, e.code(), e.what());
  } catch (const std::bad_alloc&) {
    throw StageError(name, ErrorCode::IoFailure, "out of memory");
  } catch (const fs::filesystem_error& e) {
    throw StageError(name, ErrorCode::IoFailure, e.what());
  }
}

/// Private subdirectory of the work dir; removed on success, kept on failure.
class ScratchDir {
 public:
  explicit ScratchDir(const fs::path& root) {
    static std::atomic<unsigned> counter{0};
    path_ = (root.empty() ? default_work_dir() : root) /
            ("readsort-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
    fs::create_directories(path_);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;
  ~ScratchDir() {
    if (!success_ || keep_) return;
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
  [[nodiscard]] const fs::path& path() const noexcept { return path_; }
  void keep() noexcept { keep_ = true; }
  void succeeded() noexcept { success_ = true; }

 private:
  fs::path path_;
  bool keep_ = false;
  bool success_ = false;
};

std::vector<FastqRecord> read_records(const fs::path& path) {
  auto in = open_input(path);
  return parse_fastq(*in);
}

void write_records(const fs::path& path, std::span<const FastqRecord> records) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + path.string() + " for writing");
  write_fastq(records, out);
  out.flush();
  if (!out) throw Error(ErrorCode::IoFailure, "write failed: " + path.string());
}

bool is_identity(std::span<const std::size_t> perm) {
  for (std::size_t i = 0; i < perm.size(); ++i)
    if (perm[i] != i) return false;
  return true;
}

json gain_json(const GainReport& g) {
  json j{{"original_compressed_bytes", g.original_compressed_bytes},
         {"sorted_compressed_bytes", g.sorted_compressed_bytes},
         {"gain_bytes", g.gain_bytes},
         {"gain_percent", g.gain_percent},
         {"sidecar_bytes", g.sidecar_bytes},
         {"stirling_bits", g.stirling_bits},
         {"adjusted_gain_bytes", g.adjusted_gain_bytes},
         {"stirling_adjusted_gain_bytes", g.stirling_adjusted_gain_bytes}};
  if (g.headers) {
    json channels;
    const std::pair<const char*, const std::optional<ChannelSizes>*> parts[] = {
        {"headers", &g.headers}, {"sequences", &g.sequences}, {"qualities", &g.qualities}};
    for (const auto& [name, c] : parts)
      channels[name] = {{"original", (*c)->original}, {"sorted", (*c)->sorted}, {"gain_bytes", (*c)->gain()}};
    j["per_channel"] = channels;
  }
  return j;
}

}  // namespace

fs::path default_work_dir() {
  if (const char* env = std::getenv("READSORT_WORKDIR"); env != nullptr && *env != '\0') return env;
  return fs::temp_directory_path();
}

std::vector<std::string> PipelineConfig::validate() const {
  std::vector<std::string> warnings;
  if (std::isnan(t1) || t1 > 100.0) throw Error(ErrorCode::InvalidConfig, "t1 must be at most 100");
  if (t1 < 0.0) warnings.push_back("t1 below 0 selects every reference");
  if (!(t2 >= 0.0)) throw Error(ErrorCode::InvalidConfig, "t2 must be non-negative");
  if (threads < 1) throw Error(ErrorCode::InvalidConfig, "threads must be at least 1");
  ensemble.validate();
  codec.dna.validate();
  backend.validate();
  return warnings;
}

PackResult pack_records(std::span<const FastqRecord> records, const ReferenceDb& db, const PipelineConfig& cfg,
                        const PassObserver& observer) {
  const auto t_start = Clock::now();
  PackResult result;
  result.reads = records.size();
  result.classification.threshold_t1 = cfg.t1;

  auto t0 = Clock::now();
  std::vector<SymbolString> reads = map_reads(records, cfg.seed, cfg.threads);
  if (db.entries.empty()) {
    result.notes.push_back("no reference database");
  } else {
    stage("classification", [&] {
      ClassifyConfig cc;
      cc.ensemble = cfg.ensemble;
      cc.t1 = cfg.t1;
      cc.seed = cfg.seed;
      cc.threads = cfg.threads;
      result.classification = classify(db, reads, cc);
    });
  }
  result.seconds.classify = since(t0);

  t0 = Clock::now();
  const auto selected = result.classification.selected();
  if (selected.empty()) {
    if (!db.entries.empty()) result.notes.push_back("no references above T1");
    result.plan = SortPlan::identity(records.size());
  } else {
    stage("filtering", [&] {
      std::unordered_map<std::string_view, const ReferenceEntry*> by_id;
      for (const auto& e : db.entries) by_id.emplace(e.id, &e);
      std::vector<FilterReference> refs;
      refs.reserve(selected.size());
      for (const auto& r : selected) {
        const ReferenceEntry& e = *by_id.at(r.ref_id);
        refs.push_back(FilterReference{e.id, map_sequence(e.sequence, reference_seed(cfg.seed, e.id))});
      }
      FilterConfig fc;
      fc.ensemble = cfg.ensemble;
      fc.t2 = cfg.t2;
      fc.both_strands = cfg.both_strands;
      fc.threads = cfg.threads;
      result.plan = recursive_filter(reads, refs, fc, observer);
    });
  }
  reads.clear();
  reads.shrink_to_fit();
  result.seconds.filter = since(t0);

  if (cfg.lossless_order)
    result.sidecar = encode_permutation(result.plan.permutation, order_checksum(records));
  const std::uint64_t sidecar_bytes =
      result.sidecar ? PermutationSidecar::kHeaderBytes + result.sidecar->payload.size() : 0;

  if (cfg.backend.kind == BackendKind::Builtin) {
    t0 = Clock::now();
    CodecConfig codec = cfg.codec;
    codec.threads = cfg.threads;
    const bool identity = is_identity(result.plan.permutation);
    stage("compression", [&] {
      if (identity) {
        result.archive = builtin_compress(records, codec);
      } else {
        const auto sorted = apply_plan(records, result.plan);
        result.archive = builtin_compress(sorted, codec);
      }
    });
    result.archive_bytes = result.archive.size();
    result.seconds.compress = since(t0);

    if (cfg.compute_gain) {
      t0 = Clock::now();
      stage("gain", [&] {
        if (identity) {
          result.gain = builtin_gain_report(result.archive, result.archive, sidecar_bytes, records.size());
        } else {
          const auto original = builtin_compress(records, codec);
          result.gain = builtin_gain_report(original, result.archive, sidecar_bytes, records.size());
        }
      });
      result.seconds.gain = since(t0);
    }
  }
  result.seconds.total = since(t_start);
  return result;
}

PackResult cmd_pack(const PipelineConfig& cfg, const PackOutputs& out) {
  const auto t_start = Clock::now();
  const auto warnings = stage("config", [&] {
    auto w = cfg.validate();
    if (cfg.lossless_order && !out.sidecar)
      throw Error(ErrorCode::InvalidConfig, "a sidecar path is required unless the sidecar is disabled");
    return w;
  });
  ScratchDir scratch(cfg.work_dir);
  if (cfg.dump_passes) scratch.keep();

  auto t0 = Clock::now();
  const auto records = stage("input", [&] { return read_records(cfg.input_fastq); });
  const double read_seconds = since(t0);
  // No database: the file is compressed in its original order.
  const ReferenceDb db =
      cfg.db_path.empty() ? ReferenceDb{} : stage("classification", [&] { return load_db(cfg.db_path); });

  PassObserver observer;
  std::vector<SymbolString> unused;
  if (cfg.dump_passes) {
    observer = [&](std::size_t pass, const FilterReference& ref, const FilterSplit& split) {
      const auto dump = [&](const char* kind, const std::vector<std::size_t>& idx) {
        std::vector<FastqRecord> part;
        part.reserve(idx.size());
        for (auto i : idx) part.push_back(records[i]);
        write_records(scratch.path() / ("pass" + std::to_string(pass + 1) + "_" + ref.id + "_" + kind + ".fastq"),
                      part);
      };
      dump("filtered", split.filtered);
      dump("unfiltered", split.unfiltered);
    };
  }

  PackResult result = pack_records(records, db, cfg, observer);
  result.seconds.read = read_seconds;
  for (const auto& w : warnings) result.notes.push_back("warning: " + w);

  stage("output", [&] {
    if (cfg.backend.kind == BackendKind::Builtin) {
      write_file_bytes(out.archive, result.archive);
    } else {
      const auto t = Clock::now();
      const fs::path sorted_path = scratch.path() / "sorted.fastq";
      write_records(sorted_path, apply_plan(records, result.plan));
      result.archive_bytes = stage("compression", [&] { return external_compress(cfg.backend, sorted_path, out.archive); });
      result.seconds.compress = since(t);
      if (cfg.compute_gain) {
        const auto tg = Clock::now();
        const fs::path original_path = scratch.path() / "original.fastq";
        write_records(original_path, records);
        const std::uint64_t original_bytes = stage(
            "gain", [&] { return external_compress(cfg.backend, original_path, scratch.path() / "original.cmp"); });
        const std::uint64_t sidecar_bytes =
            result.sidecar ? PermutationSidecar::kHeaderBytes + result.sidecar->payload.size() : 0;
        result.gain = make_gain_report(original_bytes, result.archive_bytes, sidecar_bytes, records.size());
        result.seconds.gain = since(tg);
      }
    }
    if (result.sidecar && out.sidecar) write_file_bytes(*out.sidecar, serialize_sidecar(*result.sidecar));
    result.seconds.total = since(t_start);
    if (out.report) write_file_text(*out.report, pack_report_json(result, cfg));
  });
  scratch.succeeded();
  return result;
}

std::string pack_report_json(const PackResult& r, const PipelineConfig& cfg) {
  json j;
  j["input"] = cfg.input_fastq.string();
  j["db"] = cfg.db_path.string();
  j["reads"] = r.reads;
  j["thresholds"] = {{"t1", cfg.t1}, {"t2", cfg.t2}};
  j["seed"] = cfg.seed;
  j["threads"] = cfg.threads;
  j["backend"] = cfg.backend.kind == BackendKind::Builtin ? "builtin" : "external";
  if (cfg.backend.kind == BackendKind::External) j["command"] = cfg.backend.command_template;

  json ranked = json::array();
  for (const auto& e : r.classification.ranked)
    ranked.push_back({{"ref_id", e.ref_id}, {"similarity", e.similarity}, {"bits", e.bits}, {"length", e.length}});
  j["classification"] = {{"references", r.classification.ranked.size()},
                         {"selected", r.classification.selected_count},
                         {"ranked", ranked}};

  json groups = json::array();
  for (const auto& g : r.plan.groups) groups.push_back({{"ref_id", g.ref_id}, {"reads", g.read_indices.size()}});
  j["plan"] = {{"groups", groups}, {"residual", r.plan.residual.size()}};

  j["archive_bytes"] = r.archive_bytes;
  j["sidecar_bytes"] = r.sidecar ? PermutationSidecar::kHeaderBytes + r.sidecar->payload.size() : 0;
  if (r.gain) j["gain"] = gain_json(*r.gain);
  j["notes"] = r.notes;
  j["seconds"] = {{"read", r.seconds.read},         {"classify", r.seconds.classify},
                  {"filter", r.seconds.filter},     {"compress", r.seconds.compress},
                  {"gain", r.seconds.gain},         {"total", r.seconds.total}};
  return j.dump(2) + "\n";
}

void cmd_unpack(const UnpackConfig& cfg) {
  ScratchDir scratch(cfg.work_dir);
  const auto blob = stage("input", [&] { return read_file_bytes(cfg.archive); });
  const bool builtin = blob.size() >= 4 && std::memcmp(blob.data(), "RSQZ", 4) == 0;

  std::vector<FastqRecord> records = stage("decompression", [&] {
    if (builtin) return builtin_decompress(blob, cfg.threads);
    if (cfg.backend.kind != BackendKind::External)
      throw Error(ErrorCode::CorruptContainer, "not a builtin container; use the external backend to unpack it");
    const fs::path plain = scratch.path() / "unpacked.fastq";
    external_decompress(cfg.backend, cfg.archive, plain);
    return read_records(plain);
  });

  if (cfg.sidecar) {
    records = stage("restore", [&] {
      const auto side = parse_sidecar(read_file_bytes(*cfg.sidecar));
      return restore_order(records, side);
    });
  }
  stage("output", [&] { write_records(cfg.output, records); });
  scratch.succeeded();
}

ClassificationResult cmd_classify(const PipelineConfig& cfg) {
  stage("config", [&] { return cfg.validate(); });
  const ReferenceDb db = stage("classification", [&] { return load_db(cfg.db_path); });
  return stage("classification", [&] {
    auto in = open_input(cfg.input_fastq);
    ClassifyConfig cc;
    cc.ensemble = cfg.ensemble;
    cc.t1 = cfg.t1;
    cc.seed = cfg.seed;
    cc.threads = cfg.threads;
    return classify(db, *in, cc);
  });
}

std::vector<BenchRow> run_bench(const BenchConfig& cfg) {
  std::vector<BenchRow> rows;
  for (double value : cfg.grid) {
    for (std::uint64_t seed : cfg.seeds) {
      std::size_t nrefs = cfg.references;
      double coverage = cfg.coverage;
      if (cfg.axis == BenchAxis::Coverage) {
        coverage = value;
      } else {
        if (!(value >= 1.0)) throw Error(ErrorCode::InvalidConfig, "reference counts must be at least 1");
        nrefs = static_cast<std::size_t>(value);
      }
      const ReferenceDb db = gen_references(nrefs, cfg.genome_length, seed);
      SimConfig sim = cfg.sim;
      sim.coverage = coverage;
      sim.seed = derive_seed(seed, 0x51u);
      const auto reads = simulate_reads(db.entries, sim, cfg.pipeline.threads);

      PipelineConfig pc = cfg.pipeline;
      pc.seed = seed;
      pc.backend = BackendSpec::builtin();
      pc.compute_gain = true;
      const auto t0 = Clock::now();
      const PackResult packed = pack_records(reads.records, db, pc);
      const double pack_seconds = since(t0);

      const auto t1 = Clock::now();
      auto restored = builtin_decompress(packed.archive, pc.threads);
      if (packed.sidecar) restored = restore_order(restored, *packed.sidecar);
      const double unpack_seconds = since(t1);

      BenchRow row;
      row.value = value;
      row.seed = seed;
      row.selected = packed.classification.selected_count;
      row.gain = *packed.gain;
      row.pack_seconds = pack_seconds;
      row.unpack_seconds = unpack_seconds;
      rows.push_back(row);
    }
  }
  return rows;
}

std::string bench_csv(BenchAxis axis, std::span<const BenchRow> rows) {
  std::string out = axis == BenchAxis::Coverage ? "coverage" : "references";
  out +=
      ",seed,reads,selected_refs,original_bytes,sorted_bytes,gain_bytes,gain_percent,sidecar_bytes,stirling_bits,"
      "adjusted_gain_bytes,headers_gain,sequences_gain,qualities_gain,pack_seconds,unpack_seconds\n";
  char line[512];
  for (const auto& r : rows) {
    const auto& g = r.gain;
    std::snprintf(line, sizeof line, "%g,%llu,%llu,%zu,%llu,%llu,%lld,%.4f,%llu,%.2f,%lld,%lld,%lld,%lld,%.3f,%.3f\n",
                  r.value, static_cast<unsigned long long>(r.seed), static_cast<unsigned long long>(g.reads),
                  r.selected, static_cast<unsigned long long>(g.original_compressed_bytes),
                  static_cast<unsigned long long>(g.sorted_compressed_bytes), static_cast<long long>(g.gain_bytes),
                  g.gain_percent, static_cast<unsigned long long>(g.sidecar_bytes), g.stirling_bits,
                  static_cast<long long>(g.adjusted_gain_bytes),
                  static_cast<long long>(g.headers ? g.headers->gain() : 0),
                  static_cast<long long>(g.sequences ? g.sequences->gain() : 0),
                  static_cast<long long>(g.qualities ? g.qualities->gain() : 0), r.pack_seconds, r.unpack_seconds);
    out += line;
  }
  return out;
}

std::string cmd_bench(const BenchConfig& cfg) {
  const auto rows = stage("bench", [&] { return run_bench(cfg); });
  return bench_csv(cfg.axis, rows);
}

}  // namespace readsort
