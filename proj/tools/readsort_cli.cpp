// readsort: classify, reorder and compress metagenomic FASTQ files.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "readsort/input.hpp"
#include "readsort/pipeline.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace readsort;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitData = 3;
constexpr int kExitTool = 4;

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::ToolMissing:
    case ErrorCode::ToolFailed:
      return kExitTool;
    case ErrorCode::InvalidConfig:
      return kExitUsage;
    default:
      return kExitData;
  }
}

FcmConfig fcm_from_json(const json& j) {
  FcmConfig c = FcmConfig::make(j.at("order").get<int>(), j.value("alpha", 1.0 / 16));
  c.hashed = j.value("hashed", c.hashed);
  c.max_table_bits = j.value("max_table_bits", c.max_table_bits);
  c.max_count = j.value("max_count", c.max_count);
  return c;
}

EnsembleConfig ensemble_from_json(const json& j) {
  EnsembleConfig cfg;
  cfg.gamma = j.value("gamma", cfg.gamma);
  for (const auto& m : j.at("models")) {
    const std::string type = m.value("type", "fcm");
    if (type == "fcm") {
      cfg.models.emplace_back(fcm_from_json(m));
    } else if (type == "stcm") {
      StcmConfig s;
      s.base = fcm_from_json(m);
      s.max_substitutions = m.value("max_substitutions", s.max_substitutions);
      s.fallback_alpha = m.value("fallback_alpha", s.fallback_alpha);
      cfg.models.emplace_back(s);
    } else {
      throw Error(ErrorCode::InvalidConfig, "unknown model type '" + type + "'");
    }
  }
  cfg.validate();
  return cfg;
}

/// {"analysis": {ensemble}, "compression": {ensemble}}; either key optional.
void load_config(const std::string& path, PipelineConfig& cfg) {
  if (path.empty()) return;
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoFailure, "cannot open config " + path);
  try {
    const json j = json::parse(in);
    if (j.contains("analysis")) cfg.ensemble = ensemble_from_json(j["analysis"]);
    if (j.contains("compression")) cfg.codec.dna = ensemble_from_json(j["compression"]);
  } catch (const json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("config ") + path + ": " + e.what());
  }
}

BackendSpec backend_from(const std::string& kind, const std::string& cmd) {
  if (kind == "builtin") {
    if (!cmd.empty()) throw Error(ErrorCode::InvalidConfig, "--cmd requires --backend external");
    return BackendSpec::builtin();
  }
  if (cmd.empty()) throw Error(ErrorCode::InvalidConfig, "--backend external requires --cmd");
  auto spec = BackendSpec::from_command(cmd);
  spec.validate();
  return spec;
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

struct Common {
  std::string db, input, output, config, backend = "builtin", cmd, work_dir;
  double t1 = 50.0, t2 = 0.5;
  int threads = 1;
  std::uint64_t seed = 0;

  void add_analysis(CLI::App* app) {
    app->add_option("--t1", t1, "Similarity threshold in percent (select S > T1)");
    app->add_option("--t2", t2, "Read score threshold (filter R <= T2)")->check(CLI::NonNegativeNumber);
    app->add_option("--seed", seed, "Seed for mapping non-ACGT bases");
    app->add_option("--config", config, "JSON file with 'analysis' and/or 'compression' ensembles");
  }
  void add_runtime(CLI::App* app) {
    app->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
    app->add_option("--work-dir", work_dir, "Directory for temporary files (default $READSORT_WORKDIR or /tmp)");
  }

  PipelineConfig pipeline() const {
    PipelineConfig cfg;
    cfg.db_path = db;
    cfg.input_fastq = input;
    cfg.t1 = t1;
    cfg.t2 = t2;
    cfg.threads = threads;
    cfg.seed = seed;
    cfg.work_dir = work_dir.empty() ? default_work_dir() : fs::path(work_dir);
    cfg.backend = backend_from(backend, cmd);
    load_config(config, cfg);
    return cfg;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compression-based classification, read reordering and FASTQ compression"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "readsort 0.1.0");

  Common opt;

  auto* classify_cmd = app.add_subcommand("classify", "Rank database references by similarity to the reads");
  classify_cmd->add_option("--db", opt.db, "Reference multi-FASTA")->required();
  classify_cmd->add_option("-i,--in", opt.input, "Reads (FASTQ, optionally gzip)")->required();
  classify_cmd->add_option("-o,--out", opt.output, "TSV output (default stdout)");
  opt.add_analysis(classify_cmd);
  opt.add_runtime(classify_cmd);

  std::string sidecar, report;
  bool no_sidecar = false, no_gain = false, dump_passes = false, single_strand = false;
  auto* pack_cmd = app.add_subcommand("pack", "Classify, sort and compress a FASTQ file");
  pack_cmd->add_option("--db", opt.db, "Reference multi-FASTA (omit to compress without sorting)");
  pack_cmd->add_option("-i,--in", opt.input, "Reads (FASTQ, optionally gzip)")->required();
  pack_cmd->add_option("-o,--out", opt.output, "Archive path")->required();
  pack_cmd->add_option("--sidecar", sidecar, "Order sidecar path (default <archive>.order)");
  pack_cmd->add_flag("--no-sidecar", no_sidecar, "Do not store the original read order");
  pack_cmd->add_option("--report", report, "JSON report path");
  pack_cmd->add_option("--backend", opt.backend, "builtin or external")->check(CLI::IsMember({"builtin", "external"}));
  pack_cmd->add_option("--cmd", opt.cmd, "External template with {in} and {out}, or gzip|bzip2|xz|zstd");
  pack_cmd->add_flag("--no-gain", no_gain, "Skip compressing the original order for the report");
  pack_cmd->add_flag("--dump-passes", dump_passes, "Keep per-pass filtered/unfiltered FASTQ in the work dir");
  pack_cmd->add_flag("--single-strand", single_strand, "Train reference models on the forward strand only");
  opt.add_analysis(pack_cmd);
  opt.add_runtime(pack_cmd);

  auto* unpack_cmd = app.add_subcommand("unpack", "Decompress an archive, restoring the original order if a sidecar is given");
  unpack_cmd->add_option("-i,--in", opt.input, "Archive")->required();
  unpack_cmd->add_option("-o,--out", opt.output, "FASTQ output")->required();
  unpack_cmd->add_option("--sidecar", sidecar, "Order sidecar written by pack");
  unpack_cmd->add_option("--backend", opt.backend, "builtin or external")->check(CLI::IsMember({"builtin", "external"}));
  unpack_cmd->add_option("--cmd", opt.cmd, "External decompress template, or gzip|bzip2|xz|zstd");
  opt.add_runtime(unpack_cmd);

  SimConfig sim;
  std::size_t sim_refs = 10, genome_len = 20000;
  std::string truth, db_out, sim_db;
  bool single_end = false;
  auto* sim_cmd = app.add_subcommand("simulate", "Simulate paired-end reads from synthetic or given genomes");
  sim_cmd->add_option("-o,--out", opt.output, "FASTQ output")->required();
  sim_cmd->add_option("--db", sim_db, "Simulate from this multi-FASTA instead of synthetic genomes");
  sim_cmd->add_option("--refs", sim_refs, "Number of synthetic genomes")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--genome-len", genome_len, "Length of each synthetic genome")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--db-out", db_out, "Write the synthetic genomes as multi-FASTA");
  sim_cmd->add_option("--truth", truth, "Write read_id/ref_id TSV");
  sim_cmd->add_option("--coverage", sim.coverage, "Coverage depth")->check(CLI::PositiveNumber);
  sim_cmd->add_option("--read-len", sim.read_len, "Read length");
  sim_cmd->add_option("--insert-mean", sim.insert_mean, "Mean fragment length");
  sim_cmd->add_option("--insert-sd", sim.insert_sd, "Fragment length standard deviation");
  sim_cmd->add_option("--error-rate", sim.sub_error_rate, "Substitution rate");
  sim_cmd->add_flag("--single", single_end, "Single-end reads");
  sim_cmd->add_option("--seed", sim.seed, "Seed");
  sim_cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  std::string axis = "coverage", grid, seeds = "1";
  BenchConfig bench;
  auto* bench_cmd = app.add_subcommand("bench", "Gain of sorting over a grid of coverages or reference counts (CSV)");
  bench_cmd->add_option("--axis", axis, "coverage or references")->check(CLI::IsMember({"coverage", "references"}));
  bench_cmd->add_option("--grid", grid, "Comma-separated grid values");
  bench_cmd->add_option("--refs", bench.references, "References on the coverage axis");
  bench_cmd->add_option("--coverage", bench.coverage, "Coverage on the references axis");
  bench_cmd->add_option("--genome-len", bench.genome_length, "Synthetic genome length");
  bench_cmd->add_option("--seeds", seeds, "Comma-separated seeds, one row per grid value and seed");
  bench_cmd->add_option("-o,--out", opt.output, "CSV output (default stdout)");
  bench_cmd->add_option("--t1", opt.t1, "Similarity threshold");
  bench_cmd->add_option("--t2", opt.t2, "Read score threshold");
  bench_cmd->add_option("--config", opt.config, "JSON ensemble config");
  bench_cmd->add_option("--threads", opt.threads, "Worker threads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*classify_cmd) {
      const auto result = cmd_classify(opt.pipeline());
      const std::string tsv = to_tsv(result);
      if (opt.output.empty())
        std::cout << tsv;
      else
        write_file_text(opt.output, tsv);
    } else if (*pack_cmd) {
      PipelineConfig cfg = opt.pipeline();
      cfg.lossless_order = !no_sidecar;
      cfg.compute_gain = !no_gain;
      cfg.dump_passes = dump_passes;
      cfg.both_strands = !single_strand;
      PackOutputs out;
      out.archive = opt.output;
      if (!no_sidecar) out.sidecar = sidecar.empty() ? fs::path(opt.output + ".order") : fs::path(sidecar);
      if (!report.empty()) out.report = report;
      const auto result = cmd_pack(cfg, out);
      for (const auto& note : result.notes) std::cerr << "note: " << note << '\n';
      std::cerr << "packed " << result.reads << " reads into " << result.archive_bytes << " bytes";
      if (result.gain) std::cerr << " (gain " << result.gain->gain_bytes << " bytes)";
      std::cerr << '\n';
    } else if (*unpack_cmd) {
      UnpackConfig cfg;
      cfg.archive = opt.input;
      cfg.output = opt.output;
      if (!sidecar.empty()) cfg.sidecar = sidecar;
      cfg.backend = backend_from(opt.backend, opt.cmd);
      cfg.threads = opt.threads;
      cfg.work_dir = opt.work_dir.empty() ? default_work_dir() : fs::path(opt.work_dir);
      cmd_unpack(cfg);
    } else if (*sim_cmd) {
      sim.paired = !single_end;
      ReferenceDb db = sim_db.empty() ? gen_references(sim_refs, genome_len, sim.seed) : load_db(sim_db);
      const auto reads = simulate_reads(db.entries, sim, opt.threads);
      std::ofstream out(opt.output, std::ios::binary);
      if (!out) throw Error(ErrorCode::IoFailure, "cannot open " + opt.output);
      write_fastq(reads.records, out);
      if (!truth.empty()) write_file_text(truth, truth_tsv(reads, db.entries));
      if (!db_out.empty()) {
        std::ofstream fa(db_out);
        if (!fa) throw Error(ErrorCode::IoFailure, "cannot open " + db_out);
        write_fasta(db, fa);
      }
    } else if (*bench_cmd) {
      PipelineConfig base;
      base.t1 = opt.t1;
      base.t2 = opt.t2;
      base.threads = opt.threads;
      load_config(opt.config, base);
      bench.pipeline = base;
      bench.axis = axis == "coverage" ? BenchAxis::Coverage : BenchAxis::References;
      for (const auto& v : split_list(grid)) bench.grid.push_back(std::stod(v));
      bench.seeds.clear();
      for (const auto& v : split_list(seeds)) bench.seeds.push_back(std::stoull(v));
      const std::string csv = cmd_bench(bench);
      if (opt.output.empty())
        std::cout << csv;
      else
        write_file_text(opt.output, csv);
    }
  } catch (const StageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_code_for(e.code());
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: invalid number: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitData;
  }
  return kExitOk;
}
