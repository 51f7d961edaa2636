#include "readsort/classification.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>
#include <unordered_set>

#include "readsort/error.hpp"
#include "readsort/hash.hpp"
#include "readsort/input.hpp"
#include "readsort/parallel.hpp"

namespace readsort {

ReferenceDb parse_fasta(std::istream& in) {
  ReferenceDb db;
  std::unordered_set<std::string> seen;
  std::string line;
  ReferenceEntry* current = nullptr;
  std::size_t line_no = 0;

  auto close_current = [&] {
    if (current != nullptr && current->sequence.empty())
      throw Error(ErrorCode::MalformedFasta, "record '" + current->id + "' has an empty sequence");
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line.front() == '>') {
      close_current();
      std::size_t b = 1;
      while (b < line.size() && std::isspace(static_cast<unsigned char>(line[b]))) ++b;
      std::size_t e = b;
      while (e < line.size() && !std::isspace(static_cast<unsigned char>(line[e]))) ++e;
      std::string id = line.substr(b, e - b);
      if (id.empty()) throw Error(ErrorCode::MalformedFasta, "line " + std::to_string(line_no) + ": empty id");
      if (!seen.insert(id).second) throw Error(ErrorCode::MalformedFasta, "duplicate id '" + id + "'");
      db.entries.push_back(ReferenceEntry{std::move(id), {}});
      current = &db.entries.back();
      continue;
    }
    if (current == nullptr)
      throw Error(ErrorCode::MalformedFasta, "line " + std::to_string(line_no) + ": sequence before first '>'");
    for (char c : line) {
      if (std::isspace(static_cast<unsigned char>(c))) continue;
      current->sequence.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(c))));
    }
  }
  if (in.bad()) throw Error(ErrorCode::IoFailure, "read error on FASTA stream");
  close_current();
  if (db.entries.empty()) throw Error(ErrorCode::EmptyDb, "database contains no records");
  for (const auto& e : db.entries) db.total_bases += e.sequence.size();
  return db;
}

ReferenceDb load_db(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_fasta(*in);
}

void write_fasta(const ReferenceDb& db, std::ostream& out, std::size_t line_width) {
  for (const auto& e : db.entries) {
    out << '>' << e.id << '\n';
    for (std::size_t i = 0; i < e.sequence.size(); i += line_width)
      out << std::string_view(e.sequence).substr(i, line_width) << '\n';
  }
}

std::uint64_t reference_seed(std::uint64_t seed, std::string_view id) noexcept {
  return derive_seed(seed ^ 0x5245464552454e43ULL, fnv1a(id));
}

std::uint64_t read_seed(std::uint64_t seed, std::size_t index) noexcept { return derive_seed(seed, index); }

std::vector<SymbolString> map_reads(std::span<const FastqRecord> records, std::uint64_t seed, int threads) {
  std::vector<SymbolString> out(records.size());
  parallel_for(records.size(), threads,
               [&](std::size_t i) { out[i] = map_sequence(records[i].sequence, read_seed(seed, i)); });
  return out;
}

double relative_compression(std::span<const Symbol> x, const ModelEnsemble& frozen) {
  return frozen.code_length(x);
}

double similarity_from_bits(double bits, std::size_t length) {
  if (length == 0) throw Error(ErrorCode::EmptyReference, "similarity of an empty sequence is undefined");
  return (1.0 - bits / (static_cast<double>(length) * Alphabet::log2_size)) * 100.0;
}

double similarity(std::span<const Symbol> x, const ModelEnsemble& frozen) {
  if (x.empty()) throw Error(ErrorCode::EmptyReference, "similarity of an empty sequence is undefined");
  return similarity_from_bits(relative_compression(x, frozen), x.size());
}

void rank(ClassificationResult& result) {
  std::sort(result.ranked.begin(), result.ranked.end(), [](const RankedReference& a, const RankedReference& b) {
    if (a.similarity != b.similarity) return a.similarity > b.similarity;
    return a.ref_id < b.ref_id;
  });
  result.selected_count = static_cast<std::size_t>(
      std::count_if(result.ranked.begin(), result.ranked.end(),
                    [&](const RankedReference& r) { return r.similarity > result.threshold_t1; }));
}

namespace {

ClassificationResult score_references(const ReferenceDb& db, const ModelEnsemble& frozen, const ClassifyConfig& cfg) {
  ClassificationResult result;
  result.threshold_t1 = cfg.t1;
  result.ranked.resize(db.entries.size());
  parallel_for(db.entries.size(), cfg.threads, [&](std::size_t i) {
    const auto& e = db.entries[i];
    const SymbolString x = map_sequence(e.sequence, reference_seed(cfg.seed, e.id));
    const double bits = relative_compression(x, frozen);
    result.ranked[i] = RankedReference{e.id, similarity_from_bits(bits, x.size()), bits, x.size()};
  });
  rank(result);
  return result;
}

}  // namespace

ClassificationResult classify(const ReferenceDb& db, std::span<const SymbolString> reads, const ClassifyConfig& cfg) {
  if (db.entries.empty()) throw Error(ErrorCode::EmptyDb, "database contains no records");
  ModelEnsemble ensemble(cfg.ensemble);
  for (const auto& r : reads) ensemble.train(r);
  ensemble.freeze();
  return score_references(db, ensemble, cfg);
}

ClassificationResult classify(const ReferenceDb& db, std::istream& fastq, const ClassifyConfig& cfg) {
  if (db.entries.empty()) throw Error(ErrorCode::EmptyDb, "database contains no records");
  ModelEnsemble ensemble(cfg.ensemble);
  FastqReader reader(fastq);
  std::size_t index = 0;
  while (auto rec = reader.next()) ensemble.train(map_sequence(rec->sequence, read_seed(cfg.seed, index++)));
  ensemble.freeze();
  return score_references(db, ensemble, cfg);
}

std::string to_tsv(const ClassificationResult& result) {
  std::ostringstream out;
  out << "ref_id\tsimilarity\tbits\n";
  char buf[64];
  for (const auto& r : result.ranked) {
    std::snprintf(buf, sizeof buf, "\t%.6f\t%.3f\n", r.similarity, r.bits);
    out << r.ref_id << buf;
  }
  return std::move(out).str();
}

}  // namespace readsort
