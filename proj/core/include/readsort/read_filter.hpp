#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "readsort/alphabet.hpp"
#include "readsort/context_model.hpp"
#include "readsort/fastq.hpp"

namespace readsort {

struct FilterThresholds {
  double t1 = 50.0;  // similarity percent, applied during classification
  double t2 = 0.5;   // normalized bits per symbol, inclusive
};

struct ReadGroup {
  std::string ref_id;
  std::vector<std::size_t> read_indices;  // ascending original order
};

/// Where every read goes. `permutation[k]` is the original index of the read
/// placed at sorted position k: groups in pass order, then the residual.
struct SortPlan {
  std::vector<ReadGroup> groups;
  std::vector<std::size_t> residual;
  std::vector<std::size_t> permutation;

  static SortPlan identity(std::size_t n);
  /// Rebuilds `permutation` from groups + residual.
  void rebuild_permutation();
};

/// Throws InvalidPlan unless `perm` is a permutation of 0..n-1.
void validate_permutation(std::span<const std::size_t> perm, std::size_t n);

struct FilterConfig {
  EnsembleConfig ensemble = EnsembleConfig::analysis_default();
  double t2 = 0.5;
  /// Train reference models on the reverse complement as well, so reads
  /// sequenced from the opposite strand score like forward ones.
  bool both_strands = true;
  int threads = 1;
};

struct FilterReference {
  std::string id;
  SymbolString sequence;
};

struct FilterSplit {
  std::vector<std::size_t> filtered;
  std::vector<std::size_t> unfiltered;
};

/// R(y) = C(y||x) / (2 |y|). Raises EmptyRead for an empty read.
double read_score(std::span<const Symbol> read, const ModelEnsemble& reference_model);
double read_score_from_bits(double bits, std::size_t length);

/// Fresh ensemble trained on one reference (and its reverse complement when
/// configured), frozen.
ModelEnsemble train_reference_model(const SymbolString& reference, const FilterConfig& cfg);

/// Splits `indices` (ascending) into reads with R <= t2 and the rest.
/// Empty reads have no score and always stay unfiltered.
FilterSplit filter_pass(std::span<const SymbolString> reads, std::span<const std::size_t> indices,
                        const ModelEnsemble& reference_model, double t2, int threads = 1);
FilterSplit filter_pass(std::span<const SymbolString> reads, std::span<const std::size_t> indices,
                        const FilterReference& reference, const FilterConfig& cfg);

/// Called after each pass with the 0-based pass number; used for debug dumps.
using PassObserver = std::function<void(std::size_t pass, const FilterReference& ref, const FilterSplit& split)>;

/// Applies filter_pass for each reference in rank order to the reads still
/// unfiltered, stopping when references run out or nothing is left.
SortPlan recursive_filter(std::span<const SymbolString> reads, std::span<const FilterReference> selected,
                          const FilterConfig& cfg, const PassObserver& observer = {});

/// output[k] = records[plan.permutation[k]]. Raises InvalidPlan when the plan
/// does not fit the records.
std::vector<FastqRecord> apply_plan(std::span<const FastqRecord> records, const SortPlan& plan);

}  // namespace readsort
