#include "readsort/read_filter.hpp"

#include <numeric>

#include "readsort/error.hpp"
#include "readsort/parallel.hpp"

namespace readsort {

SortPlan SortPlan::identity(std::size_t n) {
  SortPlan plan;
  plan.residual.resize(n);
  std::iota(plan.residual.begin(), plan.residual.end(), std::size_t{0});
  plan.permutation = plan.residual;
  return plan;
}

void SortPlan::rebuild_permutation() {
  permutation.clear();
  for (const auto& g : groups) permutation.insert(permutation.end(), g.read_indices.begin(), g.read_indices.end());
  permutation.insert(permutation.end(), residual.begin(), residual.end());
}

void validate_permutation(std::span<const std::size_t> perm, std::size_t n) {
  if (perm.size() != n)
    throw Error(ErrorCode::InvalidPlan,
                "plan has " + std::to_string(perm.size()) + " entries for " + std::to_string(n) + " records");
  std::vector<bool> seen(n, false);
  for (std::size_t v : perm) {
    if (v >= n) throw Error(ErrorCode::InvalidPlan, "index " + std::to_string(v) + " out of range");
    if (seen[v]) throw Error(ErrorCode::InvalidPlan, "index " + std::to_string(v) + " repeated");
    seen[v] = true;
  }
}

double read_score_from_bits(double bits, std::size_t length) {
  if (length == 0) throw Error(ErrorCode::EmptyRead, "cannot score an empty read");
  return bits / (static_cast<double>(length) * Alphabet::log2_size);
}

double read_score(std::span<const Symbol> read, const ModelEnsemble& reference_model) {
  if (read.empty()) throw Error(ErrorCode::EmptyRead, "cannot score an empty read");
  return read_score_from_bits(reference_model.code_length(read), read.size());
}

ModelEnsemble train_reference_model(const SymbolString& reference, const FilterConfig& cfg) {
  ModelEnsemble model(cfg.ensemble);
  model.train(reference);
  if (cfg.both_strands) model.train(reverse_complement(reference));
  model.freeze();
  return model;
}

FilterSplit filter_pass(std::span<const SymbolString> reads, std::span<const std::size_t> indices,
                        const ModelEnsemble& reference_model, double t2, int threads) {
  std::vector<char> keep(indices.size(), 0);
  parallel_for(indices.size(), threads, [&](std::size_t k) {
    const SymbolString& y = reads[indices[k]];
    if (y.empty()) return;
    // R <= t2  <=>  bits <= t2 * 2|y|; the running total never decreases, so
    // estimation can stop once the budget is exceeded.
    const double budget = t2 * Alphabet::log2_size * static_cast<double>(y.size());
    keep[k] = reference_model.code_length(y, budget) <= budget;
  });
  FilterSplit split;
  for (std::size_t k = 0; k < indices.size(); ++k)
    (keep[k] ? split.filtered : split.unfiltered).push_back(indices[k]);
  return split;
}

FilterSplit filter_pass(std::span<const SymbolString> reads, std::span<const std::size_t> indices,
                        const FilterReference& reference, const FilterConfig& cfg) {
  const ModelEnsemble model = train_reference_model(reference.sequence, cfg);
  return filter_pass(reads, indices, model, cfg.t2, cfg.threads);
}

SortPlan recursive_filter(std::span<const SymbolString> reads, std::span<const FilterReference> selected,
                          const FilterConfig& cfg, const PassObserver& observer) {
  if (cfg.t2 < 0.0) throw Error(ErrorCode::InvalidConfig, "t2 must be >= 0");
  SortPlan plan;
  std::vector<std::size_t> remaining(reads.size());
  std::iota(remaining.begin(), remaining.end(), std::size_t{0});
  for (std::size_t pass = 0; pass < selected.size() && !remaining.empty(); ++pass) {
    FilterSplit split = filter_pass(reads, remaining, selected[pass], cfg);
    if (observer) observer(pass, selected[pass], split);
    plan.groups.push_back(ReadGroup{selected[pass].id, std::move(split.filtered)});
    remaining = std::move(split.unfiltered);
  }
  plan.residual = std::move(remaining);
  plan.rebuild_permutation();
  return plan;
}

std::vector<FastqRecord> apply_plan(std::span<const FastqRecord> records, const SortPlan& plan) {
  validate_permutation(plan.permutation, records.size());
  std::vector<FastqRecord> out;
  out.reserve(records.size());
  for (std::size_t idx : plan.permutation) out.push_back(records[idx]);
  return out;
}

}  // namespace readsort
