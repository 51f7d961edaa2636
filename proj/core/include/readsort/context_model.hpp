#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <variant>
#include <vector>

#include "readsort/alphabet.hpp"
#include "readsort/count_table.hpp"

namespace readsort {

/// Finite-context model of depth `order` with estimator
/// P(s | ctx) = (n_s + alpha) / (n + 4 alpha).
struct FcmConfig {
  int order = 0;
  double alpha = 1.0 / 16;
  bool hashed = false;          // dense 4^order table otherwise
  int max_table_bits = 22;      // hashed tables only
  std::uint32_t max_count = 65535;

  /// Hashed iff order exceeds the dense limit.
  static FcmConfig make(int order, double alpha = 1.0 / 16);
};

/// Substitution-tolerant context model: predicts from a private context that
/// follows the model's own argmax through mismatches, resetting to the true
/// history after `max_substitutions` consecutive misses.
struct StcmConfig {
  FcmConfig base;
  int max_substitutions = 3;
  double fallback_alpha = 1.0 / 16;  // estimator used before the context forms
};

using ModelConfig = std::variant<FcmConfig, StcmConfig>;

struct EnsembleConfig {
  std::vector<ModelConfig> models;
  double gamma = 0.99;  // weight forgetting factor, in (0, 1)

  /// FCM orders {3, 8, 13} plus an order-18 STCM tolerating 3 substitutions.
  static EnsembleConfig analysis_default();
  void validate() const;
};

/// Mixed probability floor applied after mixing.
inline constexpr double kProbabilityFloor = 1.0 / 65536.0;

/// A set of context models mixed by adaptive weights.
///
/// Lifecycle: train() any number of times, then freeze(). Frozen estimation
/// never touches counts; each estimated sequence starts from the post-training
/// weights, which adapt only within that sequence. Training is a plain count
/// pass and leaves the weights at their initial uniform values.
///
/// Before a model has seen `order` symbols of the current sequence it predicts
/// from order-0 fallback counts, which every training symbol updates.
class ModelEnsemble {
 public:
  explicit ModelEnsemble(EnsembleConfig cfg = EnsembleConfig::analysis_default());
  ModelEnsemble(ModelEnsemble&&) noexcept;
  ModelEnsemble& operator=(ModelEnsemble&&) noexcept;
  ~ModelEnsemble();

  /// One left-to-right pass; the context starts empty for every call.
  void train(std::span<const Symbol> sequence);
  void freeze() noexcept { frozen_ = true; }
  [[nodiscard]] bool frozen() const noexcept { return frozen_; }

  /// Mixed distribution over the next symbol after `context`, using the
  /// post-training weights. The last `order` symbols feed each model.
  [[nodiscard]] std::array<double, 4> probability(std::span<const Symbol> context) const;
  [[nodiscard]] double probability(std::span<const Symbol> context, Symbol symbol) const {
    return probability(context)[symbol];
  }

  /// Sum of -log2 P over the sequence. Requires a frozen ensemble.
  [[nodiscard]] double code_length(std::span<const Symbol> sequence) const;
  /// Same, but stops as soon as the running total exceeds `stop_above` and
  /// returns that partial (already larger) total.
  [[nodiscard]] double code_length(std::span<const Symbol> sequence, double stop_above) const;

  /// Raw count of `symbol` after `context` (its last `order` symbols) in model `model`.
  [[nodiscard]] std::uint32_t count(std::size_t model, std::span<const Symbol> context, Symbol symbol) const;

  [[nodiscard]] const EnsembleConfig& config() const noexcept { return cfg_; }
  [[nodiscard]] std::size_t size() const noexcept { return models_.size(); }
  [[nodiscard]] std::span<const double> initial_weights() const noexcept { return weights_; }

  struct Model;

  /// Sequential predictor over one ensemble. Holds private history, tolerant
  /// contexts and mixing weights, so several sessions may share one frozen
  /// ensemble across threads. On an unfrozen ensemble a session can also
  /// learn (adaptive coding).
  class Session {
   public:
    /// Read-only session; update(.., learn=true) is rejected.
    explicit Session(const ModelEnsemble& ensemble);
    /// Session allowed to learn while the ensemble is unfrozen.
    explicit Session(ModelEnsemble& ensemble);

    /// Clears the symbol history (next symbol has no context).
    void reset_history() noexcept;
    /// Restores the ensemble's post-training weights.
    void reset_weights();

    /// Distribution of the next symbol; must precede each update().
    const std::array<double, 4>& predict();
    /// Advances the history by `symbol`. With `learn` set the counts are
    /// updated too, which requires an unfrozen ensemble.
    void update(Symbol symbol, bool learn);

    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }

   private:
    friend class ModelEnsemble;
    void load_context(std::span<const Symbol> context);

    const ModelEnsemble* ens_;
    ModelEnsemble* learner_ = nullptr;
    std::uint64_t history_ = 0;  // 2 bits per symbol, newest lowest
    std::size_t formed_ = 0;     // symbols seen since reset, saturating
    std::vector<double> weights_;
    std::vector<std::array<double, 4>> model_probs_;
    std::vector<std::uint64_t> tolerant_;    // STCM private contexts
    std::vector<int> misses_;                // consecutive STCM mismatches
    std::vector<int> argmax_;                // per model, -1 when unknown
    std::vector<const Counts*> found_;       // slot read by predict() for the true context
    std::array<double, 4> mixed_{};
  };

 private:
  friend class Session;
  void require_frozen() const;

  EnsembleConfig cfg_;
  std::vector<std::unique_ptr<Model>> models_;
  std::vector<double> weights_;
  bool frozen_ = false;
};

}  // namespace readsort
