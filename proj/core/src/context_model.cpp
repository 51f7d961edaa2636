#include "readsort/context_model.hpp"

#include <algorithm>
#include <cmath>

#include "readsort/error.hpp"

namespace readsort {

FcmConfig FcmConfig::make(int order, double alpha) {
  FcmConfig c;
  c.order = order;
  c.alpha = alpha;
  c.hashed = order > CountTable::kMaxDenseOrder;
  return c;
}

EnsembleConfig EnsembleConfig::analysis_default() {
  EnsembleConfig cfg;
  cfg.models.emplace_back(FcmConfig::make(3));
  cfg.models.emplace_back(FcmConfig::make(8));
  cfg.models.emplace_back(FcmConfig::make(13));
  StcmConfig stcm;
  stcm.base = FcmConfig::make(18);
  stcm.max_substitutions = 3;
  cfg.models.emplace_back(stcm);
  return cfg;
}

namespace {

void validate_fcm(const FcmConfig& c) {
  if (c.order < 0 || c.order > 20) throw Error(ErrorCode::InvalidConfig, "model order must be in [0, 20]");
  if (!(c.alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "alpha must be positive");
  if (!c.hashed && c.order > CountTable::kMaxDenseOrder)
    throw Error(ErrorCode::InvalidConfig, "orders above 12 require hashed tables");
}

}  // namespace

void EnsembleConfig::validate() const {
  if (models.empty()) throw Error(ErrorCode::InvalidConfig, "ensemble needs at least one model");
  if (!(gamma > 0.0 && gamma < 1.0)) throw Error(ErrorCode::InvalidConfig, "gamma must be in (0, 1)");
  for (const auto& m : models) {
    if (const auto* f = std::get_if<FcmConfig>(&m)) {
      validate_fcm(*f);
    } else {
      const auto& s = std::get<StcmConfig>(m);
      validate_fcm(s.base);
      if (s.max_substitutions < 0) throw Error(ErrorCode::InvalidConfig, "max_substitutions must be >= 0");
      if (!(s.fallback_alpha > 0.0)) throw Error(ErrorCode::InvalidConfig, "fallback_alpha must be positive");
    }
  }
}

struct ModelEnsemble::Model {
  Model(const FcmConfig& c, bool tolerant_model, int subs, double fb_alpha)
      : order(c.order),
        alpha(c.alpha),
        fallback_alpha(fb_alpha),
        tolerant(tolerant_model),
        max_substitutions(subs),
        max_count(std::clamp<std::uint32_t>(c.max_count, 2, 65535)),
        mask(order == 0 ? 0 : (std::uint64_t{1} << (2 * order)) - 1),
        table(c.order, c.hashed, c.max_table_bits, c.max_count) {}

  void bump_fallback(Symbol s) noexcept {
    if (fallback[s] >= max_count)
      for (auto& v : fallback) v >>= 1;
    ++fallback[s];
  }

  int order;
  double alpha;
  double fallback_alpha;
  bool tolerant;
  int max_substitutions;
  std::uint32_t max_count;
  std::uint64_t mask;
  CountTable table;
  std::array<std::uint32_t, 4> fallback{};
};

ModelEnsemble::ModelEnsemble(EnsembleConfig cfg) : cfg_(std::move(cfg)) {
  cfg_.validate();
  for (const auto& m : cfg_.models) {
    if (const auto* f = std::get_if<FcmConfig>(&m)) {
      models_.push_back(std::make_unique<Model>(*f, false, 0, f->alpha));
    } else {
      const auto& s = std::get<StcmConfig>(m);
      models_.push_back(std::make_unique<Model>(s.base, true, s.max_substitutions, s.fallback_alpha));
    }
  }
  weights_.assign(models_.size(), 1.0 / static_cast<double>(models_.size()));
}

ModelEnsemble::ModelEnsemble(ModelEnsemble&&) noexcept = default;
ModelEnsemble& ModelEnsemble::operator=(ModelEnsemble&&) noexcept = default;
ModelEnsemble::~ModelEnsemble() = default;

void ModelEnsemble::train(std::span<const Symbol> sequence) {
  if (frozen_) throw Error(ErrorCode::FrozenModel, "cannot train a frozen ensemble");
  for (auto& mp : models_) {
    Model& m = *mp;
    constexpr std::size_t kAhead = 8;
    std::uint64_t history = 0;
    std::uint64_t ahead = 0;
    for (std::size_t i = 0; i < std::min(kAhead, sequence.size()); ++i) ahead = (ahead << 2) | sequence[i];
    std::size_t pos = 0;
    for (Symbol s : sequence) {
      if (pos + kAhead < sequence.size()) {
        m.table.prefetch(ahead & m.mask);
        ahead = (ahead << 2) | sequence[pos + kAhead];
      }
      if (pos >= static_cast<std::size_t>(m.order)) m.table.increment(history & m.mask, s);
      m.bump_fallback(s);
      history = (history << 2) | s;
      ++pos;
    }
  }
}

void ModelEnsemble::require_frozen() const {
  if (!frozen_) throw Error(ErrorCode::FrozenModel, "code length estimation requires a frozen ensemble");
}

std::array<double, 4> ModelEnsemble::probability(std::span<const Symbol> context) const {
  Session s(*this);
  s.load_context(context);
  return s.predict();
}

double ModelEnsemble::code_length(std::span<const Symbol> sequence) const {
  require_frozen();
  Session s(*this);
  double bits = 0.0;
  for (Symbol sym : sequence) {
    bits -= std::log2(s.predict()[sym]);
    s.update(sym, false);
  }
  return bits;
}

double ModelEnsemble::code_length(std::span<const Symbol> sequence, double stop_above) const {
  require_frozen();
  Session s(*this);
  double bits = 0.0;
  for (Symbol sym : sequence) {
    bits -= std::log2(s.predict()[sym]);
    if (bits > stop_above) return bits;
    s.update(sym, false);
  }
  return bits;
}

std::uint32_t ModelEnsemble::count(std::size_t model, std::span<const Symbol> context, Symbol symbol) const {
  const Model& m = *models_.at(model);
  if (context.size() < static_cast<std::size_t>(m.order)) return m.fallback[symbol];
  std::uint64_t ctx = 0;
  for (std::size_t i = context.size() - m.order; i < context.size(); ++i) ctx = (ctx << 2) | context[i];
  const Counts* c = m.table.find(ctx);
  return c == nullptr ? 0 : (*c)[symbol];
}

// ---------------------------------------------------------------------------

namespace {

/// Raises every probability below the floor to the floor and rescales the
/// others so the distribution still sums to one.
void apply_floor(std::array<double, 4>& p) {
  if (std::min({p[0], p[1], p[2], p[3]}) >= kProbabilityFloor) return;
  std::array<bool, 4> pinned{};
  for (;;) {
    bool changed = false;
    for (int s = 0; s < 4; ++s)
      if (!pinned[s] && p[s] < kProbabilityFloor) pinned[s] = changed = true;
    if (!changed) return;
    double free_mass = 0.0;
    int n_pinned = 0;
    for (int s = 0; s < 4; ++s) {
      if (pinned[s]) ++n_pinned;
      else free_mass += p[s];
    }
    const double scale = (1.0 - n_pinned * kProbabilityFloor) / free_mass;
    for (int s = 0; s < 4; ++s) p[s] = pinned[s] ? kProbabilityFloor : p[s] * scale;
  }
}

template <typename CountArray>
void estimate(const CountArray* counts, double alpha, std::array<double, 4>& out) noexcept {
  if (counts == nullptr) {
    out = {0.25, 0.25, 0.25, 0.25};
    return;
  }
  const double total = double((*counts)[0]) + (*counts)[1] + (*counts)[2] + (*counts)[3];
  const double inv = 1.0 / (total + 4.0 * alpha);
  for (int s = 0; s < 4; ++s) out[s] = ((*counts)[s] + alpha) * inv;
}

}  // namespace

ModelEnsemble::Session::Session(const ModelEnsemble& ensemble)
    : ens_(&ensemble),
      weights_(ensemble.weights_),
      model_probs_(ensemble.models_.size()),
      tolerant_(ensemble.models_.size(), 0),
      misses_(ensemble.models_.size(), 0),
      argmax_(ensemble.models_.size(), -1),
      found_(ensemble.models_.size(), nullptr) {}

ModelEnsemble::Session::Session(ModelEnsemble& ensemble) : Session(std::as_const(ensemble)) {
  learner_ = &ensemble;
}

void ModelEnsemble::Session::reset_history() noexcept {
  history_ = 0;
  formed_ = 0;
  std::fill(tolerant_.begin(), tolerant_.end(), 0);
  std::fill(misses_.begin(), misses_.end(), 0);
}

void ModelEnsemble::Session::reset_weights() { weights_ = ens_->weights_; }

void ModelEnsemble::Session::load_context(std::span<const Symbol> context) {
  reset_history();
  for (Symbol s : context) history_ = (history_ << 2) | s;
  formed_ = std::min<std::size_t>(context.size(), 32);
  for (std::size_t i = 0; i < tolerant_.size(); ++i) tolerant_[i] = history_ & ens_->models_[i]->mask;
}

const std::array<double, 4>& ModelEnsemble::Session::predict() {
  const auto& models = ens_->models_;
  mixed_ = {0.0, 0.0, 0.0, 0.0};
  for (std::size_t i = 0; i < models.size(); ++i) {
    const Model& m = *models[i];
    auto& p = model_probs_[i];
    argmax_[i] = -1;
    found_[i] = nullptr;
    if (formed_ < static_cast<std::size_t>(m.order)) {
      estimate(&m.fallback, m.fallback_alpha, p);
    } else {
      const std::uint64_t ctx = m.tolerant ? tolerant_[i] : (history_ & m.mask);
      const Counts* c = m.table.find(ctx);
      if (!m.tolerant || ctx == (history_ & m.mask)) found_[i] = c;
      estimate(c, m.alpha, p);
      if (m.tolerant && c != nullptr) {
        int best = 0;
        for (int s = 1; s < 4; ++s)
          if ((*c)[s] > (*c)[best]) best = s;
        if ((*c)[best] > 0) argmax_[i] = best;
      }
    }
    const double w = weights_[i];
    for (int s = 0; s < 4; ++s) mixed_[s] += w * p[s];
  }
  apply_floor(mixed_);
  return mixed_;
}

void ModelEnsemble::Session::update(Symbol symbol, bool learn) {
  auto& models = ens_->models_;
  if (learn) {
    if (learner_ == nullptr || learner_->frozen_)
      throw Error(ErrorCode::FrozenModel, "cannot learn through a read-only or frozen ensemble");
    for (std::size_t i = 0; i < learner_->models_.size(); ++i) {
      Model& m = *learner_->models_[i];
      if (formed_ >= static_cast<std::size_t>(m.order)) m.table.increment_found(found_[i], history_ & m.mask, symbol);
      m.bump_fallback(symbol);
    }
  }

  // A single model keeps weight 1 exactly, so the update can be skipped.
  const double gamma = ens_->cfg_.gamma;
  if (weights_.size() > 1) {
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] = std::pow(weights_[i] * model_probs_[i][symbol], gamma);
    sum += weights_[i];
  }
  if (sum > 0.0 && std::isfinite(sum)) {
    for (double& w : weights_) w /= sum;
  } else {
    std::fill(weights_.begin(), weights_.end(), 1.0 / static_cast<double>(weights_.size()));
  }
  }

  const std::uint64_t next_history = (history_ << 2) | symbol;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const Model& m = *models[i];
    if (!m.tolerant) continue;
    const std::uint64_t truth = next_history & m.mask;
    if (formed_ < static_cast<std::size_t>(m.order) || argmax_[i] < 0) {
      tolerant_[i] = truth;
      misses_[i] = 0;
    } else if (argmax_[i] == symbol) {
      tolerant_[i] = ((tolerant_[i] << 2) | symbol) & m.mask;
      misses_[i] = 0;
    } else if (++misses_[i] >= m.max_substitutions) {
      tolerant_[i] = truth;
      misses_[i] = 0;
    } else {
      tolerant_[i] = ((tolerant_[i] << 2) | static_cast<std::uint64_t>(argmax_[i])) & m.mask;
    }
  }

  history_ = next_history;
  if (formed_ < 32) ++formed_;
  for (std::size_t i = 0; i < models.size(); ++i) {
    const Model& m = *models[i];
    const std::uint64_t next = m.tolerant ? tolerant_[i] : (history_ & m.mask);
    if (formed_ >= static_cast<std::size_t>(m.order)) m.table.prefetch(next);
    if (formed_ + 1 >= static_cast<std::size_t>(m.order)) m.table.prefetch_successors(next);
  }
}

}  // namespace readsort
