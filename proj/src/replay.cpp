#include "ctph/td3/replay.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ctph {

float nearest_rank_percentile(std::vector<float>& scratch, double rho) {
  if (scratch.empty()) {
    throw std::invalid_argument("percentile of an empty window");
  }
  const auto n = scratch.size();
  auto rank = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n)));
  rank = std::clamp<std::size_t>(rank, 1, n);
  std::nth_element(scratch.begin(), scratch.begin() + (rank - 1), scratch.end());
  return scratch[rank - 1];
}

DualReplay::DualReplay(const ReplayConfig& cfg, bool high_enabled)
    : cfg_(cfg), high_enabled_(high_enabled) {
  cfg_.validate();
  main_.reserve(cfg_.main_capacity);
  high_.reserve(high_enabled ? cfg_.high_capacity : 0);
  window_.reserve(cfg_.window_length);
}

bool DualReplay::insert(const Transition& t) {
  if (main_.size() < cfg_.main_capacity) {
    main_.push_back(t);
  } else {
    main_[main_next_] = t;
  }
  main_next_ = (main_next_ + 1) % cfg_.main_capacity;

  bool admitted = false;
  if (high_enabled_ && t.reward > threshold_ &&
      std::abs(t.obs(0)) < cfg_.epsilon) {
    if (high_.size() < cfg_.high_capacity) {
      high_.push_back(t);
    } else {
      high_[high_next_] = t;
    }
    high_next_ = (high_next_ + 1) % cfg_.high_capacity;
    admitted = true;
  }

  if (window_.size() < cfg_.window_length) {
    window_.push_back(t.reward);
  } else {
    window_[window_next_] = t.reward;
  }
  window_next_ = (window_next_ + 1) % cfg_.window_length;
  if (window_.size() >= cfg_.warmup_length) {
    scratch_ = window_;
    threshold_ = nearest_rank_percentile(scratch_, cfg_.rho);
  }
  return admitted;
}

DualReplay::Batch DualReplay::sample(std::size_t batch,
                                     std::mt19937_64& rng) const {
  if (main_.size() < batch) {
    throw std::runtime_error("replay holds fewer transitions than one batch");
  }
  Batch out;
  out.items.reserve(batch);
  const bool mixed = high_.size() >= 2 * cfg_.high_batch_share;
  if (mixed) {
    std::uniform_int_distribution<std::size_t> pick(0, high_.size() - 1);
    for (std::size_t i = 0; i < cfg_.high_batch_share; ++i) {
      out.items.push_back(&high_[pick(rng)]);
    }
    out.from_high = cfg_.high_batch_share;
  }
  std::uniform_int_distribution<std::size_t> pick(0, main_.size() - 1);
  while (out.items.size() < batch) out.items.push_back(&main_[pick(rng)]);
  return out;
}

}  // namespace ctph
