#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ideoemb/graph.hpp"

namespace ideoemb {

using ItemId = std::uint32_t;
using Timestamp = std::int64_t;

// Node `node` adopted item `item` at time t.
struct Activation {
  Timestamp t = 0;
  ItemId item = 0;
  NodeId node = 0;

  friend bool operator==(const Activation&, const Activation&) = default;
};

// All observed activations grouped by item. Within an item, activations are
// ordered by time; equal timestamps keep their ingestion order.
class ActivationLog {
 public:
  ActivationLog() = default;

  // Throws ValidationError on a repeated (item, node) pair, a negative
  // timestamp, or an item id >= item_count.
  ActivationLog(std::vector<Activation> activations, std::size_t item_count);

  std::size_t item_count() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t size() const { return activations_.size(); }
  bool empty() const { return activations_.empty(); }

  // D_i in activation order.
  std::span<const Activation> cascade(ItemId item) const;

  std::span<const Activation> all() const { return activations_; }

 private:
  std::vector<Activation> activations_;
  std::vector<std::size_t> offsets_;
};

}  // namespace ideoemb
