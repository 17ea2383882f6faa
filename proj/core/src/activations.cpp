#include "ideoemb/activations.hpp"

#include <algorithm>
#include <string>
#include <unordered_set>

#include "ideoemb/errors.hpp"

namespace ideoemb {

ActivationLog::ActivationLog(std::vector<Activation> activations, std::size_t item_count)
    : activations_(std::move(activations)), offsets_(item_count + 1, 0) {
  std::unordered_set<std::uint64_t> seen;
  seen.reserve(activations_.size());
  for (const auto& a : activations_) {
    if (a.t < 0) throw ValidationError("negative timestamp for item " + std::to_string(a.item));
    if (a.item >= item_count) throw ValidationError("unknown item " + std::to_string(a.item));
    const std::uint64_t key = (std::uint64_t{a.item} << 32) | a.node;
    if (!seen.insert(key).second)
      throw ValidationError("duplicate activation of node " + std::to_string(a.node) + " on item " +
                            std::to_string(a.item));
  }
  std::stable_sort(activations_.begin(), activations_.end(), [](const Activation& x, const Activation& y) {
    return x.item != y.item ? x.item < y.item : x.t < y.t;
  });
  for (const auto& a : activations_) ++offsets_[a.item + 1];
  for (std::size_t i = 1; i < offsets_.size(); ++i) offsets_[i] += offsets_[i - 1];
}

std::span<const Activation> ActivationLog::cascade(ItemId item) const {
  if (item + std::size_t{1} >= offsets_.size()) return {};
  return std::span<const Activation>(activations_).subspan(offsets_[item], offsets_[item + 1] - offsets_[item]);
}

}  // namespace ideoemb
