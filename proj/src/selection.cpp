#include "noisylab/selection.hpp"

#include "noisylab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace noisylab {

std::size_t selection_count(std::size_t n, double r_percent) {
  if (n == 0) return 0;
  if (!(r_percent > 0.0) || r_percent > 100.0) {
    throw InvalidArgument("select fraction must lie in (0, 100]", "train.select_percent");
  }
  const double raw = static_cast<double>(n) * r_percent / 100.0;
  auto count = static_cast<std::size_t>(std::ceil(raw - 1e-9));
  return std::clamp<std::size_t>(count, 1, n);
}

std::vector<std::size_t> descending_order(const std::vector<double>& scores) {
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  });
  return order;
}

SelectionOutcome select_top_r(const std::vector<double>& scores, double r_percent,
                              CriteriaVariant criteria_used) {
  if (scores.empty()) throw InvalidArgument("select_top_r needs at least one score", "scores");
  const std::size_t count = selection_count(scores.size(), r_percent);

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto better = [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    return a < b;
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(count), order.end(),
                    better);
  order.resize(count);
  return {std::move(order), scores, criteria_used};
}

}  // namespace noisylab
