#pragma once

#include "noisylab/criteria.hpp"

#include <cstddef>
#include <vector>

namespace noisylab {

struct SelectionOutcome {
  std::vector<std::size_t> selected_indices;  // in rank order, best first
  std::vector<double> scores;
  CriteriaVariant criteria_used = CriteriaVariant::None;
};

// ceil(n * r_percent / 100), clamped to [1, n]. A 1e-9 slack absorbs
// representation error when n * r / 100 is integral.
std::size_t selection_count(std::size_t n, double r_percent);

// Indices sorted by descending score, ties by ascending index.
std::vector<std::size_t> descending_order(const std::vector<double>& scores);

// The selection_count(n, r) best scores under descending_order.
SelectionOutcome select_top_r(const std::vector<double>& scores, double r_percent,
                              CriteriaVariant criteria_used = CriteriaVariant::None);

}  // namespace noisylab
