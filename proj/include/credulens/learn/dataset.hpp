#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "credulens/features.hpp"

namespace credulens::learn {

// Numeric rows with binary labels (1 = positive class). Classifiers treat
// boolean features as 0/1 columns.
struct Dataset {
  std::vector<std::vector<double>> rows;
  std::vector<int> labels;

  std::size_t size() const { return rows.size(); }
  std::size_t n_features() const { return rows.empty() ? 0 : rows.front().size(); }

  Dataset subset(const std::vector<std::size_t>& indices) const {
    Dataset out;
    out.rows.reserve(indices.size());
    out.labels.reserve(indices.size());
    for (auto i : indices) {
      out.rows.push_back(rows[i]);
      out.labels.push_back(labels[i]);
    }
    return out;
  }

  std::size_t count_positive() const {
    std::size_t c = 0;
    for (int l : labels) c += l == 1;
    return c;
  }
};

inline Dataset to_dataset(const LabeledRows& labeled) {
  Dataset d;
  d.rows.reserve(labeled.rows.size());
  for (const auto& row : labeled.rows) d.rows.emplace_back(row.begin(), row.end());
  d.labels = labeled.labels;
  return d;
}

inline void require_consistent(const Dataset& d) {
  if (d.rows.size() != d.labels.size())
    throw std::invalid_argument("dataset: rows and labels differ in length");
  for (const auto& row : d.rows)
    if (row.size() != d.n_features())
      throw std::invalid_argument("dataset: ragged rows");
}

}  // namespace credulens::learn
