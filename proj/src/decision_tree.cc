/*
 * Copyright 2026 The fairdebug Authors.
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "fairdebug/learners.h"

namespace fairdebug {

namespace {

// Unnormalized Gini impurity: n * (1 - p^2 - q^2) = 2 pos neg / n.
double gini(double positives, double total) {
  if (total <= 0) return 0.0;
  return 2.0 * positives * (total - positives) / total;
}

struct Split {
  bool found = false;
  double impurity = 0.0;
  int32_t feature = -1;
  bool categorical = false;
  int32_t category = -1;
  double threshold = 0.0;
};

struct Frame {
  int32_t node;
  int depth;
  std::vector<size_t> rows;
};

class TreeBuilder {
 public:
  TreeBuilder(const FeatureLayout& layout, std::span<const double> raw,
              std::span<const uint8_t> labels, const TreeOptions& options,
              uint64_t seed)
      : layout_(layout),
        raw_(raw),
        labels_(labels),
        options_(options),
        width_(layout.columns().size()),
        rng_(seed) {}

  DecisionTree build(std::span<const size_t> rows) {
    DecisionTree tree;
    std::vector<Frame> stack;
    tree.nodes.emplace_back();
    stack.push_back({0, 0, std::vector<size_t>(rows.begin(), rows.end())});
    while (!stack.empty()) {
      Frame frame = std::move(stack.back());
      stack.pop_back();
      double positives = 0;
      for (size_t r : frame.rows) positives += labels_[r];
      const double total = static_cast<double>(frame.rows.size());
      {
        TreeNode& node = tree.nodes[frame.node];
        node.positives = positives;
        node.negatives = total - positives;
      }
      if (frame.depth >= options_.max_depth ||
          frame.rows.size() < static_cast<size_t>(options_.min_samples_split) ||
          positives == 0 || positives == total) {
        continue;
      }
      const Split split = best_split(frame.rows, gini(positives, total));
      if (!split.found) continue;

      std::vector<size_t> left, right;
      for (size_t r : frame.rows) {
        (goes_left(split, r) ? left : right).push_back(r);
      }
      const int32_t left_id = static_cast<int32_t>(tree.nodes.size());
      tree.nodes.emplace_back();
      tree.nodes.emplace_back();
      TreeNode& node = tree.nodes[frame.node];
      node.feature = split.feature;
      node.categorical = split.categorical;
      node.category = split.category;
      node.threshold = split.threshold;
      node.left = left_id;
      node.right = left_id + 1;
      // Right first so the left subtree is expanded first (stable ids).
      stack.push_back({left_id + 1, frame.depth + 1, std::move(right)});
      stack.push_back({left_id, frame.depth + 1, std::move(left)});
    }
    return tree;
  }

 private:
  double value(size_t row, size_t feature) const {
    return raw_[row * width_ + feature];
  }

  bool goes_left(const Split& split, size_t row) const {
    const double v = value(row, split.feature);
    return split.categorical ? v == split.category : v <= split.threshold;
  }

  std::vector<size_t> candidate_features() {
    std::vector<size_t> features(width_);
    std::iota(features.begin(), features.end(), 0);
    if (options_.feature_frac >= 1.0) return features;
    const size_t k = std::clamp<size_t>(
        static_cast<size_t>(std::ceil(options_.feature_frac * width_)), 1,
        width_);
    // Partial Fisher-Yates, then restore column order so tie-breaking stays
    // independent of the draw order.
    for (size_t i = 0; i < k; ++i) {
      std::uniform_int_distribution<size_t> pick(i, width_ - 1);
      std::swap(features[i], features[pick(rng_)]);
    }
    features.resize(k);
    std::sort(features.begin(), features.end());
    return features;
  }

  Split best_split(const std::vector<size_t>& rows, double parent) {
    Split best;
    best.impurity = parent;
    const double total = static_cast<double>(rows.size());
    double total_pos = 0;
    for (size_t r : rows) total_pos += labels_[r];

    for (size_t f : candidate_features()) {
      const FeatureColumn& col = layout_.columns()[f];
      if (col.kind == ColumnKind::kCategorical) {
        const size_t k = col.categories.size();
        counts_.assign(k, 0.0);
        pos_.assign(k, 0.0);
        for (size_t r : rows) {
          const double code = value(r, f);
          if (code < 0) continue;
          counts_[static_cast<size_t>(code)] += 1;
          pos_[static_cast<size_t>(code)] += labels_[r];
        }
        for (size_t c = 0; c < k; ++c) {
          if (counts_[c] == 0 || counts_[c] == total) continue;
          const double impurity =
              gini(pos_[c], counts_[c]) +
              gini(total_pos - pos_[c], total - counts_[c]);
          if (impurity < best.impurity) {
            best = {true, impurity, static_cast<int32_t>(f), true,
                    static_cast<int32_t>(c), 0.0};
          }
        }
      } else {
        sorted_.clear();
        for (size_t r : rows) sorted_.emplace_back(value(r, f), labels_[r]);
        std::sort(sorted_.begin(), sorted_.end());
        double left_n = 0, left_pos = 0;
        for (size_t i = 0; i + 1 < sorted_.size(); ++i) {
          left_n += 1;
          left_pos += sorted_[i].second;
          if (sorted_[i].first == sorted_[i + 1].first) continue;
          const double impurity = gini(left_pos, left_n) +
                                  gini(total_pos - left_pos, total - left_n);
          if (impurity < best.impurity) {
            const double threshold =
                0.5 * (sorted_[i].first + sorted_[i + 1].first);
            best = {true, impurity, static_cast<int32_t>(f), false, -1,
                    threshold};
          }
        }
      }
    }
    return best;
  }

  const FeatureLayout& layout_;
  std::span<const double> raw_;
  std::span<const uint8_t> labels_;
  TreeOptions options_;
  size_t width_;
  std::mt19937_64 rng_;
  // Scratch buffers reused across nodes.
  std::vector<double> counts_, pos_;
  std::vector<std::pair<double, uint8_t>> sorted_;
};

}  // namespace

double TreeNode::proba() const {
  const double total = positives + negatives;
  return total > 0 ? positives / total : 0.5;
}

size_t DecisionTree::leaf_index(std::span<const double> raw) const {
  size_t i = 0;
  while (!nodes[i].is_leaf()) {
    const TreeNode& n = nodes[i];
    const double v = raw[n.feature];
    const bool left = n.categorical ? v == n.category : v <= n.threshold;
    i = static_cast<size_t>(left ? n.left : n.right);
  }
  return i;
}

size_t DecisionTree::depth() const {
  if (nodes.empty()) return 0;
  std::vector<std::pair<size_t, size_t>> stack = {{0, 0}};
  size_t best = 0;
  while (!stack.empty()) {
    auto [i, d] = stack.back();
    stack.pop_back();
    best = std::max(best, d);
    if (!nodes[i].is_leaf()) {
      stack.push_back({static_cast<size_t>(nodes[i].left), d + 1});
      stack.push_back({static_cast<size_t>(nodes[i].right), d + 1});
    }
  }
  return best;
}

DecisionTree fit_tree(const FeatureLayout& layout, std::span<const double> raw,
                      std::span<const uint8_t> labels,
                      std::span<const size_t> rows, const TreeOptions& options,
                      uint64_t seed) {
  TreeBuilder builder(layout, raw, labels, options, seed);
  return builder.build(rows);
}

}  // namespace fairdebug
