#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "incidence/binning.hpp"

namespace incidence {

// Internal nodes route on binned feature <= threshold; feature == -1 marks a
// leaf carrying the Newton step value.
struct TreeNode {
  std::int16_t feature = -1;
  std::uint8_t threshold = 0;
  std::int32_t left = -1;
  std::int32_t right = -1;
  double value = 0.0;
};

struct Tree {
  std::vector<TreeNode> nodes;

  double eval(const std::uint8_t* binned_row) const {
    std::int32_t i = 0;
    while (nodes[i].feature >= 0) {
      i = binned_row[nodes[i].feature] <= nodes[i].threshold ? nodes[i].left : nodes[i].right;
    }
    return nodes[i].value;
  }
};

struct TreeGrowConfig {
  int max_depth = 5;
  double l2_lambda = 1.0;
  double min_child_hessian = 1e-3;
  double min_split_gain = 0.0;   // a split must beat this gain to happen
  double hessian_floor = 1e-16;  // leaf denominator floor
};

// Greedy depth-wise growth on second-order gain; nodes whose hessian mass is
// below min_child_hessian on either side, or with no positive gain, stay
// leaves. Leaf value is -sum(grad) / (sum(hess) + lambda). Split decisions
// depend only on weighted gradient/hessian sums, never on raw row counts, so
// zero-weight rows have exactly no influence.
Tree grow_tree(const BinnedMatrix& rows, std::span<const double> grad,
               std::span<const double> hess, const TreeGrowConfig& config);

// Multiclass ensemble: raw score for class c is
// base_scores[c] + learning_rate * sum over rounds of tree_c(x).
struct BoostedEnsemble {
  int n_classes = 0;
  double learning_rate = 0.1;
  std::vector<double> base_scores;
  BinMapper bins;
  std::vector<std::vector<Tree>> rounds;  // each round holds n_classes trees

  std::size_t n_rounds() const { return rounds.size(); }

  void predict_raw_binned(const std::uint8_t* binned_row, std::span<double> out) const;
  // Bins the raw row through the stored mapper; throws on column-count mismatch.
  std::vector<double> predict_raw(std::span<const double> row) const;
};

// p_c = exp(s_c - max_s) / sum(exp(.)).
void softmax_probs(std::span<const double> raw, std::span<double> out);

// Gradient and diagonal hessian of the weighted multiclass log-loss at the
// raw scores behind probs: grad_c = w * (p_c - [c == target]),
// hess_c = w * p_c * (1 - p_c).
void grad_hess(std::span<const double> probs, int target, double weight,
               std::span<double> grad_out, std::span<double> hess_out);

// One boosting round: fits n_classes trees to the second-order expansion of
// the weighted log-loss at raw_scores (row-major n x n_classes) and appends
// them. Returns the new round's trees.
std::span<const Tree> boost_round(BoostedEnsemble& ensemble, const BinnedMatrix& rows,
                                  std::span<const int> targets, std::span<const double> weights,
                                  std::span<const double> raw_scores, const TreeGrowConfig& config);

// Adds learning_rate * tree_c to raw (row-major n x n_classes) for one round's trees.
void add_round_scores(const BoostedEnsemble& ensemble, std::span<const Tree> round_trees,
                      const BinnedMatrix& rows, std::span<double> raw);

// Full raw-score prediction for pre-binned rows, parallel across rows.
void predict_raw_all(const BoostedEnsemble& ensemble, const BinnedMatrix& rows,
                     std::span<double> raw_out);

}  // namespace incidence
