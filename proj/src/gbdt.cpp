#include "incidence/gbdt.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "incidence/parallel.hpp"

namespace incidence {

namespace {

struct PendingNode {
  std::int32_t node;
  std::size_t begin, end;  // range in the row-index permutation
  int depth;
  double sum_g, sum_h;
};

}  // namespace

Tree grow_tree(const BinnedMatrix& rows, std::span<const double> grad,
               std::span<const double> hess, const TreeGrowConfig& config) {
  const std::size_t n = rows.n_rows;
  const int n_cols = rows.n_cols;
  if (grad.size() != n || hess.size() != n) {
    throw std::invalid_argument("grow_tree: gradient size does not match row count");
  }

  Tree tree;
  std::vector<std::uint32_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);

  double root_g = 0.0, root_h = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    root_g += grad[i];
    root_h += hess[i];
  }

  // per-feature histogram offsets into one flat (g, h) pair buffer
  std::vector<int> offset(n_cols + 1, 0);
  for (int f = 0; f < n_cols; ++f) offset[f + 1] = offset[f] + rows.col_bins[f];
  std::vector<double> hist(2 * static_cast<std::size_t>(offset[n_cols]));
  std::vector<std::uint32_t> scratch(n);

  const auto make_leaf = [&](std::int32_t node, double g, double h) {
    tree.nodes[node].feature = -1;
    // + 0.0 normalizes a -0.0 Newton step on all-zero gradients
    tree.nodes[node].value = -g / std::max(h + config.l2_lambda, config.hessian_floor) + 0.0;
  };

  tree.nodes.emplace_back();
  std::vector<PendingNode> frontier{{0, 0, n, 0, root_g, root_h}};

  for (std::size_t q = 0; q < frontier.size(); ++q) {
    const PendingNode p = frontier[q];
    if (p.depth >= config.max_depth || p.end - p.begin < 2) {
      make_leaf(p.node, p.sum_g, p.sum_h);
      continue;
    }

    std::fill(hist.begin(), hist.end(), 0.0);
    for (std::size_t r = p.begin; r < p.end; ++r) {
      const std::uint32_t row = idx[r];
      const std::uint8_t* bins = rows.row(row);
      const double g = grad[row];
      const double h = hess[row];
      for (int f = 0; f < n_cols; ++f) {
        double* cell = &hist[2 * static_cast<std::size_t>(offset[f] + bins[f])];
        cell[0] += g;
        cell[1] += h;
      }
    }

    // best split by second-order gain; first (feature, bin) wins ties
    const double parent_score = p.sum_g * p.sum_g / (p.sum_h + config.l2_lambda);
    double best_gain = std::max(config.min_split_gain, 0.0), best_gl = 0.0, best_hl = 0.0;
    int best_feature = -1, best_bin = -1;
    for (int f = 0; f < n_cols; ++f) {
      double gl = 0.0, hl = 0.0;
      for (int b = 0; b + 1 < rows.col_bins[f]; ++b) {
        const double* cell = &hist[2 * static_cast<std::size_t>(offset[f] + b)];
        gl += cell[0];
        hl += cell[1];
        const double gr = p.sum_g - gl;
        const double hr = p.sum_h - hl;
        if (hl < config.min_child_hessian || hr < config.min_child_hessian) continue;
        const double gain = 0.5 * (gl * gl / (hl + config.l2_lambda) +
                                   gr * gr / (hr + config.l2_lambda) - parent_score);
        if (gain > best_gain) {
          best_gain = gain;
          best_feature = f;
          best_bin = b;
          best_gl = gl;
          best_hl = hl;
        }
      }
    }

    if (best_feature < 0) {
      make_leaf(p.node, p.sum_g, p.sum_h);
      continue;
    }

    // stable partition: left rows keep their order, then right rows
    std::size_t n_left = 0;
    std::size_t n_right = 0;
    for (std::size_t r = p.begin; r < p.end; ++r) {
      const std::uint32_t row = idx[r];
      if (rows.row(row)[best_feature] <= best_bin) {
        idx[p.begin + n_left++] = row;
      } else {
        scratch[n_right++] = row;
      }
    }
    std::copy(scratch.begin(), scratch.begin() + n_right, idx.begin() + p.begin + n_left);

    const std::int32_t left = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    const std::int32_t right = static_cast<std::int32_t>(tree.nodes.size());
    tree.nodes.emplace_back();
    tree.nodes[p.node].feature = static_cast<std::int16_t>(best_feature);
    tree.nodes[p.node].threshold = static_cast<std::uint8_t>(best_bin);
    tree.nodes[p.node].left = left;
    tree.nodes[p.node].right = right;
    frontier.push_back({left, p.begin, p.begin + n_left, p.depth + 1, best_gl, best_hl});
    frontier.push_back({right, p.begin + n_left, p.end, p.depth + 1, p.sum_g - best_gl,
                        p.sum_h - best_hl});
  }
  return tree;
}

void softmax_probs(std::span<const double> raw, std::span<double> out) {
  const double max_s = *std::max_element(raw.begin(), raw.end());
  double total = 0.0;
  for (std::size_t c = 0; c < raw.size(); ++c) {
    out[c] = std::exp(raw[c] - max_s);
    total += out[c];
  }
  for (std::size_t c = 0; c < raw.size(); ++c) out[c] /= total;
}

void grad_hess(std::span<const double> probs, int target, double weight,
               std::span<double> grad_out, std::span<double> hess_out) {
  for (std::size_t c = 0; c < probs.size(); ++c) {
    const double p = probs[c];
    grad_out[c] = weight * (p - (static_cast<int>(c) == target ? 1.0 : 0.0));
    hess_out[c] = weight * p * (1.0 - p);
  }
}

void BoostedEnsemble::predict_raw_binned(const std::uint8_t* binned_row,
                                         std::span<double> out) const {
  for (int c = 0; c < n_classes; ++c) out[c] = base_scores[c];
  for (const auto& round : rounds) {
    for (int c = 0; c < n_classes; ++c) out[c] += learning_rate * round[c].eval(binned_row);
  }
}

std::vector<double> BoostedEnsemble::predict_raw(std::span<const double> row) const {
  if (static_cast<int>(row.size()) != bins.n_columns()) {
    throw std::invalid_argument("predict_raw: expected " + std::to_string(bins.n_columns()) +
                                " inputs, got " + std::to_string(row.size()));
  }
  std::vector<std::uint8_t> binned(row.size());
  for (std::size_t c = 0; c < row.size(); ++c) {
    binned[c] = static_cast<std::uint8_t>(bins.bin(static_cast<int>(c), row[c]));
  }
  std::vector<double> out(n_classes);
  predict_raw_binned(binned.data(), out);
  return out;
}

std::span<const Tree> boost_round(BoostedEnsemble& ensemble, const BinnedMatrix& rows,
                                  std::span<const int> targets, std::span<const double> weights,
                                  std::span<const double> raw_scores,
                                  const TreeGrowConfig& config) {
  const std::size_t n = rows.n_rows;
  const int n_classes = ensemble.n_classes;
  if (targets.size() != n || weights.size() != n ||
      raw_scores.size() != n * static_cast<std::size_t>(n_classes)) {
    throw std::invalid_argument("boost_round: input sizes disagree");
  }

  // class-major gradient/hessian slabs so each tree sees a contiguous span
  std::vector<double> grad(static_cast<std::size_t>(n_classes) * n);
  std::vector<double> hess(static_cast<std::size_t>(n_classes) * n);
  parallel_for(n, [&](std::size_t begin, std::size_t end) {
    std::vector<double> probs(n_classes);
    for (std::size_t i = begin; i < end; ++i) {
      softmax_probs(raw_scores.subspan(i * n_classes, n_classes), probs);
      const double w = weights[i];
      const int target = targets[i];
      for (int c = 0; c < n_classes; ++c) {
        const double p = probs[c];
        grad[static_cast<std::size_t>(c) * n + i] = w * (p - (c == target ? 1.0 : 0.0));
        hess[static_cast<std::size_t>(c) * n + i] = w * p * (1.0 - p);
      }
    }
  });

  std::vector<Tree> round(n_classes);
  parallel_for(
      static_cast<std::size_t>(n_classes),
      [&](std::size_t begin, std::size_t end) {
        for (std::size_t c = begin; c < end; ++c) {
          round[c] = grow_tree(rows, std::span<const double>(grad).subspan(c * n, n),
                               std::span<const double>(hess).subspan(c * n, n), config);
        }
      },
      /*grain=*/2);
  ensemble.rounds.push_back(std::move(round));
  return ensemble.rounds.back();
}

void add_round_scores(const BoostedEnsemble& ensemble, std::span<const Tree> round_trees,
                      const BinnedMatrix& rows, std::span<double> raw) {
  const int n_classes = ensemble.n_classes;
  parallel_for(rows.n_rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const std::uint8_t* r = rows.row(i);
      for (int c = 0; c < n_classes; ++c) {
        raw[i * n_classes + c] += ensemble.learning_rate * round_trees[c].eval(r);
      }
    }
  });
}

void predict_raw_all(const BoostedEnsemble& ensemble, const BinnedMatrix& rows,
                     std::span<double> raw_out) {
  const int n_classes = ensemble.n_classes;
  parallel_for(rows.n_rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      ensemble.predict_raw_binned(rows.row(i),
                                  raw_out.subspan(i * n_classes, n_classes));
    }
  });
}

}  // namespace incidence
