#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "ideoemb/activations.hpp"
#include "ideoemb/graph.hpp"
#include "ideoemb/model.hpp"
#include "ideoemb/trainer.hpp"

namespace ideoemb {

struct SplitPlan {
  enum class Mode { kHoldout, kKFold };
  Mode mode = Mode::kHoldout;
  double train_frac = 0.9;
  std::size_t fold_count = 1;
  // Holdout: 0 = train, 1 = test. K-fold: index of the fold the item tests in.
  std::vector<std::size_t> fold_assignment;
};

struct Split {
  std::vector<ItemId> train;
  std::vector<ItemId> test;
};

// Random item-level assignment. Holdout puts round(train_frac * n) items in
// training (at least one item on each side); k-fold deals a shuffled order
// round-robin so fold sizes differ by at most one.
SplitPlan split_items(std::size_t item_count, SplitPlan::Mode mode, double train_frac, std::size_t folds,
                      std::uint64_t rng_seed);

// One Split per fold; ids ascend within each side.
std::vector<Split> materialize(const SplitPlan& plan);

struct ScoredPair {
  ItemId item = 0;
  NodeId v = 0;
  NodeId u = 0;
  bool label = false;
  double score = 0.0;
};

// Same construction as the trainer's examples, drawn with `eval_seed`.
// Throws ValidationError when the items produce no pair.
std::vector<ScoredPair> build_test_pairs(const DirectedGraph& g, const ActivationLog& log,
                                         std::span<const ItemId> test_items, const TrainConfig& cfg,
                                         std::uint64_t eval_seed);

// Fills score with the pair activation probability under `emb`.
void score_pairs(std::span<ScoredPair> pairs, std::span<const ItemTopics> items, const EmbeddingTable& emb);

// Mann-Whitney AUC, ties count one half. Throws UndefinedMetricError unless
// both classes are present.
double auc_roc(std::span<const ScoredPair> pairs);

// Mean precision at the rank of each positive, scores descending, ties kept
// in input order. Throws UndefinedMetricError without positives.
double average_precision(std::span<const ScoredPair> pairs);

// Per-item metrics averaged over items where the metric is defined.
double macro_auc_roc(std::span<const ScoredPair> pairs);
double macro_average_precision(std::span<const ScoredPair> pairs);

// (fpr, tpr) after each distinct score threshold, starting at (0, 0).
std::vector<std::pair<double, double>> roc_curve(std::span<const ScoredPair> pairs);

struct EvalOptions {
  std::uint64_t eval_seed = 20210301;
  bool macro = false;
  unsigned threads = 1;
};

struct FoldMetrics {
  std::size_t fold = 0;
  std::size_t train_items = 0;
  std::size_t test_items = 0;
  std::size_t test_pairs = 0;
  std::size_t test_positives = 0;
  double auc = 0.0;
  double ap = 0.0;
  double seconds = 0.0;
};

struct MeanStd {
  double mean = 0.0;
  double std = 0.0;  // sample standard deviation, 0 for a single fold
};

MeanStd mean_std(std::span<const double> xs);

struct EvalReport {
  std::vector<FoldMetrics> folds;
  MeanStd auc;
  MeanStd ap;
  MeanStd seconds;
  // Scored test pairs of the first fold, for ROC output.
  std::vector<ScoredPair> first_fold_pairs;
};

// Fits on each fold's training items and scores its test pairs.
EvalReport evaluate(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
                    const SplitPlan& plan, const TrainConfig& train_cfg, const EvalOptions& opts = {});

// Scores the test pairs of a split with a fixed embedding table (for
// example the generating one).
FoldMetrics evaluate_embeddings(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
                                const Split& split, const EmbeddingTable& emb, const TrainConfig& train_cfg,
                                const EvalOptions& opts = {});

}  // namespace ideoemb
