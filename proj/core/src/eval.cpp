#include "ideoemb/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>
#include <map>
#include <numeric>
#include <string>
#include <thread>

#include "ideoemb/errors.hpp"
#include "ideoemb/random.hpp"

namespace ideoemb {
namespace {

constexpr std::uint64_t kSplitStream = 21;

void require_both_classes(std::size_t positives, std::size_t negatives) {
  if (positives == 0 || negatives == 0)
    throw UndefinedMetricError("AUC needs at least one positive and one negative pair");
}

template <typename Metric>
double macro_average(std::span<const ScoredPair> pairs, Metric metric) {
  std::map<ItemId, std::vector<ScoredPair>> by_item;
  for (const auto& p : pairs) by_item[p.item].push_back(p);
  double total = 0.0;
  std::size_t defined = 0;
  for (const auto& [item, group] : by_item) {
    try {
      total += metric(std::span<const ScoredPair>(group));
      ++defined;
    } catch (const UndefinedMetricError&) {
    }
  }
  if (defined == 0) throw UndefinedMetricError("metric undefined on every item");
  return total / static_cast<double>(defined);
}

}  // namespace

SplitPlan split_items(std::size_t item_count, SplitPlan::Mode mode, double train_frac, std::size_t folds,
                      std::uint64_t rng_seed) {
  if (item_count < 2) throw ValidationError("splitting needs at least 2 items");
  SplitPlan plan;
  plan.mode = mode;
  plan.train_frac = train_frac;
  plan.fold_assignment.assign(item_count, 0);

  Rng rng(derive_seed(rng_seed, kSplitStream));
  const auto order = rng.sample_without_replacement(static_cast<std::uint32_t>(item_count),
                                                    static_cast<std::uint32_t>(item_count));
  if (mode == SplitPlan::Mode::kHoldout) {
    if (!(train_frac > 0.0 && train_frac < 1.0)) throw ValidationError("train_frac must lie in (0, 1)");
    auto n_train = static_cast<std::size_t>(std::llround(train_frac * static_cast<double>(item_count)));
    n_train = std::clamp<std::size_t>(n_train, 1, item_count - 1);
    plan.fold_count = 1;
    for (std::size_t j = n_train; j < item_count; ++j) plan.fold_assignment[order[j]] = 1;
  } else {
    if (folds < 2) throw ValidationError("k-fold needs at least 2 folds");
    if (item_count < folds) throw ValidationError("fewer items than folds");
    plan.fold_count = folds;
    for (std::size_t j = 0; j < item_count; ++j) plan.fold_assignment[order[j]] = j % folds;
  }
  return plan;
}

std::vector<Split> materialize(const SplitPlan& plan) {
  std::vector<Split> splits;
  const std::size_t n = plan.fold_assignment.size();
  if (plan.mode == SplitPlan::Mode::kHoldout) {
    Split s;
    for (std::size_t i = 0; i < n; ++i)
      (plan.fold_assignment[i] == 0 ? s.train : s.test).push_back(static_cast<ItemId>(i));
    splits.push_back(std::move(s));
    return splits;
  }
  splits.resize(plan.fold_count);
  for (std::size_t f = 0; f < plan.fold_count; ++f)
    for (std::size_t i = 0; i < n; ++i)
      (plan.fold_assignment[i] == f ? splits[f].test : splits[f].train).push_back(static_cast<ItemId>(i));
  return splits;
}

std::vector<ScoredPair> build_test_pairs(const DirectedGraph& g, const ActivationLog& log,
                                         std::span<const ItemId> test_items, const TrainConfig& cfg,
                                         std::uint64_t eval_seed) {
  Rng rng(eval_seed);
  const auto examples = build_examples(g, log, test_items, cfg, rng);
  if (examples.empty()) throw ValidationError("test items produce no (activator, follower) pairs");
  std::vector<ScoredPair> pairs;
  pairs.reserve(examples.size());
  for (const auto& x : examples) pairs.push_back({x.item, x.v, x.u, x.y, 0.0});
  return pairs;
}

void score_pairs(std::span<ScoredPair> pairs, std::span<const ItemTopics> items, const EmbeddingTable& emb) {
  for (auto& p : pairs) {
    if (p.item >= items.size()) throw ValidationError("pair refers to unknown item " + std::to_string(p.item));
    p.score = clamp_probability(pair_activation_prob(items[p.item], p.u, p.v, emb));
  }
}

double auc_roc(std::span<const ScoredPair> pairs) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a].score < pairs[b].score; });

  // Sum of positive ranks with tied groups sharing their average rank.
  double rank_sum = 0.0;
  std::size_t positives = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && pairs[order[j]].score == pairs[order[i]].score) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t r = i; r < j; ++r) {
      if (pairs[order[r]].label) {
        rank_sum += avg_rank;
        ++positives;
      }
    }
    i = j;
  }
  const std::size_t negatives = pairs.size() - positives;
  require_both_classes(positives, negatives);
  const double np = static_cast<double>(positives);
  return (rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(negatives));
}

double average_precision(std::span<const ScoredPair> pairs) {
  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pairs[a].score > pairs[b].score; });
  double total = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < order.size(); ++r) {
    if (!pairs[order[r]].label) continue;
    ++hits;
    total += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  if (hits == 0) throw UndefinedMetricError("average precision needs at least one positive pair");
  return total / static_cast<double>(hits);
}

double macro_auc_roc(std::span<const ScoredPair> pairs) { return macro_average(pairs, auc_roc); }

double macro_average_precision(std::span<const ScoredPair> pairs) {
  return macro_average(pairs, average_precision);
}

std::vector<std::pair<double, double>> roc_curve(std::span<const ScoredPair> pairs) {
  std::size_t positives = 0;
  for (const auto& p : pairs) positives += p.label ? 1 : 0;
  const std::size_t negatives = pairs.size() - positives;
  require_both_classes(positives, negatives);

  std::vector<std::size_t> order(pairs.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return pairs[a].score > pairs[b].score; });
  std::vector<std::pair<double, double>> curve{{0.0, 0.0}};
  std::size_t tp = 0;
  std::size_t fp = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && pairs[order[j]].score == pairs[order[i]].score) {
      (pairs[order[j]].label ? tp : fp) += 1;
      ++j;
    }
    curve.emplace_back(static_cast<double>(fp) / static_cast<double>(negatives),
                       static_cast<double>(tp) / static_cast<double>(positives));
    i = j;
  }
  return curve;
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd out;
  if (xs.empty()) return out;
  out.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (double x : xs) ss += (x - out.mean) * (x - out.mean);
    out.std = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  }
  return out;
}

FoldMetrics evaluate_embeddings(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
                                const Split& split, const EmbeddingTable& emb, const TrainConfig& train_cfg,
                                const EvalOptions& opts) {
  auto pairs = build_test_pairs(g, log, split.test, train_cfg, opts.eval_seed);
  score_pairs(pairs, items, emb);
  FoldMetrics m;
  m.train_items = split.train.size();
  m.test_items = split.test.size();
  m.test_pairs = pairs.size();
  for (const auto& p : pairs) m.test_positives += p.label ? 1 : 0;
  m.auc = opts.macro ? macro_auc_roc(pairs) : auc_roc(pairs);
  m.ap = opts.macro ? macro_average_precision(pairs) : average_precision(pairs);
  return m;
}

EvalReport evaluate(const DirectedGraph& g, std::span<const ItemTopics> items, const ActivationLog& log,
                    const SplitPlan& plan, const TrainConfig& train_cfg, const EvalOptions& opts) {
  const auto splits = materialize(plan);
  EvalReport report;
  report.folds.resize(splits.size());
  std::vector<std::vector<ScoredPair>> fold_pairs(splits.size());

  const auto run_fold = [&](std::size_t f) {
    const auto start = std::chrono::steady_clock::now();
    const auto& split = splits[f];
    const FitResult fitted = fit(g, items, log, split.train, train_cfg);
    auto pairs = build_test_pairs(g, log, split.test, train_cfg, opts.eval_seed);
    score_pairs(pairs, items, fitted.embeddings);

    FoldMetrics& m = report.folds[f];
    m.fold = f;
    m.train_items = split.train.size();
    m.test_items = split.test.size();
    m.test_pairs = pairs.size();
    for (const auto& p : pairs) m.test_positives += p.label ? 1 : 0;
    m.auc = opts.macro ? macro_auc_roc(pairs) : auc_roc(pairs);
    m.ap = opts.macro ? macro_average_precision(pairs) : average_precision(pairs);
    m.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    fold_pairs[f] = std::move(pairs);
  };

  const unsigned threads = std::max(1U, std::min<unsigned>(opts.threads, static_cast<unsigned>(splits.size())));
  if (threads == 1) {
    for (std::size_t f = 0; f < splits.size(); ++f) run_fold(f);
  } else {
    std::vector<std::exception_ptr> errors(splits.size());
    {
      std::vector<std::jthread> workers;
      for (unsigned w = 0; w < threads; ++w)
        workers.emplace_back([&, w] {
          for (std::size_t f = w; f < splits.size(); f += threads) {
            try {
              run_fold(f);
            } catch (...) {
              errors[f] = std::current_exception();
            }
          }
        });
    }
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  }

  std::vector<double> aucs, aps, secs;
  for (const auto& m : report.folds) {
    aucs.push_back(m.auc);
    aps.push_back(m.ap);
    secs.push_back(m.seconds);
  }
  report.auc = mean_std(aucs);
  report.ap = mean_std(aps);
  report.seconds = mean_std(secs);
  report.first_fold_pairs = std::move(fold_pairs.front());
  return report;
}

}  // namespace ideoemb
