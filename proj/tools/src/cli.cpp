#include "cli.hpp"

#include <CLI11.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string_view>

#include "ideoemb/errors.hpp"
#include "ideoemb/io.hpp"
#include "ideoemb/random.hpp"

namespace ideoemb::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::uint64_t seed = 1;
  unsigned threads = 1;
  bool verbose = false;
};

struct InputPaths {
  std::string graph;
  std::string items;
  std::string activations;
  std::size_t topics = 0;  // 0 infers K from the items file
};

struct Loaded {
  io::GraphFile graph;
  io::ItemsFile items;
  ActivationLog log;
};

class Logger {
 public:
  Logger(std::ostream& err, bool on) : err_(err), on_(on) {}
  template <typename... Args>
  void operator()(const Args&... args) const {
    if (!on_) return;
    err_ << "[ideoemb] ";
    (err_ << ... << args);
    err_ << '\n';
  }

 private:
  std::ostream& err_;
  bool on_;
};

const CLI::Validator kAtLeastOne(
    [](std::string& text) -> std::string {
      double v = 0.0;
      if (!CLI::detail::lexical_cast(text, v) || !(v > 0.0)) return "must be positive, got " + text;
      return {};
    },
    "POSITIVE");

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void close_out(std::ofstream& out, const std::string& path) {
  out.close();
  if (!out) throw IoError("write failed: " + path);
}

Loaded load_inputs(const InputPaths& in) {
  Loaded d{io::read_graph(in.graph), io::read_items(in.items, in.topics), ActivationLog{}};
  if (d.items.items.empty()) throw ValidationError(in.items + ": no items");
  d.log = io::read_activations(in.activations, d.graph.nodes, d.items.ids);
  return d;
}

void add_input_options(CLI::App* app, InputPaths& in) {
  app->add_option("--graph", in.graph, "Follower graph TSV (src<TAB>dst)")->required();
  app->add_option("--items", in.items, "Item topic TSV (item_id<TAB>g1..gK)")->required();
  app->add_option("--activations", in.activations, "Activation TSV (t<TAB>item_id<TAB>node_id)")->required();
  app->add_option("--topics", in.topics, "Topic count K; 0 infers it from the items file")->capture_default_str();
}

void add_train_options(CLI::App* app, TrainConfig& cfg) {
  app->add_option("--epochs", cfg.epochs, "Training epochs")->capture_default_str()->check(kAtLeastOne);
  app->add_option("--lr-init", cfg.lr_init, "Initial global step size")->capture_default_str();
  app->add_option("--lr-floor", cfg.lr_floor, "Final global step size")->capture_default_str();
  app->add_option("--seed-sample-size", cfg.seed_sample_size, "Activators sampled per item and epoch")
      ->capture_default_str()
      ->check(kAtLeastOne);
  app->add_option("--negative-ratio", cfg.negative_ratio, "Negatives drawn per positive")->capture_default_str();
  app->add_option("--clamp-eps", cfg.clamp_eps, "Parameters are kept in [eps, 1 - eps]")->capture_default_str();
  app->add_option("--restarts", cfg.restarts, "Independent restarts; the most likely one is kept")
      ->capture_default_str()
      ->check(kAtLeastOne);
}

void add_gen_options(CLI::App* app, GenConfig& cfg, std::string& graph) {
  app->add_option("--graph", graph, "complete:N or ba:N:M")->capture_default_str();
  app->add_option("--topics", cfg.topics, "Ideological axes K")->capture_default_str()->check(kAtLeastOne);
  app->add_option("--polarization", cfg.polarization, "p; polarities ~ Beta(1/p, 1/p)")
      ->capture_default_str()
      ->check(kAtLeastOne);
  app->add_option("--alpha", cfg.alpha, "Interest prior Beta(alpha, beta)")->capture_default_str();
  app->add_option("--beta", cfg.beta, "Interest prior Beta(alpha, beta)")->capture_default_str();
}

std::string one_line(std::string s) {
  for (char& c : s)
    if (c == '\n' || c == '\r') c = ' ';
  while (!s.empty() && s.back() == ' ') s.pop_back();
  return s;
}

// --- subcommands ---------------------------------------------------------

struct GenerateArgs {
  GenConfig gen;
  std::string graph = "complete:100";
  std::string out_dir;
};

void cmd_generate(const GenerateArgs& a, const Globals& g, std::ostream& out, const Logger& log) {
  GenConfig cfg = a.gen;
  cfg.graph = GraphSpec::parse(a.graph);
  cfg.rng_seed = g.seed;
  cfg.validate();
  fs::create_directories(a.out_dir);
  log("generating ", cfg.items, " items on ", cfg.graph.to_string());
  const Dataset ds = generate_dataset(cfg, g.threads);
  const auto nodes = io::IdMap::identity(ds.graph.node_count());
  const auto items = io::IdMap::identity(ds.items.size());
  const fs::path dir(a.out_dir);
  io::write_graph((dir / "graph.tsv").string(), ds.graph, nodes);
  io::write_items((dir / "items.tsv").string(), ds.items, items);
  io::write_activations((dir / "activations.tsv").string(), ds.log, nodes, items);
  io::write_embeddings((dir / "embeddings.tsv").string(), ds.truth, nodes);
  out << "wrote " << ds.graph.node_count() << " nodes, " << ds.graph.edge_count() << " edges, " << ds.items.size()
      << " items, " << ds.log.size() << " activations to " << a.out_dir << '\n';
}

struct FitArgs {
  InputPaths in;
  TrainConfig train;
  std::string embeddings_out;
  std::string trace_out;
};

void cmd_fit(const FitArgs& a, const Globals& g, std::ostream& out, const Logger& log) {
  TrainConfig cfg = a.train;
  cfg.rng_seed = g.seed;
  cfg.validate();
  const Loaded d = load_inputs(a.in);
  log("fitting on ", d.items.items.size(), " items, ", d.log.size(), " activations");
  const FitResult r = fit(d.graph.graph, d.items.items, d.log, cfg);
  io::write_embeddings(a.embeddings_out, r.embeddings, d.graph.nodes);
  if (!a.trace_out.empty()) {
    auto f = open_out(a.trace_out);
    io::write_trace(f, r.trace);
    close_out(f, a.trace_out);
  }
  for (std::size_t i = 0; i < r.restart_objectives.size(); ++i)
    out << "restart " << i << " objective " << io::format_double(r.restart_objectives[i])
        << (i == r.best_restart ? " selected" : "") << '\n';
}

struct PredictArgs {
  std::string embeddings;
  std::string items;
  std::string pairs;
  std::string scores_out;
};

void cmd_predict(const PredictArgs& a, const Globals&, std::ostream& out, const Logger& log) {
  const auto emb = io::read_embeddings(a.embeddings);
  const auto items = io::read_items(a.items, emb.embeddings.topic_count());
  const auto triples = io::read_triples(a.pairs, items.ids, emb.nodes);
  log("scoring ", triples.size(), " pairs");
  std::vector<double> scores;
  scores.reserve(triples.size());
  for (const auto& t : triples) scores.push_back(clamp_probability(pair_activation_prob(items.items[t.item], t.u, t.v, emb.embeddings)));
  if (a.scores_out.empty() || a.scores_out == "-") {
    io::write_scores(out, triples, scores, items.ids, emb.nodes);
    return;
  }
  auto f = open_out(a.scores_out);
  io::write_scores(f, triples, scores, items.ids, emb.nodes);
  close_out(f, a.scores_out);
}

struct EvaluateArgs {
  InputPaths in;
  TrainConfig train;
  std::string mode = "holdout";
  double train_frac = 0.9;
  std::size_t folds = 10;
  std::uint64_t eval_seed = 20210301;
  bool macro = false;
  bool timing = false;
  std::string fixed_embeddings;
  std::string report_out;
  std::string roc_out;
};

void cmd_evaluate(const EvaluateArgs& a, const Globals& g, std::ostream& out, const Logger& log) {
  TrainConfig cfg = a.train;
  cfg.rng_seed = g.seed;
  cfg.validate();
  const Loaded d = load_inputs(a.in);
  const auto mode = a.mode == "kfold" ? SplitPlan::Mode::kKFold : SplitPlan::Mode::kHoldout;
  const SplitPlan plan = split_items(d.items.items.size(), mode, a.train_frac, a.folds, g.seed);
  EvalOptions opts;
  opts.eval_seed = a.eval_seed;
  opts.macro = a.macro;
  opts.threads = g.threads;

  EvalReport report;
  if (a.fixed_embeddings.empty()) {
    log("evaluating ", plan.fold_count, " fold(s)");
    report = evaluate(d.graph.graph, d.items.items, d.log, plan, cfg, opts);
  } else {
    // Score held-out pairs with a given table instead of fitting.
    const auto emb = io::read_embeddings(a.fixed_embeddings, d.items.items.front().topic_count());
    if (!(emb.nodes == d.graph.nodes)) throw ValidationError(a.fixed_embeddings + ": node ids differ from the graph");
    const auto splits = materialize(plan);
    std::vector<double> aucs, aps;
    for (std::size_t f = 0; f < splits.size(); ++f) {
      FoldMetrics m = evaluate_embeddings(d.graph.graph, d.items.items, d.log, splits[f], emb.embeddings, cfg, opts);
      m.fold = f;
      aucs.push_back(m.auc);
      aps.push_back(m.ap);
      report.folds.push_back(m);
      if (f == 0) {
        report.first_fold_pairs = build_test_pairs(d.graph.graph, d.log, splits[0].test, cfg, opts.eval_seed);
        score_pairs(report.first_fold_pairs, d.items.items, emb.embeddings);
      }
    }
    report.auc = mean_std(aucs);
    report.ap = mean_std(aps);
  }

  if (a.report_out.empty() || a.report_out == "-") {
    io::write_eval_report(out, report, a.timing);
  } else {
    auto f = open_out(a.report_out);
    io::write_eval_report(f, report, a.timing);
    close_out(f, a.report_out);
    out << "auc_roc " << io::format_double(report.auc.mean, 4) << " +- " << io::format_double(report.auc.std, 2)
        << "  avg_precision " << io::format_double(report.ap.mean, 4) << " +- "
        << io::format_double(report.ap.std, 2) << '\n';
  }
  if (!a.roc_out.empty()) {
    auto f = open_out(a.roc_out);
    io::write_roc_curve(f, roc_curve(report.first_fold_pairs));
    close_out(f, a.roc_out);
  }
}

struct ReproduceArgs {
  GenConfig gen;
  TrainConfig train;
  std::vector<std::string> graphs{"complete:100", "ba:100:10"};
  std::vector<double> polarizations{1, 4, 16};
  std::vector<std::size_t> item_counts{1000, 10000, 100000};
  std::size_t replicates = 3;
  std::string table_out;
};

void write_synthetic_header(std::ostream& out) {
  out << "graph\tpolarization\titems\treplicates\tauc_roc\tauc_std\tavg_precision\tap_std\ttruth_auc\n";
}

void write_synthetic_row(std::ostream& out, const SyntheticResult& r) {
  const auto auc = mean_std(r.auc);
  const auto ap = mean_std(r.ap);
  out << r.cell.graph.to_string() << '\t' << io::format_double(r.cell.polarization) << '\t' << r.cell.items << '\t'
      << r.auc.size() << '\t' << io::format_double(auc.mean, 4) << '\t' << io::format_double(auc.std, 2) << '\t'
      << io::format_double(ap.mean, 4) << '\t' << io::format_double(ap.std, 2) << '\t'
      << io::format_double(mean_std(r.truth_auc).mean, 4) << '\n';
}

void cmd_reproduce(const ReproduceArgs& a, const Globals& g, std::ostream& out, const Logger& log) {
  a.train.validate();
  std::ofstream file;
  if (!a.table_out.empty()) file = open_out(a.table_out);
  write_synthetic_header(out);
  if (file.is_open()) write_synthetic_header(file);
  // Items vary fastest, as in the paper's tables.
  for (const auto& graph : a.graphs) {
    for (double p : a.polarizations) {
      for (std::size_t n : a.item_counts) {
        const SyntheticCell cell{GraphSpec::parse(graph), p, n};
        log("running ", graph, " p=", p, " items=", n);
        const auto r = run_synthetic_cell(cell, a.gen, a.train, a.replicates, g.seed, g.threads);
        write_synthetic_row(out, r);
        out.flush();
        if (file.is_open()) write_synthetic_row(file, r);
        log("done in ", io::format_double(r.seconds, 3), " s");
      }
    }
  }
  if (file.is_open()) close_out(file, a.table_out);
}

}  // namespace

SyntheticResult run_synthetic_cell(const SyntheticCell& cell, const GenConfig& gen, const TrainConfig& train,
                                   std::size_t replicates, std::uint64_t seed, unsigned threads) {
  SyntheticResult r;
  r.cell = cell;
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t rep = 0; rep < replicates; ++rep) {
    GenConfig gcfg = gen;
    gcfg.graph = cell.graph;
    gcfg.polarization = cell.polarization;
    gcfg.items = cell.items;
    gcfg.rng_seed = seed + rep;
    const Dataset ds = generate_dataset(gcfg, threads);
    TrainConfig tcfg = train;
    tcfg.rng_seed = seed + rep;
    const auto plan = split_items(ds.items.size(), SplitPlan::Mode::kHoldout, 0.9, 1, seed + rep);
    const auto report = evaluate(ds.graph, ds.items, ds.log, plan, tcfg);
    r.auc.push_back(report.auc.mean);
    r.ap.push_back(report.ap.mean);
    r.truth_auc.push_back(evaluate_embeddings(ds.graph, ds.items, ds.log, materialize(plan)[0], ds.truth, tcfg).auc);
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Ideological embeddings from information cascades", "ideoemb"};
  app.require_subcommand(1);
  app.fallthrough();  // global flags may follow the subcommand
  app.set_config("--config", "", "key=value file; command-line flags take precedence");
  Globals g;
  app.add_option("--seed", g.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "Worker threads")->capture_default_str()->check(kAtLeastOne);
  app.add_flag("--verbose,-v", g.verbose, "Progress on stderr");
  bool print_config = false;
  app.add_flag("--print-config", print_config, "Print every setting with its value and exit")->configurable(false);

  GenerateArgs gen;
  auto* sc_gen = app.add_subcommand("generate", "Simulate a synthetic dataset");
  add_gen_options(sc_gen, gen.gen, gen.graph);
  sc_gen->add_option("--items", gen.gen.items, "Number of items")->capture_default_str()->check(kAtLeastOne);
  sc_gen->add_option("--out", gen.out_dir, "Output directory")->required();

  FitArgs fa;
  auto* sc_fit = app.add_subcommand("fit", "Infer interests and polarities");
  add_input_options(sc_fit, fa.in);
  add_train_options(sc_fit, fa.train);
  sc_fit->add_option("--out", fa.embeddings_out, "Embeddings TSV to write")->required();
  sc_fit->add_option("--trace", fa.trace_out, "Per-epoch objective TSV to write");

  PredictArgs pa;
  auto* sc_pred = app.add_subcommand("predict", "Score (item, v, u) triples");
  sc_pred->add_option("--embeddings", pa.embeddings, "Embeddings TSV")->required();
  sc_pred->add_option("--items", pa.items, "Item topic TSV")->required();
  sc_pred->add_option("--pairs", pa.pairs, "Triples TSV (item_id<TAB>v<TAB>u)")->required();
  sc_pred->add_option("--out", pa.scores_out, "Scores TSV; stdout when omitted");

  EvaluateArgs ea;
  auto* sc_eval = app.add_subcommand("evaluate", "Fit on training items and score held-out pairs");
  add_input_options(sc_eval, ea.in);
  add_train_options(sc_eval, ea.train);
  sc_eval->add_option("--mode", ea.mode, "holdout or kfold")
      ->capture_default_str()
      ->check(CLI::IsMember({"holdout", "kfold"}));
  sc_eval->add_option("--train-frac", ea.train_frac, "Holdout training fraction")->capture_default_str();
  sc_eval->add_option("--folds", ea.folds, "Fold count for kfold")->capture_default_str();
  sc_eval->add_option("--eval-seed", ea.eval_seed, "Seed of the test-pair draw")->capture_default_str();
  sc_eval->add_flag("--macro", ea.macro, "Average metrics per item instead of pooling");
  sc_eval->add_flag("--timing", ea.timing, "Add a wall-clock seconds column to the report");
  sc_eval->add_option("--embeddings", ea.fixed_embeddings, "Score with this table instead of fitting");
  sc_eval->add_option("--report", ea.report_out, "Report TSV; stdout when omitted");
  sc_eval->add_option("--roc", ea.roc_out, "ROC curve TSV of the first fold");

  ReproduceArgs ra;
  auto* sc_rep = app.add_subcommand("reproduce-synthetic", "Run the synthetic grid and print one row per setting");
  sc_rep->add_option("--graphs", ra.graphs, "Graph specs")->capture_default_str()->delimiter(',');
  sc_rep->add_option("--polarizations", ra.polarizations, "Polarization values")
      ->capture_default_str()
      ->delimiter(',');
  sc_rep->add_option("--item-counts", ra.item_counts, "Item counts")->capture_default_str()->delimiter(',');
  sc_rep->add_option("--replicates", ra.replicates, "Replicate seeds per setting")
      ->capture_default_str()
      ->check(kAtLeastOne);
  sc_rep->add_option("--topics", ra.gen.topics, "Ideological axes K")->capture_default_str();
  sc_rep->add_option("--table", ra.table_out, "Also write the table to this TSV");
  add_train_options(sc_rep, ra.train);

  // Printing the configuration must not demand the paths a real run needs.
  for (int i = 1; i < argc; ++i) {
    if (std::string_view(argv[i]) != "--print-config") continue;
    app.require_subcommand(0, 1);
    for (auto* sub : app.get_subcommands({}))
      for (auto* opt : sub->get_options()) opt->required(false);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 2;
  }
  if (print_config) {
    out << app.config_to_str(true, false);
    return 0;
  }

  const Logger log(err, g.verbose);
  try {
    if (sc_gen->parsed()) cmd_generate(gen, g, out, log);
    if (sc_fit->parsed()) cmd_fit(fa, g, out, log);
    if (sc_pred->parsed()) cmd_predict(pa, g, out, log);
    if (sc_eval->parsed()) cmd_evaluate(ea, g, out, log);
    if (sc_rep->parsed()) cmd_reproduce(ra, g, out, log);
  } catch (const std::exception& e) {
    err << "error: " << one_line(e.what()) << '\n';
    return 1;
  }
  return 0;
}

}  // namespace ideoemb::cli
