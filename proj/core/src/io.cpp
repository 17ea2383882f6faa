#include "ideoemb/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>

#include "ideoemb/errors.hpp"

namespace ideoemb::io {
namespace {

std::ifstream open_in(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path + " for reading");
  return in;
}

std::ofstream open_out(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path + " for writing");
  return out;
}

void finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw IoError("write failed: " + path);
}

// Line-oriented TSV reader tracking 1-based line numbers.
class TsvReader {
 public:
  TsvReader(std::istream& in, std::string name) : in_(in), name_(std::move(name)) {}

  // Next data row; blank and '#' lines are skipped.
  bool next(std::vector<std::string_view>& fields) {
    while (std::getline(in_, line_)) {
      ++line_no_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      if (line_.empty() || line_.front() == '#') continue;
      fields.clear();
      std::size_t start = 0;
      for (;;) {
        const auto tab = line_.find('\t', start);
        fields.emplace_back(std::string_view(line_).substr(start, tab - start));
        if (tab == std::string::npos) break;
        start = tab + 1;
      }
      return true;
    }
    return false;
  }

  [[noreturn]] void fail(const std::string& message) const { throw ParseError(name_, line_no_, message); }

  std::size_t line() const { return line_no_; }
  const std::string& name() const { return name_; }

 private:
  std::istream& in_;
  std::string name_;
  std::string line_;
  std::size_t line_no_ = 0;
};

double parse_double(const TsvReader& r, std::string_view text, const char* what) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v))
    r.fail(std::string("bad ") + what + " '" + std::string(text) + "'");
  return v;
}

Timestamp parse_time(const TsvReader& r, std::string_view text) {
  Timestamp v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (text.empty() || ec != std::errc() || ptr != text.data() + text.size() || v < 0)
    r.fail("timestamp must be a non-negative integer, got '" + std::string(text) + "'");
  return v;
}

void require_name(const TsvReader& r, std::string_view text, const char* what) {
  if (text.empty()) r.fail(std::string("empty ") + what);
}

}  // namespace

IdMap IdMap::identity(std::size_t n) {
  IdMap m;
  for (std::size_t i = 0; i < n; ++i) m.intern(std::to_string(i));
  return m;
}

std::uint32_t IdMap::intern(std::string_view name) {
  std::string key(name);
  const auto it = index_.find(key);
  if (it != index_.end()) return it->second;
  const auto id = static_cast<std::uint32_t>(names_.size());
  names_.push_back(key);
  index_.emplace(std::move(key), id);
  return id;
}

std::optional<std::uint32_t> IdMap::find(std::string_view name) const {
  const auto it = index_.find(std::string(name));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::string format_double(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// --- graph ---------------------------------------------------------------

GraphFile read_graph(std::istream& in, const std::string& name) {
  TsvReader r(in, name);
  GraphFile out;
  std::vector<Edge> edges;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (f.size() != 2) r.fail("expected src<TAB>dst, got " + std::to_string(f.size()) + " columns");
    require_name(r, f[0], "source id");
    require_name(r, f[1], "target id");
    if (f[0] == f[1]) r.fail("self-loop on node '" + std::string(f[0]) + "'");
    const NodeId src = out.nodes.intern(f[0]);
    const NodeId dst = out.nodes.intern(f[1]);
    edges.emplace_back(src, dst);
  }
  out.graph = build_graph(edges, out.nodes.size());
  return out;
}

GraphFile read_graph(const std::string& path) {
  auto in = open_in(path);
  return read_graph(in, path);
}

void write_graph(std::ostream& out, const DirectedGraph& g, const IdMap& nodes) {
  if (nodes.size() < g.node_count()) throw ValidationError("id map smaller than graph");
  for (const auto& [u, v] : g.edges()) out << nodes.name(u) << '\t' << nodes.name(v) << '\n';
}

void write_graph(const std::string& path, const DirectedGraph& g, const IdMap& nodes) {
  auto out = open_out(path);
  write_graph(out, g, nodes);
  finish(out, path);
}

// --- items ---------------------------------------------------------------

ItemsFile read_items(std::istream& in, const std::string& name, std::size_t topic_count) {
  TsvReader r(in, name);
  ItemsFile out;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (topic_count == 0) {
      if (f.size() < 2) r.fail("item row needs an id and at least one topic weight");
      topic_count = f.size() - 1;
    }
    if (f.size() != topic_count + 1)
      r.fail("expected " + std::to_string(topic_count + 1) + " columns, got " + std::to_string(f.size()));
    require_name(r, f[0], "item id");
    if (out.ids.find(f[0])) r.fail("duplicate item id '" + std::string(f[0]) + "'");
    std::vector<double> gamma(topic_count);
    double sum = 0.0;
    for (std::size_t k = 0; k < topic_count; ++k) {
      gamma[k] = parse_double(r, f[k + 1], "topic weight");
      if (gamma[k] < 0.0) r.fail("negative topic weight in column " + std::to_string(k + 2));
      sum += gamma[k];
    }
    if (std::abs(sum - 1.0) > 1e-6) r.fail("topic weights sum to " + format_double(sum) + ", expected 1");
    // Rows already normalized to working precision are kept bit-exact.
    if (std::abs(sum - 1.0) > 1e-12)
      for (double& g : gamma) g /= sum;
    const ItemId id = out.ids.intern(f[0]);
    out.items.emplace_back(id, std::move(gamma));
  }
  return out;
}

ItemsFile read_items(const std::string& path, std::size_t topic_count) {
  auto in = open_in(path);
  return read_items(in, path, topic_count);
}

void write_items(std::ostream& out, std::span<const ItemTopics> items, const IdMap& ids) {
  for (const auto& it : items) {
    out << ids.name(it.item_id());
    for (double g : it.gamma()) out << '\t' << format_double(g, 17);
    out << '\n';
  }
}

void write_items(const std::string& path, std::span<const ItemTopics> items, const IdMap& ids) {
  auto out = open_out(path);
  write_items(out, items, ids);
  finish(out, path);
}

// --- activations ---------------------------------------------------------

ActivationLog read_activations(std::istream& in, const std::string& name, const IdMap& nodes, const IdMap& items) {
  TsvReader r(in, name);
  std::vector<Activation> acts;
  std::unordered_map<std::uint64_t, std::size_t> first_line;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (f.size() != 3) r.fail("expected t<TAB>item_id<TAB>node_id, got " + std::to_string(f.size()) + " columns");
    const Timestamp t = parse_time(r, f[0]);
    const auto item = items.find(f[1]);
    if (!item) r.fail("unknown item id '" + std::string(f[1]) + "'");
    const auto node = nodes.find(f[2]);
    if (!node) r.fail("unknown node id '" + std::string(f[2]) + "'");
    const std::uint64_t key = (std::uint64_t{*item} << 32) | *node;
    const auto [it, fresh] = first_line.emplace(key, r.line());
    if (!fresh)
      r.fail("duplicate activation of node '" + std::string(f[2]) + "' on item '" + std::string(f[1]) +
             "' (first at line " + std::to_string(it->second) + ")");
    acts.push_back({t, *item, *node});
  }
  return ActivationLog(std::move(acts), items.size());
}

ActivationLog read_activations(const std::string& path, const IdMap& nodes, const IdMap& items) {
  auto in = open_in(path);
  return read_activations(in, path, nodes, items);
}

void write_activations(std::ostream& out, const ActivationLog& log, const IdMap& nodes, const IdMap& items) {
  for (const auto& a : log.all()) out << a.t << '\t' << items.name(a.item) << '\t' << nodes.name(a.node) << '\n';
}

void write_activations(const std::string& path, const ActivationLog& log, const IdMap& nodes, const IdMap& items) {
  auto out = open_out(path);
  write_activations(out, log, nodes, items);
  finish(out, path);
}

// --- embeddings ----------------------------------------------------------

EmbeddingsFile read_embeddings(std::istream& in, const std::string& name, std::size_t topic_count) {
  TsvReader r(in, name);
  std::vector<std::string_view> f;
  if (!r.next(f)) throw ParseError(name, 1, "missing header");

  if (topic_count == 0) {
    if (f.size() < 3 || (f.size() - 1) % 2 != 0) r.fail("header must be node_id, theta_1..theta_K, phi_1..phi_K");
    topic_count = (f.size() - 1) / 2;
  }
  std::vector<std::string> expected{"node_id"};
  for (std::size_t k = 1; k <= topic_count; ++k) expected.push_back("theta_" + std::to_string(k));
  for (std::size_t k = 1; k <= topic_count; ++k) expected.push_back("phi_" + std::to_string(k));
  for (std::size_t c = 0; c < expected.size(); ++c) {
    if (c >= f.size()) r.fail("missing column " + expected[c]);
    if (f[c] != expected[c]) r.fail("column " + std::to_string(c + 1) + " is '" + std::string(f[c]) + "', expected " + expected[c]);
  }
  if (f.size() > expected.size()) r.fail("unexpected extra column '" + std::string(f[expected.size()]) + "'");

  EmbeddingsFile out;
  std::vector<double> theta, phi;
  while (r.next(f)) {
    if (f.size() != expected.size()) {
      if (f.size() < expected.size()) r.fail("missing column " + expected[f.size()]);
      r.fail("too many columns: " + std::to_string(f.size()));
    }
    require_name(r, f[0], "node id");
    if (out.nodes.find(f[0])) r.fail("duplicate node id '" + std::string(f[0]) + "'");
    out.nodes.intern(f[0]);
    for (std::size_t c = 1; c < f.size(); ++c) {
      const double v = parse_double(r, f[c], expected[c].c_str());
      if (v < 0.0 || v > 1.0) r.fail(expected[c] + " = " + std::string(f[c]) + " outside [0,1]");
      (c <= topic_count ? theta : phi).push_back(v);
    }
  }
  out.embeddings = EmbeddingTable(out.nodes.size(), topic_count, std::move(theta), std::move(phi));
  return out;
}

EmbeddingsFile read_embeddings(const std::string& path, std::size_t topic_count) {
  auto in = open_in(path);
  return read_embeddings(in, path, topic_count);
}

void write_embeddings(std::ostream& out, const EmbeddingTable& emb, const IdMap& nodes) {
  const std::size_t k_count = emb.topic_count();
  out << "node_id";
  for (std::size_t k = 1; k <= k_count; ++k) out << "\ttheta_" << k;
  for (std::size_t k = 1; k <= k_count; ++k) out << "\tphi_" << k;
  out << '\n';
  for (NodeId u = 0; u < emb.node_count(); ++u) {
    out << nodes.name(u);
    for (double x : emb.theta(u)) out << '\t' << format_double(x);
    for (double x : emb.phi(u)) out << '\t' << format_double(x);
    out << '\n';
  }
}

void write_embeddings(const std::string& path, const EmbeddingTable& emb, const IdMap& nodes) {
  auto out = open_out(path);
  write_embeddings(out, emb, nodes);
  finish(out, path);
}

void write_id_map(const std::string& path, const IdMap& ids) {
  auto out = open_out(path);
  for (std::uint32_t i = 0; i < ids.size(); ++i) out << i << '\t' << ids.name(i) << '\n';
  finish(out, path);
}

// --- prediction ----------------------------------------------------------

std::vector<Triple> read_triples(std::istream& in, const std::string& name, const IdMap& items,
                                 const IdMap& nodes) {
  TsvReader r(in, name);
  std::vector<Triple> out;
  std::vector<std::string_view> f;
  while (r.next(f)) {
    if (f.size() != 3) r.fail("expected item_id<TAB>v<TAB>u, got " + std::to_string(f.size()) + " columns");
    const auto item = items.find(f[0]);
    if (!item) r.fail("unknown item id '" + std::string(f[0]) + "'");
    const auto v = nodes.find(f[1]);
    if (!v) r.fail("unknown node id '" + std::string(f[1]) + "'");
    const auto u = nodes.find(f[2]);
    if (!u) r.fail("unknown node id '" + std::string(f[2]) + "'");
    out.push_back({*item, *v, *u});
  }
  return out;
}

std::vector<Triple> read_triples(const std::string& path, const IdMap& items, const IdMap& nodes) {
  auto in = open_in(path);
  return read_triples(in, path, items, nodes);
}

void write_scores(std::ostream& out, std::span<const Triple> triples, std::span<const double> scores,
                  const IdMap& items, const IdMap& nodes) {
  out << "item_id\tv\tu\tscore\n";
  for (std::size_t j = 0; j < triples.size(); ++j)
    out << items.name(triples[j].item) << '\t' << nodes.name(triples[j].v) << '\t' << nodes.name(triples[j].u)
        << '\t' << format_double(scores[j]) << '\n';
}

// --- reports -------------------------------------------------------------

void write_trace(std::ostream& out, std::span<const EpochTrace> trace) {
  out << "restart\tepoch\tlearning_rate\texamples\tmean_loglik\n";
  for (const auto& t : trace)
    out << t.restart << '\t' << t.epoch << '\t' << format_double(t.learning_rate) << '\t' << t.examples << '\t'
        << format_double(t.mean_loglik, 12) << '\n';
}

void write_eval_report(std::ostream& out, const EvalReport& report, bool with_timing) {
  out << "fold\ttrain_items\ttest_items\ttest_pairs\ttest_positives\tauc_roc\tavg_precision";
  if (with_timing) out << "\tseconds";
  out << '\n';
  for (const auto& m : report.folds) {
    out << m.fold << '\t' << m.train_items << '\t' << m.test_items << '\t' << m.test_pairs << '\t'
        << m.test_positives << '\t' << format_double(m.auc) << '\t' << format_double(m.ap);
    if (with_timing) out << '\t' << format_double(m.seconds, 4);
    out << '\n';
  }
  const auto summary = [&](const char* label, double auc, double ap, double secs) {
    out << label << "\t\t\t\t\t" << format_double(auc) << '\t' << format_double(ap);
    if (with_timing) out << '\t' << format_double(secs, 4);
    out << '\n';
  };
  summary("mean", report.auc.mean, report.ap.mean, report.seconds.mean);
  summary("std", report.auc.std, report.ap.std, report.seconds.std);
}

void write_roc_curve(std::ostream& out, std::span<const std::pair<double, double>> curve) {
  out << "fpr\ttpr\n";
  for (const auto& [fpr, tpr] : curve) out << format_double(fpr) << '\t' << format_double(tpr) << '\n';
}

}  // namespace ideoemb::io
