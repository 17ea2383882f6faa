#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ideoemb/activations.hpp"
#include "ideoemb/eval.hpp"
#include "ideoemb/graph.hpp"
#include "ideoemb/model.hpp"
#include "ideoemb/trainer.hpp"

// Tab-separated formats. Readers skip blank lines and lines starting with
// '#', reject anything malformed with ParseError (path and line number), and
// never coerce. Writers are byte-deterministic.
namespace ideoemb::io {

// External string id <-> dense index, in first-seen order.
class IdMap {
 public:
  IdMap() = default;
  // "0", "1", ..., "n-1".
  static IdMap identity(std::size_t n);

  std::uint32_t intern(std::string_view name);
  std::optional<std::uint32_t> find(std::string_view name) const;
  const std::string& name(std::uint32_t id) const { return names_.at(id); }
  std::size_t size() const { return names_.size(); }

  friend bool operator==(const IdMap& a, const IdMap& b) { return a.names_ == b.names_; }

 private:
  std::vector<std::string> names_;
  std::unordered_map<std::string, std::uint32_t> index_;
};

// src<TAB>dst: dst follows src.
struct GraphFile {
  DirectedGraph graph;
  IdMap nodes;
};
GraphFile read_graph(const std::string& path);
GraphFile read_graph(std::istream& in, const std::string& name);
void write_graph(const std::string& path, const DirectedGraph& g, const IdMap& nodes);
void write_graph(std::ostream& out, const DirectedGraph& g, const IdMap& nodes);

// item_id<TAB>g1<TAB>...<TAB>gK. Rows summing to within 1e-6 of one are
// renormalized.
struct ItemsFile {
  std::vector<ItemTopics> items;
  IdMap ids;
};
// topic_count = 0 infers K from the first row.
ItemsFile read_items(const std::string& path, std::size_t topic_count = 0);
ItemsFile read_items(std::istream& in, const std::string& name, std::size_t topic_count = 0);
void write_items(const std::string& path, std::span<const ItemTopics> items, const IdMap& ids);
void write_items(std::ostream& out, std::span<const ItemTopics> items, const IdMap& ids);

// t<TAB>item_id<TAB>node_id.
ActivationLog read_activations(const std::string& path, const IdMap& nodes, const IdMap& items);
ActivationLog read_activations(std::istream& in, const std::string& name, const IdMap& nodes, const IdMap& items);
void write_activations(const std::string& path, const ActivationLog& log, const IdMap& nodes, const IdMap& items);
void write_activations(std::ostream& out, const ActivationLog& log, const IdMap& nodes, const IdMap& items);

// Header node_id, theta_1..theta_K, phi_1..phi_K; 9 significant digits.
struct EmbeddingsFile {
  EmbeddingTable embeddings;
  IdMap nodes;
};
EmbeddingsFile read_embeddings(const std::string& path, std::size_t topic_count = 0);
EmbeddingsFile read_embeddings(std::istream& in, const std::string& name, std::size_t topic_count = 0);
void write_embeddings(const std::string& path, const EmbeddingTable& emb, const IdMap& nodes);
void write_embeddings(std::ostream& out, const EmbeddingTable& emb, const IdMap& nodes);

// External id map of one column: dense_id<TAB>external_id.
void write_id_map(const std::string& path, const IdMap& ids);

// item_id<TAB>v<TAB>u rows to score.
struct Triple {
  ItemId item = 0;
  NodeId v = 0;
  NodeId u = 0;
};
std::vector<Triple> read_triples(const std::string& path, const IdMap& items, const IdMap& nodes);
std::vector<Triple> read_triples(std::istream& in, const std::string& name, const IdMap& items,
                                 const IdMap& nodes);
// item_id, v, u, score.
void write_scores(std::ostream& out, std::span<const Triple> triples, std::span<const double> scores,
                  const IdMap& items, const IdMap& nodes);

void write_trace(std::ostream& out, std::span<const EpochTrace> trace);

// One row per fold plus mean and std rows. The seconds column is only
// written when `with_timing` is set, so reports stay reproducible by default.
void write_eval_report(std::ostream& out, const EvalReport& report, bool with_timing);

// fpr<TAB>tpr.
void write_roc_curve(std::ostream& out, std::span<const std::pair<double, double>> curve);

// printf("%.<digits>g").
std::string format_double(double x, int digits = 9);

}  // namespace ideoemb::io
