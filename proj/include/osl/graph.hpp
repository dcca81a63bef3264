#pragma once

#include <string>
#include <vector>

#include "osl/rational.hpp"
#include "osl/words.hpp"

namespace osl {

// Half-edge h: edge_of(h) = h/2; even h runs along the edge (from -> to),
// odd h against it.  A germ at a vertex is an outgoing half-edge.
using Half = int;
inline int edge_of(Half h) { return h >> 1; }
inline Half rev(Half h) { return h ^ 1; }
inline Half fwd_half(int e) { return 2 * e; }
inline bool is_fwd(Half h) { return (h & 1) == 0; }

// An edge path is a sequence of half-edges, consecutive ones composable.
using EdgePath = std::vector<Half>;

EdgePath reduce_path(EdgePath p);     // cancel adjacent backtracks
EdgePath inverse_path(const EdgePath& p);
EdgePath concat_reduce_path(const EdgePath& a, const EdgePath& b);
EdgePath cyclic_reduce_path(EdgePath p);  // may return empty

enum class VertexKind {
  Real,     // ordinary vertex
  Cut,      // degree-2 survivor of a subdivision or folding quotient
  HairTip,  // free end of a decoration hair
};

struct EdgeRec {
  int from = 0, to = 0;
  Rational length;
};

// A metric graph with a marking.  The marking is carried by generator_reps:
// reduced closed edge paths at base_vertex representing the generators.
// finalize() validates everything and precomputes, per non-tree edge, the
// word its chord loop represents, which makes conjugacy classes of loops
// cheap to read off.
struct MarkedGraph {
  Basis basis;
  int num_vertices = 0;
  std::vector<EdgeRec> edges;
  int base_vertex = 0;
  std::vector<EdgePath> generator_reps;
  std::vector<VertexKind> vertex_kinds;

  // Derived by finalize().
  std::vector<int> tree_parent_half;  // arriving half-edge from parent; -1 at root
  std::vector<char> is_tree_edge;     // per edge
  std::vector<Word> chord_word;       // per edge; empty for tree edges

  int rank() const { return static_cast<int>(basis.size()); }
  int head(Half h) const {
    const EdgeRec& e = edges[edge_of(h)];
    return is_fwd(h) ? e.to : e.from;
  }
  int tail(Half h) const { return head(rev(h)); }
  Rational volume() const;
  int degree(int v) const;
  // Per vertex, outgoing half-edges in ascending order.
  std::vector<std::vector<Half>> stars() const;
};

// Checks connectivity, positive lengths, path sanity of the reps, that the
// first Betti number equals the rank, and that the marking is an isomorphism
// (via basis inversion); fills the derived fields.
void finalize(MarkedGraph& g);

// Element of F_n spelled by a closed edge path based at base_vertex.
Word path_word(const MarkedGraph& g, const EdgePath& closed_path);

// Conjugacy class of any closed edge path (basepoint irrelevant).
ConjugacyClass graph_class(const MarkedGraph& g, const EdgePath& loop);

// The immersed (cyclically reduced) edge-path representative of a class.
// Throws TrivialWord for the identity class.
EdgePath immersed_loop(const MarkedGraph& g, const ConjugacyClass& cls);

Rational path_length(const MarkedGraph& g, const EdgePath& p);
Rational loop_length(const MarkedGraph& g, const ConjugacyClass& cls);

// Rose with one vertex whose i-th petal is labeled by labels[i]; the labels
// must form a basis (their substitution is inverted to derive the reps).
MarkedGraph build_rose(const Basis& basis, const std::vector<Rational>& lengths,
                       const std::vector<Word>& labels);

MarkedGraph scaled(const MarkedGraph& g, const Rational& factor);
MarkedGraph normalized(const MarkedGraph& g);

// Candidate loops: simple cycles, figure eights (two simple cycles sharing
// exactly one vertex, both relative orientations), and dumbbells (two
// disjoint simple cycles joined by an embedded arc, both orientations),
// deduplicated by canonical conjugacy form with a class and its inverse
// counted once, sorted by that canonical form.
enum class CandidateShape { SimpleCycle, FigureEight, Dumbbell };

struct Candidate {
  ConjugacyClass cls;
  Word key;  // class_or_inverse_key(cls)
  EdgePath loop;
  CandidateShape shape;
};

std::vector<Candidate> candidates(const MarkedGraph& g);

// max |alpha|_y / |alpha|_x over candidates of x.  Ties resolved toward the
// candidate with the least canonical key.  Graphs need not be normalized;
// callers wanting the metric d(x,y) = log lambda normalize first.
struct Stretch {
  Rational lambda;
  ConjugacyClass witness;
};

Stretch stretch_factor(const MarkedGraph& x, const MarkedGraph& y);

// Both directed stretch factors equal 1, i.e. the same point of the space.
bool marked_equal(const MarkedGraph& x, const MarkedGraph& y);

// JSON I/O.  Lengths are exact strings ("p/q"); decimals are rejected.
MarkedGraph load_graph_json(const std::string& text);
std::string dump_graph_json(const MarkedGraph& g);

// Edge-path text: "e0 e2^-1 e1".
EdgePath parse_edge_path(const std::string& text, int num_edges);
std::string format_edge_path(const EdgePath& p);

// Subdivides edges at the given interior positions (per edge, strictly
// increasing, strictly inside).  Edges are renumbered; edge_paths maps each
// old edge to its chain of new forward halves, and cut_vertices lists the
// new vertex at each cut, aligned with the input positions.
struct Subdivision {
  MarkedGraph graph;
  std::vector<EdgePath> edge_paths;
  std::vector<std::vector<int>> cut_vertices;
};

Subdivision subdivide(const MarkedGraph& g,
                      const std::vector<std::vector<Rational>>& cuts);

}  // namespace osl
