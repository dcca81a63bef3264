#pragma once
// Maps between marked graphs: difference-of-markings maps, tightened edge
// images, stretch analysis, the tension subgraph, and the gate/illegal-turn
// (train-track) structure that drives folding.

#include <string>
#include <vector>

#include "osl/graph.hpp"

namespace osl {

// A map between marked graphs that sends vertices to vertices and is linear
// on edges: every domain edge maps to a reduced edge path in the codomain.
// Partial-edge targets never arise because the folding engine subdivides its
// private codomain copy at every position it needs (see the folding module).
struct GraphMap {
  MarkedGraph domain;
  MarkedGraph codomain;
  std::vector<int> vertex_images;     // per domain vertex, a codomain vertex
  std::vector<EdgePath> edge_images;  // per domain edge, a reduced path

  // Derived by finalize_map.
  std::vector<Rational> stretch;  // image length / edge length, per edge
  Rational max_stretch = 0;

  EdgePath image_of_half(Half h) const;
  EdgePath image_of_path(const EdgePath& p) const;  // reduced
};

// Literal structural equality (vertices, edges, lengths, marking data) —
// the composability check for maps; contrast marked_equal, the metric one.
bool same_graph(const MarkedGraph& a, const MarkedGraph& b);

// Validates continuity and marking compatibility, tightens the edge images,
// and fills the stretch table. Throws MarkingMismatch when the map does not
// carry each generator's representative to the right conjugacy class, and
// BadParams on structural nonsense (sizes, ranges, broken paths).
void finalize_map(GraphMap& m);

GraphMap identity_map(const MarkedGraph& g);

// The difference-of-markings map for a rose domain: the single vertex goes
// to the codomain's base vertex and each petal to the tightened based loop
// representing its label word.
GraphMap canonical_map(const MarkedGraph& x, const MarkedGraph& y);

// second ∘ first; requires first.codomain and second.domain to be the same
// literal graph.
GraphMap compose(const GraphMap& first, const GraphMap& second);

// The reduced edge path based at g's base vertex spelling the word w.
EdgePath based_loop(const MarkedGraph& g, const Word& w);

// Edge ids with stretch exactly equal to max_stretch, ascending.
std::vector<int> tension_subgraph(const GraphMap& m);

// An unordered pair of directions at one vertex. Directions are half-edges
// whose tail is the vertex in question; a < b always.
struct Turn {
  Half a = 0;
  Half b = 0;
  friend bool operator==(const Turn&, const Turn&) = default;
};

// A sub-gate: two or more directions at a vertex lying in one gate.
// Illegal turns are exactly the size-2 sub-gates.
using SubGate = std::vector<Half>;

struct TrainTrack {
  // gates[v] lists the gates at vertex v, each a sorted set of directions;
  // gates are ordered by their smallest direction.
  std::vector<std::vector<std::vector<Half>>> gates;
  std::vector<Turn> illegal_turns;  // vertex-ascending, then pair-lex order
  std::vector<int> tension_edges;
  std::vector<int> low_gate_vertices;  // vertices with fewer than 2 gates

  // Per half-edge, a graph-wide gate identifier.
  std::vector<int> gate_uid;

  bool same_gate(Half a, Half b) const;
  // Index into illegal_turns, or -1 when the turn {a, b} is legal.
  int turn_index(Half a, Half b) const;
};

// Gates group directions with equal image germ under the map (one-step
// derivative rule). Throws DegenerateEdge if any edge image is a point.
TrainTrack train_track(const GraphMap& m);

// True iff one edge of the turn is a loop at its vertex and the vertex meets
// no edges besides the turn's two.
bool is_yoyo(const MarkedGraph& g, const Turn& t);

// Illegal turns crossed by the immersed representative of alpha, with
// multiplicity, including the turn where the loop closes up. Returns sorted
// indices into tt.illegal_turns.
std::vector<int> turn_multiset(const GraphMap& m, const TrainTrack& tt,
                               const ConjugacyClass& alpha);

// JSON with vertex_images, edge_images (edge-path text), per-edge stretch,
// max_stretch, and the tension edge ids.
std::string dump_map_json(const GraphMap& m);

}  // namespace osl
