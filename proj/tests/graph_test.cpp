#include "osl/graph.hpp"

#include <functional>
#include <random>
#include <set>

#include "doctest.h"

using namespace osl;

namespace {

const Basis kAbc = {"a", "b", "c"};

Word W(const std::string& text) { return parse_word(text, kAbc); }

MarkedGraph rose(const Basis& basis, const std::vector<std::string>& lengths,
                 const std::vector<std::string>& labels) {
  std::vector<Rational> lens;
  for (const auto& s : lengths) lens.push_back(parse_rational(s));
  std::vector<Word> labs;
  for (const auto& s : labels) labs.push_back(parse_word(s, basis));
  return build_rose(basis, lens, labs);
}

// The triangle-with-loops example used throughout: petals spelling
// a c c / b c / c with lengths 1/2, 1/3, 1/6.
MarkedGraph intro_x() {
  return rose(kAbc, {"1/2", "1/3", "1/6"}, {"a c c", "b c", "c"});
}

MarkedGraph intro_y() { return rose(kAbc, {"1/3", "1/3", "1/3"}, {"a", "b", "c"}); }

// Dumbbell target of the rank-2 nonconvexity pair: bar e0 (1/7), loop e1
// (2/7) at the far end, loop e2 (4/7) at the base; a -> e0 e1 e0^-1, b -> e2.
MarkedGraph nonconvex_y() {
  MarkedGraph g;
  g.basis = {"a", "b"};
  g.num_vertices = 2;
  g.base_vertex = 0;
  g.edges = {{0, 1, Rational(1, 7)}, {1, 1, Rational(2, 7)}, {0, 0, Rational(4, 7)}};
  g.generator_reps = {{0, 2, 1}, {4}};
  finalize(g);
  return g;
}

// Brute-force oracle: minimum length of a cyclically reduced closed edge walk
// of combinatorial length <= max_edges representing the given class.
Rational brute_shortest_loop(const MarkedGraph& g, const ConjugacyClass& cls,
                             int max_edges) {
  Rational best = -1;
  auto star = g.stars();
  EdgePath walk;
  std::function<void(int, int)> extend = [&](int start, int v) {
    if (!walk.empty() && v == start && walk.front() != rev(walk.back())) {
      try {
        if (graph_class(g, walk) == cls) {
          Rational len = path_length(g, walk);
          if (best < 0 || len < best) best = len;
        }
      } catch (const TrivialWord&) {
      }
    }
    if (static_cast<int>(walk.size()) == max_edges) return;
    for (Half h : star[v]) {
      if (!walk.empty() && h == rev(walk.back())) continue;
      walk.push_back(h);
      extend(start, g.head(h));
      walk.pop_back();
    }
  };
  for (int v = 0; v < g.num_vertices; ++v) extend(v, v);
  return best;
}

int count_shape(const std::vector<Candidate>& cs, CandidateShape s) {
  int n = 0;
  for (const auto& c : cs) n += c.shape == s;
  return n;
}

}  // namespace

TEST_CASE("edge path utilities") {
  EdgePath p = {0, 2, 3, 4};
  CHECK(reduce_path({0, 2, 3, 4}) == EdgePath{0, 4});  // 2 then 3 backtracks
  CHECK(inverse_path({0, 4}) == EdgePath{5, 1});
  CHECK(cyclic_reduce_path({0, 4, 1}) == EdgePath{4});
  CHECK(parse_edge_path("e0 e2^-1 e1", 3) == EdgePath{0, 5, 2});
  CHECK(format_edge_path({0, 5, 2}) == "e0 e2^-1 e1");
  CHECK_THROWS_AS(parse_edge_path("e9", 3), MalformedInput);
  CHECK_THROWS_AS(parse_edge_path("f0", 3), MalformedInput);
}

TEST_CASE("immersed loop lengths against the brute-force oracle") {
  MarkedGraph x = intro_x();
  CHECK(x.volume() == 1);

  // |a|_x = 5/6: the immersed representative runs the first petal and twice
  // against the c petal.
  CHECK(loop_length(x, ConjugacyClass(W("a"))) == Rational(5, 6));
  CHECK(loop_length(x, ConjugacyClass(W("a"))) ==
        brute_shortest_loop(x, ConjugacyClass(W("a")), 6));

  CHECK(loop_length(x, ConjugacyClass(W("c"))) == Rational(1, 6));
  CHECK(loop_length(x, ConjugacyClass(W("b c"))) == Rational(1, 3));
  CHECK(loop_length(x, ConjugacyClass(W("b"))) == Rational(1, 2));
  for (const char* w : {"c", "b c", "b", "a c"})
    CHECK(loop_length(x, ConjugacyClass(W(w))) ==
          brute_shortest_loop(x, ConjugacyClass(W(w)), 6));

  CHECK_THROWS_AS(loop_length(x, ConjugacyClass(W("a"))) ==
                      loop_length(x, ConjugacyClass(Word{})),
                  TrivialWord);
}

TEST_CASE("candidate enumeration by shape") {
  // Rank-3 rose: 3 simple cycles and 3 pairs x 2 orientations of figure
  // eights; no dumbbells.
  MarkedGraph r3 = intro_y();
  auto cs = candidates(r3);
  CHECK(cs.size() == 9);
  CHECK(count_shape(cs, CandidateShape::SimpleCycle) == 3);
  CHECK(count_shape(cs, CandidateShape::FigureEight) == 6);
  CHECK(count_shape(cs, CandidateShape::Dumbbell) == 0);
  // Deterministic order: canonical keys ascending; first is the class a.
  CHECK(cs[0].cls == ConjugacyClass(W("a")));
  for (size_t i = 1; i < cs.size(); ++i) CHECK(word_less(cs[i - 1].key, cs[i].key));
  // Every candidate loop is immersed and nontrivial.
  for (const auto& c : cs) {
    EdgePath cyc = cyclic_reduce_path(c.loop);
    CHECK(cyc == c.loop);
    CHECK(!c.cls.rep.empty());
  }

  // Dumbbell graph: two simple cycles and one arc give 2 + 2 candidates.
  MarkedGraph db = nonconvex_y();
  auto dcs = candidates(db);
  CHECK(dcs.size() == 4);
  CHECK(count_shape(dcs, CandidateShape::SimpleCycle) == 2);
  CHECK(count_shape(dcs, CandidateShape::FigureEight) == 0);
  CHECK(count_shape(dcs, CandidateShape::Dumbbell) == 2);

  // Theta graph (rank 2): three simple cycles, nothing else.
  MarkedGraph theta;
  theta.basis = {"a", "b"};
  theta.num_vertices = 2;
  theta.edges = {{0, 1, Rational(1, 3)}, {0, 1, Rational(1, 3)}, {0, 1, Rational(1, 3)}};
  theta.generator_reps = {{0, 3}, {2, 5}};  // e0 e1^-1, e1 e2^-1
  finalize(theta);
  auto tcs = candidates(theta);
  CHECK(tcs.size() == 3);
  CHECK(count_shape(tcs, CandidateShape::SimpleCycle) == 3);
}

TEST_CASE("stretch factors") {
  MarkedGraph x = intro_x(), y = intro_y();
  // The difference-of-markings map stretches every edge by 2, and every
  // candidate realizes it.
  Stretch s = stretch_factor(x, y);
  CHECK(s.lambda == 2);
  CHECK(s.witness == ConjugacyClass(W("c")));  // least canonical key among ties
  CHECK(stretch_factor(x, x).lambda == 1);
  CHECK(stretch_factor(y, y).lambda == 1);
  CHECK(marked_equal(x, x));
  CHECK(!marked_equal(x, y));

  MarkedGraph x2 = rose({"a", "b"}, {"1/2", "1/2"}, {"a", "b"});
  MarkedGraph y2 = nonconvex_y();
  Stretch s2 = stretch_factor(x2, y2);
  CHECK(s2.lambda == Rational(8, 7));
  CHECK(s2.witness == ConjugacyClass(parse_word("b", {"a", "b"})));
  // The a loop shrinks under the fold: its class is carried by the far loop.
  CHECK(loop_length(y2, ConjugacyClass(parse_word("a", {"a", "b"}))) == Rational(2, 7));

  CHECK_THROWS_AS(stretch_factor(x, x2), MarkingMismatch);
}

TEST_CASE("ball-scene stretch factors at m = 10") {
  // x with a short b petal; y and w are the rose points the folding path
  // visits.  Frozen from the candidate tables.
  MarkedGraph x = rose(kAbc, {"2/5", "1/10", "1/2"}, {"a", "b", "c"});
  CHECK(loop_length(x, ConjugacyClass(W("c b b b b b b b b b b a"))) ==
        Rational(19, 10));

  MarkedGraph y = rose(kAbc, {"11/24", "1/24", "12/24"},
                       {"a b b b b b b b b b b", "b", "c b b b b b b b b b b a"});
  Stretch sy = stretch_factor(y, x);
  CHECK(sy.lambda == Rational(19, 5));
  CHECK(sy.witness == ConjugacyClass(W("c b b b b b b b b b b a")));

  MarkedGraph z = rose(kAbc, {"1/3", "1/3", "1/3"}, {"a", "b", "c"});
  Stretch sz = stretch_factor(z, x);
  CHECK(sz.lambda == Rational(3, 2));
  CHECK(sz.witness == ConjugacyClass(W("c")));
}

TEST_CASE("json round trip and validation") {
  MarkedGraph x = intro_x();
  std::string text = dump_graph_json(x);
  MarkedGraph back = load_graph_json(text);
  CHECK(marked_equal(x, back));
  CHECK(back.edges[0].length == Rational(1, 2));
  CHECK(dump_graph_json(back) == text);  // dump is canonical

  // Labels alone determine the marking.
  std::string labeled = R"({
    "rank": 2, "basis": ["a", "b"], "vertices": [0, 1], "base_vertex": 0,
    "edges": [
      {"id": 0, "from": 0, "to": 1, "length": "1/7", "label": ""},
      {"id": 1, "from": 1, "to": 1, "length": "2/7", "label": "a"},
      {"id": 2, "from": 0, "to": 0, "length": "4/7", "label": "b"}
    ]})";
  CHECK(marked_equal(load_graph_json(labeled), nonconvex_y()));

  CHECK_THROWS_AS(load_graph_json("{"), MalformedInput);
  CHECK_THROWS_AS(load_graph_json(R"({"rank": 1, "basis": ["a"], "vertices": [0],
    "edges": [{"id": 0, "from": 0, "to": 0, "length": "0.5", "label": "a"}]})"),
                  MalformedInput);
  CHECK_THROWS_AS(load_graph_json(R"({"rank": 1, "basis": ["a"], "vertices": [0],
    "edges": [{"id": 0, "from": 0, "to": 0, "length": "-1/2", "label": "a"}]})"),
                  NonPositiveLength);
  CHECK_THROWS_AS(load_graph_json(R"({"rank": 1, "basis": ["a"], "vertices": [0],
    "edges": [{"id": 0, "from": 0, "to": 0, "length": "1/2"}]})"),
                  MalformedInput);
  // Betti number 2 against rank 1.
  CHECK_THROWS_AS(load_graph_json(R"({"rank": 1, "basis": ["a"], "vertices": [0],
    "edges": [{"id": 0, "from": 0, "to": 0, "length": "1/2", "label": "a"},
              {"id": 1, "from": 0, "to": 0, "length": "1/2", "label": "a"}]})"),
                  MarkingMismatch);
  // Disconnected.
  CHECK_THROWS_AS(load_graph_json(R"({"rank": 1, "basis": ["a"], "vertices": [0, 1],
    "edges": [{"id": 0, "from": 0, "to": 0, "length": "1/2", "label": "a"},
              {"id": 1, "from": 1, "to": 1, "length": "1/2", "label": "a"}]})"),
                  DisconnectedGraph);
  // Labels that are not a basis.
  CHECK_THROWS_AS(load_graph_json(R"({"rank": 2, "basis": ["a", "b"], "vertices": [0],
    "edges": [{"id": 0, "from": 0, "to": 0, "length": "1/2", "label": "a b"},
              {"id": 1, "from": 0, "to": 0, "length": "1/2", "label": "b a"}]})"),
                  MarkingMismatch);
}

TEST_CASE("subdivision preserves the marked point") {
  MarkedGraph x = intro_x();
  Subdivision sub = subdivide(x, {{Rational(1, 4)}, {}, {}});
  CHECK(sub.graph.volume() == 1);
  CHECK(sub.graph.num_vertices == 2);
  CHECK(sub.graph.vertex_kinds[1] == VertexKind::Cut);
  CHECK(sub.edge_paths[0].size() == 2);
  CHECK(marked_equal(sub.graph, x));
  CHECK(candidates(sub.graph).size() == candidates(x).size());
  CHECK_THROWS_AS(subdivide(x, {{Rational(1, 2)}, {}, {}}), BadParams);
  CHECK_THROWS_AS(subdivide(x, {{Rational(3)}, {}, {}}), BadParams);
}

TEST_CASE("random roses: metric sanity") {
  std::mt19937_64 rng(24680);
  for (int trial = 0; trial < 20; ++trial) {
    // Random marking via Nielsen moves, random positive lengths, normalized.
    Substitution labels(3);
    for (int i = 0; i < 3; ++i) labels[i] = Word{static_cast<Letter>(i + 1)};
    for (int m = 0; m < 8; ++m) {
      int i = static_cast<int>(rng() % 3), j = static_cast<int>(rng() % 3);
      if (i == j) continue;
      Word uj = (rng() & 1) ? labels[j] : inverse_word(labels[j]);
      Word cand = (rng() & 1) ? concat_reduce(labels[i], uj)
                              : concat_reduce(uj, labels[i]);
      if (!cand.empty() && cand.size() <= 4) labels[i] = cand;
    }
    std::vector<Rational> lens;
    Rational total = 0;
    for (int i = 0; i < 3; ++i) {
      Rational l(1 + static_cast<int>(rng() % 9), 10);
      lens.push_back(l);
      total += l;
    }
    for (auto& l : lens) l /= total;
    std::vector<Word> std_labels = {W("a"), W("b"), W("c")};
    MarkedGraph g = build_rose(kAbc, lens, labels);
    MarkedGraph h = build_rose(kAbc, {Rational(1, 3), Rational(1, 3), Rational(1, 3)},
                               std_labels);
    CHECK(stretch_factor(g, g).lambda == 1);
    Rational fwd = stretch_factor(g, h).lambda;
    Rational bwd = stretch_factor(h, g).lambda;
    CHECK(fwd * bwd >= 1);
    CHECK(marked_equal(g, scaled(normalized(scaled(g, 2)), 1)));
  }
}
