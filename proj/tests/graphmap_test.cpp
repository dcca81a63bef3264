#include "osl/graphmap.hpp"

#include "doctest.h"
#include "json.hpp"

using namespace osl;

namespace {

const Basis kAbc = {"a", "b", "c"};
const Basis kAb = {"a", "b"};

Word W(const std::string& text) { return parse_word(text, kAbc); }

MarkedGraph rose(const Basis& basis, const std::vector<std::string>& lengths,
                 const std::vector<std::string>& labels) {
  std::vector<Rational> lens;
  for (const auto& s : lengths) lens.push_back(parse_rational(s));
  std::vector<Word> labs;
  for (const auto& s : labels) labs.push_back(parse_word(s, basis));
  return build_rose(basis, lens, labs);
}

MarkedGraph intro_x() {
  return rose(kAbc, {"1/2", "1/3", "1/6"}, {"a c c", "b c", "c"});
}
MarkedGraph intro_y() { return rose(kAbc, {"1/3", "1/3", "1/3"}, {"a", "b", "c"}); }

MarkedGraph nonconvex_x() { return rose(kAb, {"1/2", "1/2"}, {"a", "b"}); }
MarkedGraph nonconvex_y() {
  MarkedGraph g;
  g.basis = kAb;
  g.num_vertices = 2;
  g.edges = {{0, 1, Rational(1, 7)}, {1, 1, Rational(2, 7)}, {0, 0, Rational(4, 7)}};
  g.generator_reps = {{0, 2, 1}, {4}};
  finalize(g);
  return g;
}

std::vector<int> multiset_of(const GraphMap& m, const TrainTrack& tt,
                             const std::string& word, const Basis& basis) {
  return turn_multiset(m, tt, ConjugacyClass(parse_word(word, basis)));
}

}  // namespace

TEST_CASE("canonical map of the triangle example") {
  MarkedGraph x = intro_x(), y = intro_y();
  GraphMap m = canonical_map(x, y);

  // Each petal is stretched by exactly 2; the whole graph is tension.
  CHECK(m.edge_images[0] == EdgePath{0, 4, 4});
  CHECK(m.edge_images[1] == EdgePath{2, 4});
  CHECK(m.edge_images[2] == EdgePath{4});
  for (const Rational& s : m.stretch) CHECK(s == 2);
  CHECK(m.max_stretch == 2);
  CHECK(tension_subgraph(m) == std::vector<int>{0, 1, 2});
  // Optimality certificate: the map realizes the candidate distance.
  CHECK(m.max_stretch == stretch_factor(x, y).lambda);

  // Gates at the rose vertex: the three forward germs are separated, the
  // three backward germs share the image germ of c traversed backwards.
  TrainTrack tt = train_track(m);
  REQUIRE(tt.gates.size() == 1);
  std::vector<std::vector<Half>> expected = {{0}, {1, 3, 5}, {2}, {4}};
  CHECK(tt.gates[0] == expected);
  REQUIRE(tt.illegal_turns.size() == 3);
  CHECK(tt.illegal_turns[0] == Turn{1, 3});
  CHECK(tt.illegal_turns[1] == Turn{1, 5});
  CHECK(tt.illegal_turns[2] == Turn{3, 5});
  CHECK(tt.low_gate_vertices.empty());
  for (const Turn& t : tt.illegal_turns) CHECK(tt.same_gate(t.a, t.b));
  CHECK(!tt.same_gate(0, 2));
  CHECK(tt.turn_index(1, 5) == 1);
  CHECK(tt.turn_index(5, 1) == 1);
  CHECK(tt.turn_index(0, 2) == -1);

  // The loop a crosses one illegal turn; b crosses one; c is legal.  The c
  // case exercises the closing-up turn of a single-edge loop.
  CHECK(multiset_of(m, tt, "a", kAbc) == std::vector<int>{1});
  CHECK(multiset_of(m, tt, "a^-1", kAbc) == std::vector<int>{1});
  CHECK(multiset_of(m, tt, "b", kAbc) == std::vector<int>{2});
  CHECK(multiset_of(m, tt, "c", kAbc) == std::vector<int>{});
  CHECK(multiset_of(m, tt, "b c", kAbc) == std::vector<int>{});
}

TEST_CASE("identity and composition") {
  MarkedGraph x = intro_x(), y = intro_y();
  GraphMap id = identity_map(x);
  for (const Rational& s : id.stretch) CHECK(s == 1);
  CHECK(tension_subgraph(id).size() == 3);

  GraphMap m = canonical_map(x, y);
  GraphMap left = compose(id, m);
  GraphMap right = compose(m, identity_map(y));
  CHECK(left.max_stretch == 2);
  CHECK(right.max_stretch == 2);
  CHECK(left.edge_images == m.edge_images);
  CHECK(right.edge_images == m.edge_images);
  CHECK_THROWS_AS(compose(m, m), BadParams);
}

TEST_CASE("single-turn map of the rank-2 pair") {
  MarkedGraph x = nonconvex_x(), y = nonconvex_y();
  GraphMap m = canonical_map(x, y);
  CHECK(m.edge_images[0] == EdgePath{0, 2, 1});
  CHECK(m.edge_images[1] == EdgePath{4});
  CHECK(m.stretch[0] == Rational(8, 7));
  CHECK(m.stretch[1] == Rational(8, 7));
  CHECK(m.max_stretch == stretch_factor(x, y).lambda);

  // Exactly one illegal turn: the two germs of the a petal.
  TrainTrack tt = train_track(m);
  REQUIRE(tt.illegal_turns.size() == 1);
  CHECK(tt.illegal_turns[0] == Turn{0, 1});
  CHECK(!is_yoyo(x, tt.illegal_turns[0]));  // the b petal hangs off the vertex

  // The loop a crosses that turn exactly where it closes up; a^2 crosses it
  // twice; b and ab are legal loops.
  CHECK(multiset_of(m, tt, "a", kAb) == std::vector<int>{0});
  CHECK(multiset_of(m, tt, "a a", kAb) == std::vector<int>{0, 0});
  CHECK(multiset_of(m, tt, "b", kAb) == std::vector<int>{});
  CHECK(multiset_of(m, tt, "a b", kAb) == std::vector<int>{});
}

TEST_CASE("yo-yo recognition") {
  MarkedGraph db = nonconvex_y();
  // Far vertex: loop e1 plus the bar e0, nothing else.
  CHECK(is_yoyo(db, Turn{1, 2}));
  CHECK(is_yoyo(db, Turn{1, 3}));
  // Both ends of the loop alone: the bar is a third strand.
  CHECK(!is_yoyo(db, Turn{2, 3}));
  // Base vertex: loop e2 plus the bar.
  CHECK(is_yoyo(db, Turn{0, 4}));
  // At a rose vertex other petals are always present.
  MarkedGraph r = nonconvex_x();
  CHECK(!is_yoyo(r, Turn{0, 1}));
}

TEST_CASE("slack edges of the word-growth pair") {
  // Substitution a -> ab, b -> a, c -> c iterated six times; the rose pair
  // whose canonical map stretches petal 1 by a Fibonacci number and slackens
  // petal 3.
  Substitution psi = {W("a b"), W("a"), W("c")};
  Word wa = apply_substitution(psi, W("a"), 6);
  Word wb = apply_substitution(psi, W("b"), 6);
  CHECK(wa.size() == 21);
  CHECK(wb.size() == 13);

  Rational d(1, 35);
  MarkedGraph y = build_rose(kAbc, {d, d, 1 - 2 * d}, {wa, wb, W("c")});
  MarkedGraph w = build_rose(kAbc, {21 * d, 13 * d, d}, {wa, wb, W("c")});
  GraphMap m = canonical_map(y, w);
  // The long label words collapse to single petals of w.
  CHECK(m.edge_images[0] == EdgePath{0});
  CHECK(m.edge_images[1] == EdgePath{2});
  CHECK(m.edge_images[2] == EdgePath{4});
  CHECK(m.stretch[0] == 21);
  CHECK(m.stretch[1] == 13);
  CHECK(m.stretch[2] == Rational(1, 33));
  CHECK(tension_subgraph(m) == std::vector<int>{0});
  CHECK(m.max_stretch == stretch_factor(y, w).lambda);
}

TEST_CASE("map validation") {
  // A marking-incompatible assignment: petals swapped.
  MarkedGraph r = nonconvex_x();
  GraphMap bad;
  bad.domain = r;
  bad.codomain = r;
  bad.vertex_images = {0};
  bad.edge_images = {{2}, {0}};
  CHECK_THROWS_AS(finalize_map(bad), MarkingMismatch);

  // A discontinuous image path.
  MarkedGraph db = nonconvex_y();
  GraphMap broken;
  broken.domain = nonconvex_x();
  broken.codomain = db;
  broken.vertex_images = {0};
  broken.edge_images = {{0, 2, 1}, {2}};  // e1's image starts at the far vertex
  CHECK_THROWS_AS(finalize_map(broken), BadParams);

  CHECK_THROWS_AS(canonical_map(db, nonconvex_x()), BadParams);  // not a rose
}

TEST_CASE("collapsed edges are rejected by gate analysis") {
  // Theta graph onto a rose, collapsing one of the three strands.
  MarkedGraph theta;
  theta.basis = kAb;
  theta.num_vertices = 2;
  theta.edges = {{0, 1, Rational(1, 3)}, {0, 1, Rational(1, 3)}, {0, 1, Rational(1, 3)}};
  theta.generator_reps = {{0, 3}, {2, 5}};
  finalize(theta);
  MarkedGraph r2 = rose(kAb, {"1/2", "1/2"}, {"a", "b"});

  GraphMap m;
  m.domain = theta;
  m.codomain = r2;
  m.vertex_images = {0, 0};
  m.edge_images = {{}, {1}, {1, 3}};
  finalize_map(m);
  CHECK(m.stretch[0] == 0);
  CHECK(m.max_stretch == 3);
  CHECK_THROWS_AS(train_track(m), DegenerateEdge);
}

TEST_CASE("based loops and map serialization") {
  MarkedGraph x = intro_x();
  CHECK(based_loop(x, W("a")) == EdgePath{0, 5, 5});
  CHECK(based_loop(x, W("b")) == EdgePath{2, 5});
  CHECK(based_loop(x, W("c")) == EdgePath{4});
  CHECK(based_loop(x, W("a c c")) == EdgePath{0});

  GraphMap m = canonical_map(x, intro_y());
  auto j = nlohmann::json::parse(dump_map_json(m));
  CHECK(j["vertex_images"] == nlohmann::json({0}));
  CHECK(j["edge_images"][0] == "e0 e2 e2");
  CHECK(j["stretch"][2] == "2");
  CHECK(j["max_stretch"] == "2");
  CHECK(j["tension_edges"] == nlohmann::json({0, 1, 2}));

  CHECK(same_graph(x, x));
  CHECK(!same_graph(x, intro_y()));
}
