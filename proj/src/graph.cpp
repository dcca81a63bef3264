#include "osl/graph.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <queue>
#include <set>
#include <sstream>

#include "json.hpp"

namespace osl {

using nlohmann::json;

EdgePath reduce_path(EdgePath p) {
  EdgePath out;
  out.reserve(p.size());
  for (Half h : p) {
    if (!out.empty() && out.back() == rev(h))
      out.pop_back();
    else
      out.push_back(h);
  }
  return out;
}

EdgePath inverse_path(const EdgePath& p) {
  EdgePath out;
  out.reserve(p.size());
  for (auto it = p.rbegin(); it != p.rend(); ++it) out.push_back(rev(*it));
  return out;
}

EdgePath concat_reduce_path(const EdgePath& a, const EdgePath& b) {
  EdgePath out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce_path(std::move(out));
}

EdgePath cyclic_reduce_path(EdgePath p) {
  p = reduce_path(std::move(p));
  size_t lo = 0, hi = p.size();
  while (hi - lo >= 2 && p[lo] == rev(p[hi - 1])) {
    ++lo;
    --hi;
  }
  return EdgePath(p.begin() + lo, p.begin() + hi);
}

Rational MarkedGraph::volume() const {
  Rational v = 0;
  for (const auto& e : edges) v += e.length;
  return v;
}

int MarkedGraph::degree(int v) const {
  int d = 0;
  for (int h = 0; h < 2 * static_cast<int>(edges.size()); ++h)
    if (tail(h) == v) ++d;
  return d;
}

std::vector<std::vector<Half>> MarkedGraph::stars() const {
  std::vector<std::vector<Half>> out(num_vertices);
  for (int h = 0; h < 2 * static_cast<int>(edges.size()); ++h)
    out[tail(h)].push_back(h);
  return out;
}

namespace {

void check_path(const MarkedGraph& g, const EdgePath& p, const char* what) {
  for (size_t i = 0; i < p.size(); ++i) {
    if (p[i] < 0 || edge_of(p[i]) >= static_cast<int>(g.edges.size()))
      throw MalformedInput(std::string(what) + ": half-edge out of range");
    if (i && g.head(p[i - 1]) != g.tail(p[i]))
      throw MalformedInput(std::string(what) + ": path is not composable");
  }
}

}  // namespace

void finalize(MarkedGraph& g) {
  validate_basis(g.basis);
  int n = g.rank();
  if (g.num_vertices <= 0) throw MalformedInput("graph has no vertices");
  if (g.vertex_kinds.empty())
    g.vertex_kinds.assign(g.num_vertices, VertexKind::Real);
  if (static_cast<int>(g.vertex_kinds.size()) != g.num_vertices)
    throw MalformedInput("vertex_kinds size mismatch");
  if (g.base_vertex < 0 || g.base_vertex >= g.num_vertices)
    throw MalformedInput("base vertex out of range");
  for (const auto& e : g.edges) {
    if (e.from < 0 || e.from >= g.num_vertices || e.to < 0 ||
        e.to >= g.num_vertices)
      throw MalformedInput("edge endpoint out of range");
    if (e.length <= 0) throw NonPositiveLength("edge length must be positive");
  }

  // Spanning tree by BFS from the base vertex, half-edges in ascending order,
  // so the derived data is deterministic.
  g.tree_parent_half.assign(g.num_vertices, -1);
  g.is_tree_edge.assign(g.edges.size(), 0);
  std::vector<char> vis(g.num_vertices, 0);
  vis[g.base_vertex] = 1;
  std::queue<int> bfs;
  bfs.push(g.base_vertex);
  auto star = g.stars();
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (Half h : star[v]) {
      int w = g.head(h);
      if (!vis[w]) {
        vis[w] = 1;
        g.tree_parent_half[w] = h;
        g.is_tree_edge[edge_of(h)] = 1;
        bfs.push(w);
      }
    }
  }
  for (int v = 0; v < g.num_vertices; ++v)
    if (!vis[v]) throw DisconnectedGraph("graph is not connected");

  std::vector<int> chord_index(g.edges.size(), -1);
  int m = 0;
  for (size_t e = 0; e < g.edges.size(); ++e)
    if (!g.is_tree_edge[e]) chord_index[e] = m++;
  if (m != n)
    throw MarkingMismatch("graph has first Betti number " + std::to_string(m) +
                          ", marking has rank " + std::to_string(n));

  if (static_cast<int>(g.generator_reps.size()) != n)
    throw MarkingMismatch("need one representative per generator");
  Substitution R(n);
  for (int i = 0; i < n; ++i) {
    g.generator_reps[i] = reduce_path(g.generator_reps[i]);
    const EdgePath& p = g.generator_reps[i];
    check_path(g, p, "generator representative");
    if (p.empty() || g.tail(p.front()) != g.base_vertex ||
        g.head(p.back()) != g.base_vertex)
      throw MarkingMismatch("generator representative is not a based loop");
    for (Half h : p) {
      int k = chord_index[edge_of(h)];
      if (k >= 0) R[i].push_back(is_fwd(h) ? k + 1 : -(k + 1));
    }
    R[i] = reduce(R[i]);
  }

  Substitution inv;
  try {
    inv = invert_basis_map(R, n);
  } catch (const NotABasis& ex) {
    throw MarkingMismatch(std::string("marking is not an isomorphism: ") +
                          ex.what());
  }
  g.chord_word.assign(g.edges.size(), Word{});
  for (size_t e = 0; e < g.edges.size(); ++e)
    if (chord_index[e] >= 0) g.chord_word[e] = inv[chord_index[e]];
}

Word path_word(const MarkedGraph& g, const EdgePath& closed_path) {
  Word w;
  for (Half h : closed_path) {
    const Word& cw = g.chord_word[edge_of(h)];
    if (cw.empty()) continue;
    if (is_fwd(h))
      w.insert(w.end(), cw.begin(), cw.end());
    else {
      Word iw = inverse_word(cw);
      w.insert(w.end(), iw.begin(), iw.end());
    }
  }
  return reduce(std::move(w));
}

ConjugacyClass graph_class(const MarkedGraph& g, const EdgePath& loop) {
  return ConjugacyClass(path_word(g, loop));
}

EdgePath immersed_loop(const MarkedGraph& g, const ConjugacyClass& cls) {
  EdgePath p;
  for (Letter x : cls.rep) {
    int gen = x > 0 ? x : -x;
    if (gen > g.rank()) throw MalformedInput("class letter outside basis");
    const EdgePath& rep = g.generator_reps[gen - 1];
    EdgePath piece = x > 0 ? rep : inverse_path(rep);
    p.insert(p.end(), piece.begin(), piece.end());
  }
  p = cyclic_reduce_path(std::move(p));
  if (p.empty()) throw TrivialWord("class has no immersed loop");
  return p;
}

Rational path_length(const MarkedGraph& g, const EdgePath& p) {
  Rational total = 0;
  for (Half h : p) total += g.edges[edge_of(h)].length;
  return total;
}

Rational loop_length(const MarkedGraph& g, const ConjugacyClass& cls) {
  return path_length(g, immersed_loop(g, cls));
}

MarkedGraph build_rose(const Basis& basis, const std::vector<Rational>& lengths,
                       const std::vector<Word>& labels) {
  int n = static_cast<int>(basis.size());
  if (static_cast<int>(lengths.size()) != n ||
      static_cast<int>(labels.size()) != n)
    throw MalformedInput("rose needs one length and one label per petal");
  MarkedGraph g;
  g.basis = basis;
  g.num_vertices = 1;
  g.base_vertex = 0;
  for (int i = 0; i < n; ++i) g.edges.push_back({0, 0, lengths[i]});
  // Petal i spells labels[i]; invert to express each generator as a loop.
  Substitution inv = invert_basis_map(labels, n);
  g.generator_reps.resize(n);
  for (int k = 0; k < n; ++k) {
    EdgePath p;
    for (Letter x : inv[k]) {
      int petal = (x > 0 ? x : -x) - 1;
      p.push_back(x > 0 ? fwd_half(petal) : rev(fwd_half(petal)));
    }
    g.generator_reps[k] = p;
  }
  finalize(g);
  return g;
}

MarkedGraph scaled(const MarkedGraph& g, const Rational& factor) {
  if (factor <= 0) throw BadParams("scale factor must be positive");
  MarkedGraph out = g;
  for (auto& e : out.edges) e.length *= factor;
  return out;
}

MarkedGraph normalized(const MarkedGraph& g) {
  return scaled(g, Rational(1) / g.volume());
}

namespace {

// All structural simple cycles (distinct vertices), one canonical
// representative each: started at the least vertex, the lexicographically
// smaller of the two orientations.
std::vector<EdgePath> simple_cycles(const MarkedGraph& g) {
  std::set<EdgePath> found;
  auto star = g.stars();
  EdgePath path;
  std::vector<char> onpath(g.num_vertices, 0);
  for (int r = 0; r < g.num_vertices; ++r) {
    std::function<void(int)> dfs = [&](int v) {
      for (Half h : star[v]) {
        if (!path.empty() && h == rev(path.back())) continue;
        int w = g.head(h);
        if (w == r) {
          path.push_back(h);
          found.insert(std::min(path, inverse_path(path)));
          path.pop_back();
        } else if (w > r && !onpath[w]) {
          onpath[w] = 1;
          path.push_back(h);
          dfs(w);
          path.pop_back();
          onpath[w] = 0;
        }
      }
    };
    dfs(r);
  }
  return std::vector<EdgePath>(found.begin(), found.end());
}

std::vector<int> cycle_vertices(const MarkedGraph& g, const EdgePath& c) {
  std::vector<int> vs;
  for (Half h : c) vs.push_back(g.tail(h));
  return vs;  // in traversal order; distinct by construction
}

// Rotate a simple cycle to start at vertex v (visited exactly once).
EdgePath rotate_cycle(const MarkedGraph& g, const EdgePath& c, int v) {
  for (size_t i = 0; i < c.size(); ++i)
    if (g.tail(c[i]) == v) {
      EdgePath out(c.begin() + i, c.end());
      out.insert(out.end(), c.begin(), c.begin() + i);
      return out;
    }
  throw Error("rotate_cycle: vertex not on cycle");
}

}  // namespace

std::vector<Candidate> candidates(const MarkedGraph& g) {
  for (auto k : g.vertex_kinds)
    if (k == VertexKind::HairTip)
      throw BadParams("candidates of a decorated graph are not defined");

  std::vector<EdgePath> cycles = simple_cycles(g);
  std::vector<std::set<int>> vsets;
  for (const auto& c : cycles) {
    auto vs = cycle_vertices(g, c);
    vsets.emplace_back(vs.begin(), vs.end());
  }

  std::vector<std::pair<EdgePath, CandidateShape>> loops;
  for (const auto& c : cycles) loops.emplace_back(c, CandidateShape::SimpleCycle);

  for (size_t i = 0; i < cycles.size(); ++i)
    for (size_t j = i + 1; j < cycles.size(); ++j) {
      std::vector<int> shared;
      std::set_intersection(vsets[i].begin(), vsets[i].end(), vsets[j].begin(),
                            vsets[j].end(), std::back_inserter(shared));
      if (shared.size() == 1) {
        // Figure eight: wedge at the shared vertex, both relative orientations.
        int v = shared[0];
        EdgePath ci = rotate_cycle(g, cycles[i], v);
        EdgePath cj = rotate_cycle(g, cycles[j], v);
        for (int orient = 0; orient < 2; ++orient) {
          EdgePath loop = ci;
          EdgePath second = orient ? inverse_path(cj) : cj;
          loop.insert(loop.end(), second.begin(), second.end());
          loops.emplace_back(loop, CandidateShape::FigureEight);
        }
      } else if (shared.empty()) {
        // Dumbbell: embedded arcs from cycle i to cycle j, interior vertices
        // off both cycles, both relative orientations.
        auto star = g.stars();
        for (int u : std::vector<int>(vsets[i].begin(), vsets[i].end())) {
          EdgePath arc;
          std::vector<char> used(g.num_vertices, 0);
          std::function<void(int)> grow = [&](int v) {
            for (Half h : star[v]) {
              int w = g.head(h);
              if (vsets[j].count(w)) {
                arc.push_back(h);
                EdgePath ci = rotate_cycle(g, cycles[i], u);
                EdgePath cj = rotate_cycle(g, cycles[j], w);
                for (int orient = 0; orient < 2; ++orient) {
                  EdgePath loop = ci;
                  loop.insert(loop.end(), arc.begin(), arc.end());
                  EdgePath second = orient ? inverse_path(cj) : cj;
                  loop.insert(loop.end(), second.begin(), second.end());
                  EdgePath back = inverse_path(arc);
                  loop.insert(loop.end(), back.begin(), back.end());
                  loops.emplace_back(loop, CandidateShape::Dumbbell);
                }
                arc.pop_back();
              } else if (!vsets[i].count(w) && !used[w]) {
                used[w] = 1;
                arc.push_back(h);
                grow(w);
                arc.pop_back();
                used[w] = 0;
              }
            }
          };
          grow(u);
        }
      }
    }

  // Deduplicate by canonical conjugacy form, a class and its inverse counted
  // once; order by that form.
  std::vector<Candidate> out;
  std::map<Word, size_t, decltype(&word_less)> by_key(&word_less);
  for (const auto& [loop, shape] : loops) {
    Candidate cand;
    cand.loop = loop;
    cand.cls = graph_class(g, loop);
    cand.key = class_or_inverse_key(cand.cls);
    cand.shape = shape;
    if (by_key.emplace(cand.key, out.size()).second) out.push_back(cand);
  }
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return word_less(a.key, b.key); });
  return out;
}

Stretch stretch_factor(const MarkedGraph& x, const MarkedGraph& y) {
  if (x.basis != y.basis)
    throw MarkingMismatch("stretch factor across different bases");
  std::vector<Candidate> cans = candidates(x);
  if (cans.empty()) throw Error("graph has no candidate loops");
  Stretch best{Rational(-1), {}};
  for (const auto& c : cans) {
    Rational lx = path_length(x, c.loop);
    Rational ly = loop_length(y, c.cls);
    Rational ratio = ly / lx;
    if (ratio > best.lambda) {
      best.lambda = ratio;
      best.witness = c.cls;
    }
  }
  return best;
}

bool marked_equal(const MarkedGraph& x, const MarkedGraph& y) {
  return stretch_factor(x, y).lambda == 1 && stretch_factor(y, x).lambda == 1;
}

EdgePath parse_edge_path(const std::string& text, int num_edges) {
  EdgePath out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    bool invert = false;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      invert = true;
      tok = tok.substr(0, tok.size() - 3);
    }
    if (tok.size() < 2 || tok[0] != 'e' ||
        tok.find_first_not_of("0123456789", 1) != std::string::npos)
      throw MalformedInput("bad edge token '" + tok + "'");
    int e = std::stoi(tok.substr(1));
    if (e < 0 || e >= num_edges)
      throw MalformedInput("edge id out of range in path: '" + tok + "'");
    out.push_back(invert ? rev(fwd_half(e)) : fwd_half(e));
  }
  return out;
}

std::string format_edge_path(const EdgePath& p) {
  std::string out;
  for (size_t i = 0; i < p.size(); ++i) {
    if (i) out += ' ';
    out += "e" + std::to_string(edge_of(p[i]));
    if (!is_fwd(p[i])) out += "^-1";
  }
  return out;
}

namespace {

// Derives generator_reps from per-edge label words: read the labels along
// each chord loop of a spanning tree, invert that substitution, and spell
// every generator as a loop of chords.
void derive_reps_from_labels(MarkedGraph& g,
                             const std::vector<std::string>& labels_text) {
  int n = g.rank();
  std::vector<Word> labels;
  for (const auto& s : labels_text) labels.push_back(parse_word(s, g.basis));

  std::vector<int> parent_half(g.num_vertices, -1);
  std::vector<char> vis(g.num_vertices, 0), is_tree(g.edges.size(), 0);
  vis[g.base_vertex] = 1;
  std::queue<int> bfs;
  bfs.push(g.base_vertex);
  auto star = g.stars();
  while (!bfs.empty()) {
    int v = bfs.front();
    bfs.pop();
    for (Half h : star[v]) {
      int w = g.head(h);
      if (!vis[w]) {
        vis[w] = 1;
        parent_half[w] = h;
        is_tree[edge_of(h)] = 1;
        bfs.push(w);
      }
    }
  }
  for (int v = 0; v < g.num_vertices; ++v)
    if (!vis[v]) throw DisconnectedGraph("graph is not connected");

  auto tree_path_from_base = [&](int v) {
    EdgePath p;
    while (v != g.base_vertex) {
      Half h = parent_half[v];
      p.push_back(h);
      v = g.tail(h);
    }
    std::reverse(p.begin(), p.end());
    return p;
  };
  auto word_along = [&](const EdgePath& p) {
    Word w;
    for (Half h : p) {
      Word piece = is_fwd(h) ? labels[edge_of(h)] : inverse_word(labels[edge_of(h)]);
      w.insert(w.end(), piece.begin(), piece.end());
    }
    return reduce(std::move(w));
  };

  std::vector<EdgePath> chord_loop;
  Substitution chord_label;
  for (size_t e = 0; e < g.edges.size(); ++e) {
    if (is_tree[e]) continue;
    EdgePath loop = tree_path_from_base(g.edges[e].from);
    loop.push_back(fwd_half(static_cast<int>(e)));
    EdgePath back = inverse_path(tree_path_from_base(g.edges[e].to));
    loop.insert(loop.end(), back.begin(), back.end());
    loop = reduce_path(std::move(loop));
    chord_loop.push_back(loop);
    chord_label.push_back(word_along(loop));
  }
  if (static_cast<int>(chord_label.size()) != n)
    throw MarkingMismatch("graph has first Betti number " +
                          std::to_string(chord_label.size()) +
                          ", marking has rank " + std::to_string(n));
  Substitution inv;
  try {
    inv = invert_basis_map(chord_label, n);
  } catch (const NotABasis& ex) {
    throw MarkingMismatch(std::string("labels do not define a marking: ") +
                          ex.what());
  }
  g.generator_reps.assign(n, {});
  for (int k = 0; k < n; ++k) {
    EdgePath p;
    for (Letter x : inv[k]) {
      int c = (x > 0 ? x : -x) - 1;
      EdgePath piece = x > 0 ? chord_loop[c] : inverse_path(chord_loop[c]);
      p.insert(p.end(), piece.begin(), piece.end());
    }
    g.generator_reps[k] = reduce_path(std::move(p));
  }
}

}  // namespace

MarkedGraph load_graph_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& ex) {
    throw MalformedInput(std::string("bad graph json: ") + ex.what());
  }
  try {
    MarkedGraph g;
    int rank = j.at("rank").get<int>();
    for (const auto& name : j.at("basis")) g.basis.push_back(name.get<std::string>());
    if (static_cast<int>(g.basis.size()) != rank)
      throw MalformedInput("basis size disagrees with rank");
    std::vector<int> vids;
    for (const auto& v : j.at("vertices")) vids.push_back(v.get<int>());
    for (size_t i = 0; i < vids.size(); ++i)
      if (vids[i] != static_cast<int>(i))
        throw MalformedInput("vertices must be 0..k-1 in order");
    g.num_vertices = static_cast<int>(vids.size());
    g.base_vertex = j.value("base_vertex", 0);

    std::vector<std::string> labels;
    bool have_all_labels = true;
    for (const auto& je : j.at("edges")) {
      if (je.at("id").get<int>() != static_cast<int>(g.edges.size()))
        throw MalformedInput("edge ids must be 0..m-1 in order");
      EdgeRec e;
      e.from = je.at("from").get<int>();
      e.to = je.at("to").get<int>();
      if (!je.at("length").is_string())
        throw MalformedInput("edge length must be an exact rational string");
      e.length = parse_rational(je.at("length").get<std::string>());
      g.edges.push_back(e);
      if (je.contains("label"))
        labels.push_back(je.at("label").get<std::string>());
      else
        have_all_labels = false;
    }

    if (j.contains("generator_reps")) {
      for (const auto& r : j.at("generator_reps"))
        g.generator_reps.push_back(
            parse_edge_path(r.get<std::string>(), static_cast<int>(g.edges.size())));
    } else if (have_all_labels && labels.size() == g.edges.size()) {
      derive_reps_from_labels(g, labels);
    } else {
      throw MalformedInput("graph needs generator_reps or a label on every edge");
    }
    finalize(g);
    return g;
  } catch (const json::exception& ex) {
    throw MalformedInput(std::string("bad graph json: ") + ex.what());
  }
}

std::string dump_graph_json(const MarkedGraph& g) {
  json j;
  j["rank"] = g.rank();
  j["basis"] = g.basis;
  std::vector<int> vids(g.num_vertices);
  for (int i = 0; i < g.num_vertices; ++i) vids[i] = i;
  j["vertices"] = vids;
  j["base_vertex"] = g.base_vertex;
  j["edges"] = json::array();
  for (size_t e = 0; e < g.edges.size(); ++e) {
    json je;
    je["id"] = static_cast<int>(e);
    je["from"] = g.edges[e].from;
    je["to"] = g.edges[e].to;
    je["length"] = rational_str(g.edges[e].length);
    j["edges"].push_back(je);
  }
  j["generator_reps"] = json::array();
  for (const auto& r : g.generator_reps)
    j["generator_reps"].push_back(format_edge_path(r));
  return j.dump(2) + "\n";
}

Subdivision subdivide(const MarkedGraph& g,
                      const std::vector<std::vector<Rational>>& cuts) {
  if (cuts.size() != g.edges.size())
    throw BadParams("subdivide: need a cut list per edge");
  Subdivision out;
  MarkedGraph& h = out.graph;
  h.basis = g.basis;
  h.num_vertices = g.num_vertices;
  h.base_vertex = g.base_vertex;
  h.vertex_kinds = g.vertex_kinds;
  out.edge_paths.resize(g.edges.size());
  out.cut_vertices.resize(g.edges.size());
  for (size_t e = 0; e < g.edges.size(); ++e) {
    const auto& ps = cuts[e];
    for (size_t i = 0; i < ps.size(); ++i) {
      if (ps[i] <= 0 || ps[i] >= g.edges[e].length)
        throw BadParams("subdivide: cut outside edge interior");
      if (i && ps[i] <= ps[i - 1])
        throw BadParams("subdivide: cuts must be strictly increasing");
    }
    int prev_vertex = g.edges[e].from;
    Rational prev_pos = 0;
    for (size_t i = 0; i <= ps.size(); ++i) {
      Rational next_pos = i < ps.size() ? ps[i] : g.edges[e].length;
      int next_vertex;
      if (i < ps.size()) {
        next_vertex = h.num_vertices++;
        h.vertex_kinds.push_back(VertexKind::Cut);
        out.cut_vertices[e].push_back(next_vertex);
      } else {
        next_vertex = g.edges[e].to;
      }
      out.edge_paths[e].push_back(fwd_half(static_cast<int>(h.edges.size())));
      h.edges.push_back({prev_vertex, next_vertex, next_pos - prev_pos});
      prev_vertex = next_vertex;
      prev_pos = next_pos;
    }
  }
  for (const auto& rep : g.generator_reps) {
    EdgePath p;
    for (Half hh : rep) {
      const EdgePath& chain = out.edge_paths[edge_of(hh)];
      if (is_fwd(hh))
        p.insert(p.end(), chain.begin(), chain.end());
      else {
        EdgePath ic = inverse_path(chain);
        p.insert(p.end(), ic.begin(), ic.end());
      }
    }
    h.generator_reps.push_back(p);
  }
  finalize(h);
  return out;
}

}  // namespace osl
