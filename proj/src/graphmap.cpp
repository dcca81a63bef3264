#include "osl/graphmap.hpp"

#include <algorithm>
#include <map>

#include "json.hpp"
#include "osl/errors.hpp"

namespace osl {

EdgePath GraphMap::image_of_half(Half h) const {
  const EdgePath& img = edge_images[edge_of(h)];
  return is_fwd(h) ? img : inverse_path(img);
}

EdgePath GraphMap::image_of_path(const EdgePath& p) const {
  EdgePath out;
  for (Half h : p) {
    EdgePath img = image_of_half(h);
    out.insert(out.end(), img.begin(), img.end());
  }
  return reduce_path(std::move(out));
}

bool same_graph(const MarkedGraph& a, const MarkedGraph& b) {
  if (a.basis != b.basis || a.num_vertices != b.num_vertices ||
      a.base_vertex != b.base_vertex || a.edges.size() != b.edges.size())
    return false;
  for (size_t e = 0; e < a.edges.size(); ++e)
    if (a.edges[e].from != b.edges[e].from || a.edges[e].to != b.edges[e].to ||
        a.edges[e].length != b.edges[e].length)
      return false;
  return a.generator_reps == b.generator_reps;
}

void finalize_map(GraphMap& m) {
  const MarkedGraph& x = m.domain;
  const MarkedGraph& y = m.codomain;
  if (x.basis != y.basis) throw MarkingMismatch("map endpoints use different bases");
  if (m.vertex_images.size() != static_cast<size_t>(x.num_vertices) ||
      m.edge_images.size() != x.edges.size())
    throw BadParams("map image tables do not match the domain");
  for (int v : m.vertex_images)
    if (v < 0 || v >= y.num_vertices) throw BadParams("vertex image out of range");

  m.stretch.assign(x.edges.size(), 0);
  m.max_stretch = 0;
  for (size_t e = 0; e < x.edges.size(); ++e) {
    EdgePath img = reduce_path(m.edge_images[e]);
    int at = m.vertex_images[x.edges[e].from];
    for (Half h : img) {
      if (h < 0 || h >= 2 * static_cast<int>(y.edges.size()))
        throw BadParams("edge image out of range");
      if (y.tail(h) != at) throw BadParams("edge image is not a path");
      at = y.head(h);
    }
    if (at != m.vertex_images[x.edges[e].to])
      throw BadParams("edge image endpoints disagree with vertex images");
    m.edge_images[e] = std::move(img);
    m.stretch[e] = path_length(y, m.edge_images[e]) / x.edges[e].length;
    m.max_stretch = std::max(m.max_stretch, m.stretch[e]);
  }

  // Marking compatibility: each generator's representative must land in the
  // generator's conjugacy class.
  for (int i = 0; i < x.rank(); ++i) {
    EdgePath img = m.image_of_path(x.generator_reps[i]);
    Word target = {static_cast<Letter>(i + 1)};
    try {
      if (!(graph_class(y, img) == ConjugacyClass(target)))
        throw MarkingMismatch("map does not respect the marking of generator " +
                              x.basis[i]);
    } catch (const TrivialWord&) {
      throw MarkingMismatch("map collapses the representative of generator " +
                            x.basis[i]);
    }
  }
}

GraphMap identity_map(const MarkedGraph& g) {
  GraphMap m;
  m.domain = g;
  m.codomain = g;
  m.vertex_images.resize(g.num_vertices);
  for (int v = 0; v < g.num_vertices; ++v) m.vertex_images[v] = v;
  for (size_t e = 0; e < g.edges.size(); ++e)
    m.edge_images.push_back({fwd_half(static_cast<int>(e))});
  finalize_map(m);
  return m;
}

EdgePath based_loop(const MarkedGraph& g, const Word& w) {
  EdgePath out;
  for (Letter l : w) {
    const EdgePath& rep = g.generator_reps[std::abs(l) - 1];
    EdgePath part = l > 0 ? rep : inverse_path(rep);
    out.insert(out.end(), part.begin(), part.end());
  }
  return reduce_path(std::move(out));
}

GraphMap canonical_map(const MarkedGraph& x, const MarkedGraph& y) {
  if (x.num_vertices != 1)
    throw BadParams("canonical maps are built from rose domains only");
  GraphMap m;
  m.domain = x;
  m.codomain = y;
  m.vertex_images = {y.base_vertex};
  for (size_t e = 0; e < x.edges.size(); ++e) {
    Word label = path_word(x, {fwd_half(static_cast<int>(e))});
    m.edge_images.push_back(based_loop(y, label));
  }
  finalize_map(m);
  return m;
}

GraphMap compose(const GraphMap& first, const GraphMap& second) {
  if (!same_graph(first.codomain, second.domain))
    throw BadParams("maps are not composable");
  GraphMap m;
  m.domain = first.domain;
  m.codomain = second.codomain;
  for (int v : first.vertex_images) m.vertex_images.push_back(second.vertex_images[v]);
  for (const EdgePath& img : first.edge_images)
    m.edge_images.push_back(second.image_of_path(img));
  finalize_map(m);
  return m;
}

std::vector<int> tension_subgraph(const GraphMap& m) {
  std::vector<int> out;
  for (size_t e = 0; e < m.stretch.size(); ++e)
    if (m.stretch[e] == m.max_stretch) out.push_back(static_cast<int>(e));
  return out;
}

bool TrainTrack::same_gate(Half a, Half b) const {
  return gate_uid[a] == gate_uid[b];
}

int TrainTrack::turn_index(Half a, Half b) const {
  if (a > b) std::swap(a, b);
  for (size_t i = 0; i < illegal_turns.size(); ++i)
    if (illegal_turns[i].a == a && illegal_turns[i].b == b)
      return static_cast<int>(i);
  return -1;
}

TrainTrack train_track(const GraphMap& m) {
  const MarkedGraph& x = m.domain;
  TrainTrack tt;
  tt.gates.resize(x.num_vertices);
  tt.gate_uid.assign(2 * x.edges.size(), -1);
  tt.tension_edges = tension_subgraph(m);

  int next_uid = 0;
  auto star = x.stars();
  for (int v = 0; v < x.num_vertices; ++v) {
    // Group the directions at v by their image germ.
    std::map<Half, std::vector<Half>> by_germ;
    for (Half h : star[v]) {
      EdgePath img = m.image_of_half(h);
      if (img.empty())
        throw DegenerateEdge("edge e" + std::to_string(edge_of(h)) +
                             " has a point image");
      by_germ[img.front()].push_back(h);
    }
    std::vector<std::vector<Half>> gates(by_germ.size());
    size_t at = 0;
    for (auto& [germ, dirs] : by_germ) gates[at++] = std::move(dirs);
    std::sort(gates.begin(), gates.end(),
              [](const auto& a, const auto& b) { return a.front() < b.front(); });
    for (const auto& gate : gates) {
      for (Half h : gate) tt.gate_uid[h] = next_uid;
      ++next_uid;
      for (size_t i = 0; i < gate.size(); ++i)
        for (size_t j = i + 1; j < gate.size(); ++j)
          tt.illegal_turns.push_back({gate[i], gate[j]});
    }
    if (gates.size() < 2) tt.low_gate_vertices.push_back(v);
    tt.gates[v] = std::move(gates);
  }
  return tt;
}

bool is_yoyo(const MarkedGraph& g, const Turn& t) {
  int v = g.tail(t.a);
  int e1 = edge_of(t.a), e2 = edge_of(t.b);
  bool has_loop = (g.edges[e1].from == g.edges[e1].to && g.edges[e1].from == v) ||
                  (g.edges[e2].from == g.edges[e2].to && g.edges[e2].from == v);
  if (!has_loop) return false;
  auto star = g.stars();
  for (Half h : star[v])
    if (edge_of(h) != e1 && edge_of(h) != e2) return false;
  return true;
}

std::vector<int> turn_multiset(const GraphMap& m, const TrainTrack& tt,
                               const ConjugacyClass& alpha) {
  EdgePath loop = immersed_loop(m.domain, alpha);
  std::vector<int> out;
  for (size_t i = 0; i < loop.size(); ++i) {
    Half arriving = loop[i];
    Half leaving = loop[(i + 1) % loop.size()];
    int idx = tt.turn_index(rev(arriving), leaving);
    if (idx >= 0) out.push_back(idx);
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::string dump_map_json(const GraphMap& m) {
  nlohmann::json j;
  j["vertex_images"] = m.vertex_images;
  std::vector<std::string> images;
  for (const EdgePath& p : m.edge_images) images.push_back(format_edge_path(p));
  j["edge_images"] = images;
  std::vector<std::string> stretches;
  for (const Rational& s : m.stretch) stretches.push_back(rational_str(s));
  j["stretch"] = stretches;
  j["max_stretch"] = rational_str(m.max_stretch);
  j["tension_edges"] = tension_subgraph(m);
  return j.dump(2) + "\n";
}

}  // namespace osl
