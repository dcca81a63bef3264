#include "osl/folding.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>
#include <utility>

#include "osl/errors.hpp"

namespace osl {

namespace {

struct PlainUF {
  std::vector<int> parent;
  explicit PlainUF(int n) : parent(n) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  int find(int a) {
    while (parent[a] != a) {
      parent[a] = parent[parent[a]];
      a = parent[a];
    }
    return a;
  }
  // Keeps the smallest id as root, so roots double as canonical class names.
  bool unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a == b) return false;
    if (a > b) std::swap(a, b);
    parent[b] = a;
    return true;
  }
};

// Union-find tracking orientation (0 same, 1 reversed) relative to the root.
struct ParityUF {
  std::vector<int> parent;
  std::vector<int> rel;
  explicit ParityUF(int n) : parent(n), rel(n, 0) {
    std::iota(parent.begin(), parent.end(), 0);
  }
  std::pair<int, int> find(int a) {
    if (parent[a] == a) return {a, 0};
    auto [root, p] = find(parent[a]);
    parent[a] = root;
    rel[a] ^= p;
    return {root, rel[a]};
  }
  // unite(a, b, flip): identify a with b, reversed iff flip.
  bool unite(int a, int b, int flip) {
    auto [ra, pa] = find(a);
    auto [rb, pb] = find(b);
    if (ra == rb) {
      if ((pa ^ pb) != flip)
        throw CertificateFailure("fold would glue a segment to its own reverse");
      return false;
    }
    if (ra > rb) {
      std::swap(ra, rb);
      std::swap(pa, pb);
    }
    parent[rb] = ra;
    rel[rb] = pa ^ pb ^ flip;
    return true;
  }
};

using DepthKey = std::pair<Half, Half>;

// Bottleneck (max-min over chains) closure of the direct turn speeds within
// one gate, keyed by ordered direction pairs.
std::map<DepthKey, Rational> gate_closure_rates(const std::vector<Half>& gate,
                                                const TrainTrack& tt,
                                                const SpeedAssignment& s) {
  const int k = static_cast<int>(gate.size());
  std::vector<std::vector<Rational>> r(k, std::vector<Rational>(k, Rational(0)));
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) {
      int idx = tt.turn_index(gate[i], gate[j]);
      if (idx >= 0) r[i][j] = r[j][i] = s.speeds.at(idx);
    }
  for (int mid = 0; mid < k; ++mid)
    for (int i = 0; i < k; ++i) {
      if (i == mid) continue;
      for (int j = i + 1; j < k; ++j) {
        if (j == mid) continue;
        Rational through = std::min(r[i][mid], r[mid][j]);
        if (through > r[i][j]) r[i][j] = r[j][i] = through;
      }
    }
  std::map<DepthKey, Rational> out;
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j) out[{gate[i], gate[j]}] = r[i][j];
  return out;
}

void check_speed_vector(const TrainTrack& tt, const SpeedAssignment& s) {
  if (s.speeds.size() != tt.illegal_turns.size())
    throw BadParams("speed count does not match the illegal turn count");
  for (const Rational& v : s.speeds)
    if (v < 0) throw BadParams("fold speeds must be nonnegative");
}

struct PairRate {
  Half a = 0, b = 0;
  Rational rate;
};

// Every identified direction pair (closure, not just direct turns) with a
// positive rate, in deterministic vertex/gate/pair order.
std::vector<PairRate> positive_pairs(const MarkedGraph& domain,
                                     const TrainTrack& tt,
                                     const SpeedAssignment& s) {
  std::vector<PairRate> out;
  for (int v = 0; v < domain.num_vertices; ++v)
    for (const auto& gate : tt.gates[v]) {
      if (gate.size() < 2) continue;
      for (const auto& [key, rate] : gate_closure_rates(gate, tt, s))
        if (rate > 0) out.push_back({key.first, key.second, rate});
    }
  return out;
}

// Metric length of the longest common prefix of the two images, or nullopt
// when one is a prefix of the other (the pair never diverges).
std::optional<Rational> image_agreement(const GraphMap& m, Half a, Half b) {
  EdgePath pa = m.image_of_half(a);
  EdgePath pb = m.image_of_half(b);
  const size_t n = std::min(pa.size(), pb.size());
  Rational acc = 0;
  for (size_t i = 0; i < n; ++i) {
    if (pa[i] != pb[i]) return acc;
    acc += m.codomain.edges[edge_of(pa[i])].length;
  }
  return std::nullopt;
}

SpeedAssignment with_loss(const TrainTrack& tt, const SpeedAssignment& s) {
  SpeedAssignment out = s;
  derive_loss_speed(tt, out);
  return out;
}

}  // namespace

SpeedAssignment greedy_speeds(const TrainTrack& tt) {
  if (tt.illegal_turns.empty())
    throw NoIllegalTurns("the map has no illegal turns to fold");
  return make_assignment(tt, std::vector<Rational>(tt.illegal_turns.size(), 1));
}

SpeedAssignment make_assignment(const TrainTrack& tt,
                                std::vector<Rational> speeds) {
  SpeedAssignment out;
  out.speeds = std::move(speeds);
  check_speed_vector(tt, out);
  derive_loss_speed(tt, out);
  return out;
}

void derive_loss_speed(const TrainTrack& tt, SpeedAssignment& s) {
  check_speed_vector(tt, s);
  std::vector<int> order(tt.illegal_turns.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return s.speeds[a] > s.speeds[b];
  });
  int top = 0;
  for (const Turn& t : tt.illegal_turns) top = std::max({top, t.a, t.b});
  PlainUF uf(top + 1);
  Rational loss = 0;
  for (int i : order) {
    if (s.speeds[i] == 0) continue;
    if (uf.unite(tt.illegal_turns[i].a, tt.illegal_turns[i].b))
      loss += s.speeds[i];
  }
  s.loss_speed = loss;
}

std::map<std::pair<Half, Half>, Rational> effective_depths(
    const std::vector<Half>& gate, const TrainTrack& tt,
    const SpeedAssignment& s, const Rational& t) {
  check_speed_vector(tt, s);
  auto rates = gate_closure_rates(gate, tt, s);
  for (auto& [key, rate] : rates) rate *= t;
  return rates;
}

FoldEvent max_fold_time(const GraphMap& m, const TrainTrack& tt,
                        const SpeedAssignment& s) {
  check_speed_vector(tt, s);
  if (tt.tension_edges.size() != m.domain.edges.size())
    throw PartialTension(
        "folding requires the whole domain to be tension; decorate first");
  bool any = false;
  for (const Rational& v : s.speeds) any = any || v > 0;
  if (!any) throw NoFolding("all fold speeds are zero");
  const SpeedAssignment sc = with_loss(tt, s);

  const auto pairs = positive_pairs(m.domain, tt, s);
  std::map<Half, Rational> fastest;  // fastest identification rate per direction
  for (const auto& p : pairs) {
    Rational& a = fastest[p.a];
    if (p.rate > a) a = p.rate;
    Rational& b = fastest[p.b];
    if (p.rate > b) b = p.rate;
  }

  // (priority, event); lower priority wins ties at equal time.
  std::vector<std::pair<int, FoldEvent>> cand;
  if (m.max_stretch > 1) {
    FoldEvent ev;
    ev.time = (1 - 1 / m.max_stretch) / sc.loss_speed;
    ev.kind = "arrival";
    ev.description = "the left-over map becomes an isometry";
    cand.emplace_back(0, std::move(ev));
  }
  for (const auto& [h, rate] : fastest) {
    if (rate == 0) continue;
    int e = edge_of(h);
    FoldEvent ev;
    ev.time = m.domain.edges[e].length / rate;
    ev.kind = "edge-consumed";
    ev.description = "edge e" + std::to_string(e) + " fully consumed from its " +
                     (is_fwd(h) ? std::string("tail") : std::string("head"));
    cand.emplace_back(1, std::move(ev));
  }
  for (int e = 0; e < static_cast<int>(m.domain.edges.size()); ++e) {
    auto f = fastest.find(fwd_half(e));
    auto r = fastest.find(rev(fwd_half(e)));
    if (f == fastest.end() || r == fastest.end()) continue;
    if (f->second == 0 || r->second == 0) continue;
    FoldEvent ev;
    ev.time = m.domain.edges[e].length / (f->second + r->second);
    ev.kind = "fold-collision";
    ev.description = "fold fronts meet inside edge e" + std::to_string(e);
    cand.emplace_back(2, std::move(ev));
  }
  for (const auto& p : pairs) {
    auto agree = image_agreement(m, p.a, p.b);
    if (!agree) continue;
    FoldEvent ev;
    ev.time = *agree / (m.max_stretch * p.rate);
    ev.kind = "image-divergence";
    ev.description = "images of the pair at edges e" +
                     std::to_string(edge_of(p.a)) + "/e" +
                     std::to_string(edge_of(p.b)) + " diverge";
    cand.emplace_back(3, std::move(ev));
  }

  const std::pair<int, FoldEvent>* best = nullptr;
  for (const auto& c : cand)
    if (!best || c.second.time < best->second.time ||
        (c.second.time == best->second.time && c.first < best->first))
      best = &c;
  if (!best) throw NoFolding("no constraint ever binds at these speeds");
  return best->second;
}

FoldStep fold_step(const GraphMap& m, const TrainTrack& tt,
                   const SpeedAssignment& s, const Rational& t) {
  const MarkedGraph& X = m.domain;
  const MarkedGraph& Y = m.codomain;
  if (t < 0) throw BadParams("fold time must be nonnegative");
  if (t == 0) return FoldStep{X, identity_map(X), m, X.volume()};

  const FoldEvent ev = max_fold_time(m, tt, s);
  if (t > ev.time)
    throw TimeBeyondEvent("fold time " + rational_str(t) +
                          " exceeds the first event at " + rational_str(ev.time) +
                          " (" + ev.kind + ")");
  const SpeedAssignment sc = with_loss(tt, s);

  const int E = static_cast<int>(X.edges.size());
  const int V = X.num_vertices;

  struct PairDepth {
    Half a = 0, b = 0;
    Rational d;
  };
  std::vector<PairDepth> pairs;
  for (const auto& p : positive_pairs(X, tt, s))
    pairs.push_back({p.a, p.b, p.rate * t});

  // Cut positions (strictly interior) per edge.
  std::vector<std::set<Rational>> cut(E);
  for (const auto& p : pairs)
    for (Half h : {p.a, p.b}) {
      const int e = edge_of(h);
      const Rational& len = X.edges[e].length;
      if (p.d > len)
        throw CertificateFailure("identification depth exceeds an edge length");
      Rational pos = is_fwd(h) ? p.d : len - p.d;
      if (pos > 0 && pos < len) cut[e].insert(pos);
    }

  // Piece boundaries, piece ids (lexicographic in (edge, index)), node ids.
  std::vector<std::vector<Rational>> bd(E);
  std::vector<int> piece_base(E + 1, 0);
  std::vector<int> interior_base(E + 1, 0);
  interior_base[0] = V;
  for (int e = 0; e < E; ++e) {
    bd[e].push_back(0);
    for (const Rational& c : cut[e]) bd[e].push_back(c);
    bd[e].push_back(X.edges[e].length);
    piece_base[e + 1] = piece_base[e] + static_cast<int>(bd[e].size()) - 1;
    interior_base[e + 1] = interior_base[e] + static_cast<int>(bd[e].size()) - 2;
  }
  const int P = piece_base[E];
  const int N = interior_base[E];
  std::vector<std::pair<int, int>> pinfo(P);  // piece id -> (edge, index)
  std::vector<Rational> plen(P);
  for (int e = 0; e < E; ++e)
    for (int k = 0; k + 1 < static_cast<int>(bd[e].size()); ++k) {
      pinfo[piece_base[e] + k] = {e, k};
      plen[piece_base[e] + k] = bd[e][k + 1] - bd[e][k];
    }

  auto node_at_boundary = [&](int e, int k) {
    if (k == 0) return X.edges[e].from;
    if (k == static_cast<int>(bd[e].size()) - 1) return X.edges[e].to;
    return interior_base[e] + k - 1;
  };
  auto boundary_index = [&](int e, const Rational& pos) {
    auto it = std::lower_bound(bd[e].begin(), bd[e].end(), pos);
    if (it == bd[e].end() || *it != pos)
      throw CertificateFailure("identified point misses every piece boundary");
    return static_cast<int>(it - bd[e].begin());
  };
  auto node_at_depth = [&](Half h, const Rational& depth) {
    const int e = edge_of(h);
    Rational pos = is_fwd(h) ? depth : X.edges[e].length - depth;
    return node_at_boundary(e, boundary_index(e, pos));
  };

  struct OrientedPiece {
    int pid = 0;
    int flip = 0;
  };
  auto prefix_pieces = [&](Half h, const Rational& depth) {
    std::vector<OrientedPiece> out;
    const int e = edge_of(h);
    const int K = static_cast<int>(bd[e].size()) - 1;
    Rational cum = 0;
    if (is_fwd(h)) {
      for (int k = 0; k < K && cum < depth; ++k) {
        out.push_back({piece_base[e] + k, 0});
        cum += plen[piece_base[e] + k];
      }
    } else {
      for (int k = K - 1; k >= 0 && cum < depth; --k) {
        out.push_back({piece_base[e] + k, 1});
        cum += plen[piece_base[e] + k];
      }
    }
    if (cum != depth)
      throw CertificateFailure("identification depth is not a piece boundary");
    return out;
  };

  ParityUF pieces(P);
  PlainUF nodes(N);
  for (const auto& p : pairs) {
    auto wa = prefix_pieces(p.a, p.d);
    auto wb = prefix_pieces(p.b, p.d);
    if (wa.size() != wb.size())
      throw CertificateFailure("identified prefixes break into different piece counts");
    Rational cum = 0;
    for (size_t i = 0; i < wa.size(); ++i) {
      if (plen[wa[i].pid] != plen[wb[i].pid])
        throw CertificateFailure("identified pieces have different lengths");
      pieces.unite(wa[i].pid, wb[i].pid, wa[i].flip ^ wb[i].flip);
      cum += plen[wa[i].pid];
      nodes.unite(node_at_depth(p.a, cum), node_at_depth(p.b, cum));
    }
  }

  // Piece classes -> new edges, ordered by their smallest (edge, index).
  std::vector<int> proot(P), ppar(P);
  for (int p = 0; p < P; ++p) {
    auto [r, par] = pieces.find(p);
    proot[p] = r;
    ppar[p] = par;
    if (plen[p] != plen[r])
      throw CertificateFailure("glued pieces have different lengths");
  }
  std::vector<int> new_edge_of_root(P, -1);
  std::vector<int> edge_roots;
  for (int p = 0; p < P; ++p)
    if (proot[p] == p) {
      new_edge_of_root[p] = static_cast<int>(edge_roots.size());
      edge_roots.push_back(p);
    }

  // Node classes -> new vertices; original-vertex classes come first because
  // the union-find keeps minimal ids as roots.
  std::vector<int> vclass(N, -1);
  std::vector<int> node_roots;
  for (int n = 0; n < N; ++n)
    if (nodes.find(n) == n) node_roots.push_back(n);
  for (size_t i = 0; i < node_roots.size(); ++i) vclass[node_roots[i]] = static_cast<int>(i);
  for (int n = 0; n < N; ++n) vclass[n] = vclass[nodes.find(n)];

  std::vector<VertexKind> kinds(node_roots.size(), VertexKind::Cut);
  for (int v = 0; v < V; ++v) {
    VertexKind kv = v < static_cast<int>(X.vertex_kinds.size())
                        ? X.vertex_kinds[v]
                        : VertexKind::Real;
    VertexKind& slot = kinds[vclass[v]];
    if (kv == VertexKind::Real)
      slot = VertexKind::Real;
    else if (kv == VertexKind::HairTip && slot != VertexKind::Real)
      slot = VertexKind::HairTip;
  }

  MarkedGraph q;
  q.basis = X.basis;
  q.num_vertices = static_cast<int>(node_roots.size());
  q.vertex_kinds = kinds;
  for (int r : edge_roots) {
    auto [e, k] = pinfo[r];
    EdgeRec rec;
    rec.from = vclass[node_at_boundary(e, k)];
    rec.to = vclass[node_at_boundary(e, k + 1)];
    rec.length = plen[r];
    q.edges.push_back(rec);
  }
  const Rational vol_raw = X.volume() - t * sc.loss_speed;
  {
    Rational vol = 0;
    for (const auto& e : q.edges) vol += e.length;
    if (vol != vol_raw)
      throw CertificateFailure("quotient volume disagrees with the loss rate");
  }

  // Images of the old edges as paths of new halves.
  std::vector<EdgePath> fwd_images(E);
  for (int e = 0; e < E; ++e)
    for (int k = 0; k + 1 < static_cast<int>(bd[e].size()); ++k) {
      const int pid = piece_base[e] + k;
      fwd_images[e].push_back(2 * new_edge_of_root[proot[pid]] + ppar[pid]);
    }

  q.base_vertex = vclass[X.base_vertex];
  for (const EdgePath& rep : X.generator_reps) {
    EdgePath img;
    for (Half h : rep) {
      EdgePath part = is_fwd(h) ? fwd_images[edge_of(h)]
                                : inverse_path(fwd_images[edge_of(h)]);
      img.insert(img.end(), part.begin(), part.end());
    }
    q.generator_reps.push_back(reduce_path(std::move(img)));
  }
  finalize(q);
  MarkedGraph qn = normalized(q);

  GraphMap fwd;
  fwd.domain = X;
  fwd.codomain = qn;
  fwd.vertex_images.resize(V);
  for (int v = 0; v < V; ++v) fwd.vertex_images[v] = vclass[v];
  fwd.edge_images = fwd_images;
  finalize_map(fwd);
  for (const Rational& st : fwd.stretch)
    if (st * vol_raw != 1)
      throw CertificateFailure("quotient map stretch is not uniform");

  // ---- the left-over map, through a private codomain subdivision ----
  const Rational lambda = m.max_stretch;
  std::vector<std::set<Rational>> ycut(Y.edges.size());
  for (int e = 0; e < E; ++e) {
    const EdgePath& img = m.edge_images[e];
    if (path_length(Y, img) != lambda * X.edges[e].length)
      throw CertificateFailure("domain is not uniformly stretched");
    for (size_t k = 1; k + 1 < bd[e].size(); ++k) {
      const Rational pos = lambda * bd[e][k];
      Rational cum = 0;
      for (Half h : img) {
        const Rational hl = Y.edges[edge_of(h)].length;
        if (pos <= cum) break;
        if (pos < cum + hl) {
          Rational local = pos - cum;
          ycut[edge_of(h)].insert(is_fwd(h) ? local : hl - local);
          break;
        }
        cum += hl;
      }
    }
  }
  std::vector<std::vector<Rational>> ycutv(Y.edges.size());
  for (size_t e = 0; e < Y.edges.size(); ++e)
    ycutv[e].assign(ycut[e].begin(), ycut[e].end());
  Subdivision sub = subdivide(Y, ycutv);
  const MarkedGraph& y2 = sub.graph;

  auto reexpress = [&](const EdgePath& p) {
    EdgePath out;
    for (Half h : p) {
      EdgePath part = is_fwd(h) ? sub.edge_paths[edge_of(h)]
                                : inverse_path(sub.edge_paths[edge_of(h)]);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  };
  std::vector<EdgePath> img2(E);
  for (int e = 0; e < E; ++e) img2[e] = reexpress(m.edge_images[e]);

  // Codomain vertex at an exact metric position along an old edge's image.
  auto vertex_at = [&](int e, const Rational& pos) {
    if (pos == 0) return m.vertex_images[X.edges[e].from];
    Rational cum = 0;
    for (Half h : img2[e]) {
      cum += y2.edges[edge_of(h)].length;
      if (cum == pos) return y2.head(h);
      if (cum > pos)
        throw CertificateFailure("piece boundary misses the codomain subdivision");
    }
    throw CertificateFailure("piece boundary lies beyond the image path");
  };

  std::vector<int> left_vimg(node_roots.size(), -1);
  for (int n = 0; n < N; ++n) {
    int img;
    if (n < V) {
      img = m.vertex_images[n];  // original codomain ids survive subdivision
    } else {
      int e = 0;
      while (interior_base[e + 1] <= n) ++e;
      const int k = n - interior_base[e] + 1;
      img = vertex_at(e, lambda * bd[e][k]);
    }
    int& slot = left_vimg[vclass[n]];
    if (slot == -1)
      slot = img;
    else if (slot != img)
      throw CertificateFailure("glued vertices land on different codomain points");
  }

  auto slice = [&](int e, int k) {
    const Rational from = lambda * bd[e][k];
    const Rational to = lambda * bd[e][k + 1];
    EdgePath out;
    Rational cum = 0;
    for (Half h : img2[e]) {
      const Rational next = cum + y2.edges[edge_of(h)].length;
      if (next <= from) {
        cum = next;
        continue;
      }
      if (cum >= to) break;
      if (cum < from || next > to)
        throw CertificateFailure("piece image does not align with the subdivision");
      out.push_back(h);
      cum = next;
    }
    if (path_length(y2, out) != to - from)
      throw CertificateFailure("piece image has the wrong length");
    return out;
  };
  std::vector<EdgePath> left_img(edge_roots.size());
  std::vector<char> seen(edge_roots.size(), 0);
  for (int p = 0; p < P; ++p) {
    auto [e, k] = pinfo[p];
    const int nid = new_edge_of_root[proot[p]];
    EdgePath sl = slice(e, k);
    if (ppar[p]) sl = inverse_path(sl);
    if (!seen[nid]) {
      left_img[nid] = std::move(sl);
      seen[nid] = 1;
    } else if (left_img[nid] != sl) {
      throw CertificateFailure("fold glued segments with different images");
    }
  }

  GraphMap left;
  left.domain = qn;
  left.codomain = y2;
  left.vertex_images = left_vimg;
  left.edge_images = left_img;
  finalize_map(left);
  for (const Rational& st : left.stretch)
    if (st != lambda * vol_raw)
      throw CertificateFailure("left-over stretch is not uniform");
  if (fwd.max_stretch * left.max_stretch != lambda)
    throw CertificateFailure("stretch did not factor through the fold");

  return FoldStep{std::move(qn), std::move(fwd), std::move(left), vol_raw};
}

LengthDerivative length_derivative(const GraphMap& m, const TrainTrack& tt,
                                   const SpeedAssignment& s,
                                   const ConjugacyClass& alpha) {
  const SpeedAssignment sc = with_loss(tt, s);
  if (sc.loss_speed == 0) throw NoFolding("no volume is lost at these speeds");
  Rational crossed = 0;
  for (int i : turn_multiset(m, tt, alpha)) crossed += s.speeds[i];
  const Rational vol = m.domain.volume();
  LengthDerivative out;
  out.vanishing = 2 * crossed / sc.loss_speed / vol;
  out.value = loop_length(m.domain, alpha) / vol - out.vanishing;
  return out;
}

Rational length_at(const GraphMap& m, const TrainTrack& tt,
                   const SpeedAssignment& s, const ConjugacyClass& alpha,
                   const Rational& t) {
  const SpeedAssignment sc = with_loss(tt, s);
  Rational crossed = 0;
  for (int i : turn_multiset(m, tt, alpha)) crossed += s.speeds[i];
  const Rational den = m.domain.volume() - t * sc.loss_speed;
  if (den <= 0) throw BadParams("fold time at or beyond total collapse");
  return (loop_length(m.domain, alpha) - 2 * t * crossed) / den;
}

namespace {

// Folds segment by segment until the target is reached, appending one
// breakpoint per event; asserts the geodesic identity at each.
void run_segments(PathTrace& tr, GraphMap from_origin, GraphMap leftover,
                  const SpeedProvider& provider, const StopPolicy& stop,
                  const Rational& lambda_total) {
  for (int seg = 0; seg < stop.max_segments; ++seg) {
    if (marked_equal(leftover.domain, tr.target)) return;
    TrainTrack tt = train_track(leftover);
    SpeedAssignment sp = provider(leftover, tt);
    derive_loss_speed(tt, sp);
    FoldEvent ev = max_fold_time(leftover, tt, sp);
    if (!(ev.time > 0)) throw StalledPath("fold event at time zero");
    FoldStep st = fold_step(leftover, tt, sp, ev.time);
    from_origin = compose(from_origin, st.forward);
    leftover = st.leftover;

    Breakpoint bp;
    bp.event = ev.kind;
    bp.volume_raw = st.volume_raw;
    bp.lambda_from_origin = stretch_factor(tr.origin, st.graph).lambda;
    bp.lambda_to_target = stretch_factor(st.graph, tr.target).lambda;
    if (bp.lambda_from_origin * bp.lambda_to_target != lambda_total)
      throw CertificateFailure("geodesic identity failed at a breakpoint");
    bp.graph = st.graph;
    bp.map_from_origin = from_origin;
    bp.leftover_map = leftover;
    const bool arrived = ev.kind == "arrival";
    tr.points.push_back(std::move(bp));
    if (arrived) {
      if (!marked_equal(tr.points.back().graph, tr.target))
        throw CertificateFailure("arrival did not land on the target");
      return;
    }
  }
  throw StalledPath("fold path exceeded the segment cap");
}

Breakpoint start_point(const PathTrace& tr, const GraphMap& m,
                       const Rational& lambda_total) {
  Breakpoint bp;
  bp.event = "start";
  bp.lambda_from_origin = 1;
  bp.lambda_to_target = lambda_total;
  bp.volume_raw = 1;
  bp.graph = tr.origin;
  bp.map_from_origin = identity_map(tr.origin);
  bp.leftover_map = m;
  return bp;
}

}  // namespace

PathTrace fold_path(const GraphMap& m, const SpeedProvider& provider,
                    const StopPolicy& stop) {
  if (m.domain.volume() != 1 || m.codomain.volume() != 1)
    throw BadParams("fold paths expect normalized graphs");
  GraphMap mm = m;
  if (mm.stretch.empty()) finalize_map(mm);

  PathTrace tr;
  tr.origin = mm.domain;
  tr.target = mm.codomain;
  const Rational lambda_total = stretch_factor(tr.origin, tr.target).lambda;
  tr.points.push_back(start_point(tr, mm, lambda_total));
  run_segments(tr, identity_map(tr.origin), mm, provider, stop, lambda_total);
  return tr;
}

PathTrace standard_path(const MarkedGraph& x, const MarkedGraph& y) {
  if (x.volume() != 1 || y.volume() != 1)
    throw BadParams("standard paths expect normalized graphs");
  GraphMap m = canonical_map(x, y);

  const int E = static_cast<int>(x.edges.size());
  std::vector<Rational> img_len(E);
  Rational total = 0;
  for (int e = 0; e < E; ++e) {
    img_len[e] = path_length(y, m.edge_images[e]);
    total += img_len[e];
  }
  bool already_scaled = true;
  for (int e = 0; e < E; ++e)
    already_scaled = already_scaled && img_len[e] == total * x.edges[e].length;

  PathTrace tr;
  tr.origin = x;
  tr.target = y;
  const Rational lambda_total = stretch_factor(x, y).lambda;
  tr.points.push_back(start_point(tr, m, lambda_total));

  GraphMap from_origin = identity_map(x);
  GraphMap current = m;
  if (!already_scaled) {
    MarkedGraph xp = x;
    for (int e = 0; e < E; ++e) xp.edges[e].length = img_len[e] / total;
    finalize(xp);

    GraphMap rescale;
    rescale.domain = x;
    rescale.codomain = xp;
    rescale.vertex_images.resize(x.num_vertices);
    std::iota(rescale.vertex_images.begin(), rescale.vertex_images.end(), 0);
    for (int e = 0; e < E; ++e) rescale.edge_images.push_back({fwd_half(e)});
    finalize_map(rescale);

    GraphMap rest;
    rest.domain = xp;
    rest.codomain = y;
    rest.vertex_images = m.vertex_images;
    rest.edge_images = m.edge_images;
    finalize_map(rest);

    Breakpoint bp;
    bp.event = "rescale";
    bp.lambda_from_origin = stretch_factor(x, xp).lambda;
    bp.lambda_to_target = stretch_factor(xp, y).lambda;
    bp.volume_raw = 1;
    if (bp.lambda_from_origin * bp.lambda_to_target != lambda_total)
      throw CertificateFailure("rescaling leg is not geodesic");
    bp.graph = xp;
    bp.map_from_origin = rescale;
    bp.leftover_map = rest;
    tr.points.push_back(std::move(bp));
    from_origin = rescale;
    current = rest;
  }
  run_segments(
      tr, std::move(from_origin), std::move(current),
      [](const GraphMap&, const TrainTrack& tt) { return greedy_speeds(tt); },
      StopPolicy{}, lambda_total);
  return tr;
}

std::string trace_csv(const PathTrace& t) {
  std::ostringstream os;
  os << "s,lambda_from_origin,lambda_to_target,volume_raw,event";
  for (const ConjugacyClass& cls : t.tracked)
    os << ",len[" << format_word(cls.rep, t.origin.basis) << "]";
  os << "\n";
  for (const Breakpoint& bp : t.points) {
    os << log_decimal_str(bp.lambda_from_origin) << ","
       << rational_str(bp.lambda_from_origin) << ","
       << rational_str(bp.lambda_to_target) << "," << rational_str(bp.volume_raw)
       << "," << bp.event;
    for (const ConjugacyClass& cls : t.tracked) {
      const Rational len = loop_length(bp.graph, cls);
      os << "," << decimal_str(len) << " (" << rational_str(len) << ")";
    }
    os << "\n";
  }
  return os.str();
}

}  // namespace osl
