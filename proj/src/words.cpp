#include "osl/words.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace osl {

void validate_basis(const Basis& basis) {
  if (basis.empty()) throw MalformedInput("empty basis");
  for (const auto& name : basis) {
    if (name.empty() || !std::islower(static_cast<unsigned char>(name[0])))
      throw MalformedInput("bad generator name: '" + name + "'");
    for (char ch : name)
      if (!std::islower(static_cast<unsigned char>(ch)) &&
          !std::isdigit(static_cast<unsigned char>(ch)) && ch != '_')
        throw MalformedInput("bad generator name: '" + name + "'");
  }
  for (size_t i = 0; i < basis.size(); ++i)
    for (size_t j = i + 1; j < basis.size(); ++j)
      if (basis[i] == basis[j])
        throw MalformedInput("duplicate generator name: '" + basis[i] + "'");
}

Word reduce(Word w) {
  Word out;
  out.reserve(w.size());
  for (Letter x : w) {
    if (x == 0) throw MalformedInput("zero letter in word");
    if (!out.empty() && out.back() == -x)
      out.pop_back();
    else
      out.push_back(x);
  }
  return out;
}

Word inverse_word(const Word& w) {
  Word out;
  out.reserve(w.size());
  for (auto it = w.rbegin(); it != w.rend(); ++it) out.push_back(-*it);
  return out;
}

Word concat_reduce(const Word& a, const Word& b) {
  Word out = a;
  out.insert(out.end(), b.begin(), b.end());
  return reduce(std::move(out));
}

Word cyclic_reduce_allow_empty(const Word& w) {
  Word r = reduce(w);
  size_t lo = 0, hi = r.size();
  while (hi - lo >= 2 && r[lo] == -r[hi - 1]) {
    ++lo;
    --hi;
  }
  return Word(r.begin() + lo, r.begin() + hi);
}

Word cyclic_reduce(const Word& w) {
  Word r = cyclic_reduce_allow_empty(w);
  if (r.empty()) throw TrivialWord("word reduces to the identity");
  return r;
}

Word min_rotation(const Word& w) {
  if (w.size() <= 1) return w;
  size_t n = w.size();
  auto rot_less = [&](size_t a, size_t b) {
    for (size_t k = 0; k < n; ++k) {
      int ka = letter_key(w[(a + k) % n]);
      int kb = letter_key(w[(b + k) % n]);
      if (ka != kb) return ka < kb;
    }
    return false;
  };
  size_t best = 0;
  for (size_t i = 1; i < n; ++i)
    if (rot_less(i, best)) best = i;
  Word out;
  out.reserve(n);
  for (size_t k = 0; k < n; ++k) out.push_back(w[(best + k) % n]);
  return out;
}

bool word_less(const Word& a, const Word& b) {
  if (a.size() != b.size()) return a.size() < b.size();
  for (size_t i = 0; i < a.size(); ++i) {
    int ka = letter_key(a[i]), kb = letter_key(b[i]);
    if (ka != kb) return ka < kb;
  }
  return false;
}

Word class_or_inverse_key(const ConjugacyClass& c) {
  if (c.rep.empty()) return c.rep;
  Word inv = min_rotation(inverse_word(c.rep));
  return word_less(inv, c.rep) ? inv : c.rep;
}

Word parse_word(const std::string& text, const Basis& basis) {
  Word out;
  std::istringstream in(text);
  std::string tok;
  while (in >> tok) {
    bool inv = false;
    if (tok.size() > 3 && tok.substr(tok.size() - 3) == "^-1") {
      inv = true;
      tok = tok.substr(0, tok.size() - 3);
    }
    auto it = std::find(basis.begin(), basis.end(), tok);
    if (it == basis.end())
      throw MalformedInput("unknown generator '" + tok + "' in word");
    Letter x = static_cast<Letter>(it - basis.begin()) + 1;
    out.push_back(inv ? -x : x);
  }
  return out;
}

std::string format_word(const Word& w, const Basis& basis) {
  std::string out;
  for (size_t i = 0; i < w.size(); ++i) {
    Letter x = w[i];
    int gen = x > 0 ? x : -x;
    if (gen < 1 || gen > static_cast<int>(basis.size()))
      throw MalformedInput("letter outside basis");
    if (i) out += ' ';
    out += basis[gen - 1];
    if (x < 0) out += "^-1";
  }
  return out;
}

Word apply_substitution(const Substitution& sub, const Word& w, int times) {
  if (times < 0) throw BadParams("apply_substitution: negative iteration count");
  Word cur = reduce(w);
  for (int round = 0; round < times; ++round) {
    Word next;
    for (Letter x : cur) {
      int gen = x > 0 ? x : -x;
      if (gen > static_cast<int>(sub.size()))
        throw MalformedInput("letter outside substitution domain");
      const Word& img = sub[gen - 1];
      if (x > 0)
        next.insert(next.end(), img.begin(), img.end());
      else {
        Word inv = inverse_word(img);
        next.insert(next.end(), inv.begin(), inv.end());
      }
    }
    cur = reduce(std::move(next));
  }
  return cur;
}

namespace {

// Total order on tuples used to escape length plateaus in Nielsen reduction:
// (total length, concatenated per-word keys).  Strictly decreasing along the
// run, which is what guarantees termination.
std::vector<int> tuple_key(const std::vector<Word>& u) {
  std::vector<int> key;
  size_t total = 0;
  for (const auto& w : u) total += w.size();
  key.push_back(static_cast<int>(total));
  for (const auto& w : u) {
    key.push_back(static_cast<int>(w.size()));
    for (Letter x : w) key.push_back(letter_key(x));
  }
  return key;
}

}  // namespace

Substitution invert_basis_map(const Substitution& images, int rank) {
  if (rank <= 0) throw BadParams("invert_basis_map: rank must be positive");
  if (static_cast<int>(images.size()) != rank)
    throw NotABasis("wrong number of generator images");

  // u = working tuple, t = the same tuple written as words in the original
  // images (formal symbols 1..rank).  Every Nielsen move keeps the invariant
  // t_i(images) = u_i.
  std::vector<Word> u(rank), t(rank);
  for (int i = 0; i < rank; ++i) {
    u[i] = reduce(images[i]);
    if (u[i].empty()) throw NotABasis("a generator image is trivial");
    t[i] = Word{static_cast<Letter>(i + 1)};
  }

  // Greedy Nielsen reduction: prefer the move that shortens the tuple most;
  // among equal-length candidates take the one that lowers the tuple order.
  // A tuple obtained from a basis reaches single letters; anything stuck
  // earlier was not a basis.
  for (int iter = 0;; ++iter) {
    if (iter > 200000)
      throw Error("invert_basis_map: reduction failed to terminate");
    long best_drop = 0;
    bool have_plateau = false;
    int bi = -1, bj = -1, bs = 0, bside = 0;
    Word best_word;
    std::vector<int> cur_key = tuple_key(u);
    std::vector<int> best_key = cur_key;
    for (int i = 0; i < rank; ++i)
      for (int j = 0; j < rank; ++j) {
        if (i == j) continue;
        for (int s : {1, -1})
          for (int side : {0, 1}) {
            Word uj = s > 0 ? u[j] : inverse_word(u[j]);
            Word cand = side == 0 ? concat_reduce(u[i], uj)
                                  : concat_reduce(uj, u[i]);
            long drop = static_cast<long>(u[i].size()) -
                        static_cast<long>(cand.size());
            if (drop > best_drop) {
              best_drop = drop;
              bi = i, bj = j, bs = s, bside = side;
              best_word = cand;
            } else if (best_drop == 0 && drop == 0) {
              std::vector<Word> alt = u;
              alt[i] = cand;
              std::vector<int> k = tuple_key(alt);
              if (k < best_key) {
                best_key = k;
                have_plateau = true;
                bi = i, bj = j, bs = s, bside = side;
                best_word = cand;
              }
            }
          }
      }
    if (best_drop == 0 && !have_plateau) break;
    Word tj = bs > 0 ? t[bj] : inverse_word(t[bj]);
    u[bi] = best_word;
    t[bi] = bside == 0 ? concat_reduce(t[bi], tj) : concat_reduce(tj, t[bi]);
    if (u[bi].empty()) throw NotABasis("images satisfy a relation");
  }

  // Recognize a permuted signed standard basis.
  Substitution inv(rank);
  std::vector<bool> seen(rank, false);
  for (int i = 0; i < rank; ++i) {
    if (u[i].size() != 1)
      throw NotABasis("Nielsen reduction did not reach single letters");
    int gen = u[i][0] > 0 ? u[i][0] : -u[i][0];
    if (seen[gen - 1]) throw NotABasis("duplicate generator after reduction");
    seen[gen - 1] = true;
    inv[gen - 1] = u[i][0] > 0 ? t[i] : inverse_word(t[i]);
  }

  // Self-certify: v_k evaluated at the images must spell the k-th generator.
  for (int g = 1; g <= rank; ++g) {
    Word check = apply_substitution(images, inv[g - 1]);
    if (check != Word{static_cast<Letter>(g)})
      throw CertificateFailure("basis inverse failed forward substitution");
  }
  return inv;
}

Integer fib0(int k) {
  // F_1 = 0, F_2 = 1.
  if (k < 1) throw BadParams("fib0 index must be >= 1");
  Integer a = 0, b = 1;  // F_1, F_2
  for (int i = 1; i < k; ++i) {
    Integer c = a + b;
    a = b;
    b = c;
  }
  return a;
}

}  // namespace osl

