#pragma once

#include <string>
#include <vector>

#include "osl/errors.hpp"
#include "osl/rational.hpp"

namespace osl {

// A letter is a nonzero integer: +k is the k-th generator (1-based), -k its
// inverse.  Words are freely reduced unless a function says otherwise.
using Letter = int;
using Word = std::vector<Letter>;

// Generator names, index 0 <-> letter +1.  Names must be distinct and match
// [a-z][a-z0-9_]* so the text syntax ("b^-1 a c c") stays unambiguous.
using Basis = std::vector<std::string>;

void validate_basis(const Basis& basis);

// Sort key that puts a < a^-1 < b < b^-1 < ...  Every lexicographic choice in
// the library (canonical rotations, witness tie-breaks) uses this order.
inline int letter_key(Letter x) {
  int gen = x > 0 ? x : -x;
  return 2 * (gen - 1) + (x < 0 ? 1 : 0);
}

Word reduce(Word w);
Word inverse_word(const Word& w);
Word concat_reduce(const Word& a, const Word& b);

// Free reduction followed by trimming matching ends.  Throws TrivialWord if
// the input represents the identity; use the _allow_empty variant where the
// empty answer is meaningful.
Word cyclic_reduce(const Word& w);
Word cyclic_reduce_allow_empty(const Word& w);

// Lexicographically least rotation under letter_key order (input must be
// cyclically reduced).
Word min_rotation(const Word& w);

// Canonical form of a conjugacy class: cyclically reduced, least rotation.
struct ConjugacyClass {
  Word rep;

  ConjugacyClass() = default;
  explicit ConjugacyClass(const Word& w) : rep(min_rotation(cyclic_reduce(w))) {}

  bool operator==(const ConjugacyClass& o) const { return rep == o.rep; }
  bool operator!=(const ConjugacyClass& o) const { return rep != o.rep; }
};

// Orders words by (length, letter_key sequence); total order used for
// deterministic candidate lists and witness tie-breaks.
bool word_less(const Word& a, const Word& b);

// Canonical representative of {[w], [w^-1]}: candidate loops count a class
// and its inverse once, so deduplication runs on this key.
Word class_or_inverse_key(const ConjugacyClass& c);

// Text form: space-separated letters, inverses written with ^-1.
Word parse_word(const std::string& text, const Basis& basis);
std::string format_word(const Word& w, const Basis& basis);

// A substitution sends generator i to images[i]; letters map to images or
// their inverses, the result is reduced.  Not required to be an automorphism.
using Substitution = std::vector<Word>;

Word apply_substitution(const Substitution& sub, const Word& w, int times = 1);

// Given images u_1..u_n of the generators, decide whether they freely
// generate and, if so, return words v_1..v_n with v_k(u_1,..,u_n) = a_k —
// i.e. the inverse of the substitution.  Nielsen reduction with recorded
// moves; the result is certified by forward substitution before returning.
// Throws NotABasis otherwise.  A surjective endomorphism of a free group is
// injective, so success here is exactly "the substitution is an automorphism".
Substitution invert_basis_map(const Substitution& images, int rank);

// Fibonacci with F_1 = 0, F_2 = 1 — the indexing under which the classical
// identity |psi^m(a)| = F_{m+3} holds for psi: a -> ab, b -> a.
Integer fib0(int k);

}  // namespace osl
