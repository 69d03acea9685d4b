#pragma once

#include <algorithm>
#include <cctype>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "moebius.hpp"

namespace gp {

// Letter order a < A < b < B < ...
inline int letter_rank(int x) { return 2 * (std::abs(x) - 1) + (x < 0 ? 1 : 0); }

inline bool lex_less(const Word& u, const Word& v) {
  return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end(),
                                      [](int x, int y) { return letter_rank(x) < letter_rank(y); });
}

inline bool shortlex_less(const Word& u, const Word& v) {
  if (u.size() != v.size()) return u.size() < v.size();
  return lex_less(u, v);
}

inline std::string word_to_string(const Word& w) {
  if (w.empty()) return "1";
  std::string s;
  for (int x : w) {
    char c = static_cast<char>('a' + (std::abs(x) - 1));
    s.push_back(x > 0 ? c : static_cast<char>(std::toupper(c)));
  }
  return s;
}

inline Word word_from_string(const std::string& s) {
  Word w;
  if (s == "1") return w;
  for (char c : s) {
    if (c >= 'a' && c <= 'z')
      w.push_back(c - 'a' + 1);
    else if (c >= 'A' && c <= 'Z')
      w.push_back(-(c - 'A' + 1));
    else
      throw Error(ErrorCode::ParseError, std::string("bad letter in word: ") + s);
  }
  return w;
}

struct CyclicSplit {
  Word prefix;  // w = prefix * core * prefix^-1
  Word core;
};

inline CyclicSplit cyclic_split(const Word& w0) {
  Word w = free_reduce(w0);
  size_t i = 0, j = w.size();
  while (j - i >= 2 && w[i] == -w[j - 1]) {
    ++i;
    --j;
  }
  return {Word(w.begin(), w.begin() + i), Word(w.begin() + i, w.begin() + j)};
}

inline Word cyclic_reduce(const Word& w) { return cyclic_split(w).core; }

inline Word rotate_word(const Word& w, size_t k) {
  Word r(w.begin() + k, w.end());
  r.insert(r.end(), w.begin(), w.begin() + k);
  return r;
}

/// Index of the lex-least rotation of a cyclically reduced word.
inline size_t least_rotation_index(const Word& w) {
  size_t best = 0;
  for (size_t k = 1; k < w.size(); ++k)
    if (lex_less(rotate_word(w, k), rotate_word(w, best))) best = k;
  return best;
}

/// Lex-least cyclic rotation of the cyclically reduced word; orientation is kept.
inline Word canonical_form(const Word& w) {
  Word c = cyclic_reduce(w);
  if (c.empty()) return c;
  return rotate_word(c, least_rotation_index(c));
}

/// Same class for w and w^-1.
inline Word unoriented_key(const Word& w) {
  Word a = canonical_form(w), b = canonical_form(inverse_word(w));
  return lex_less(b, a) ? b : a;
}

/// Conjugator u with w = u * canonical_form(w) * u^-1 (reduced).
inline Word canonical_conjugator(const Word& w) {
  CyclicSplit s = cyclic_split(w);
  if (s.core.empty()) return {};
  size_t k = least_rotation_index(s.core);
  Word p(s.core.begin(), s.core.begin() + k);
  return free_reduce(concat(s.prefix, p));
}

/// Smallest period of a cyclic word.
inline size_t cyclic_period(const Word& c) {
  size_t n = c.size();
  for (size_t p = 1; p < n; ++p)
    if (n % p == 0 && rotate_word(c, p) == c) return p;
  return n;
}

inline bool is_primitive(const Word& w) {
  Word c = cyclic_reduce(w);
  return !c.empty() && cyclic_period(c) == c.size();
}

inline Word word_power(const Word& w, int n) {
  Word base = n >= 0 ? w : inverse_word(w);
  Word r;
  for (int i = 0; i < std::abs(n); ++i) r = concat(r, base);
  return free_reduce(r);
}

inline Word conjugate_word(const Word& g, const Word& x) {
  return free_reduce(concat(concat(g, x), inverse_word(g)));
}

using WordPair = std::pair<Word, Word>;

inline bool pair_less(const WordPair& p, const WordPair& q) {
  if (p.first != q.first) return shortlex_less(p.first, q.first);
  return shortlex_less(p.second, q.second);
}

/// Canonical representative of (x, y) under simultaneous conjugation (free group).
inline WordPair pair_canonical(const Word& x_in, const Word& y_in) {
  Word x = free_reduce(x_in), y = free_reduce(y_in);
  CyclicSplit s = cyclic_split(x);
  if (s.core.empty()) {
    // x trivial: only y matters
    CyclicSplit t = cyclic_split(y);
    return {Word{}, canonical_form(t.core)};
  }
  Word pinv = inverse_word(s.prefix);
  Word y0 = conjugate_word(pinv, y);
  const Word& x0 = s.core;
  size_t per = cyclic_period(x0);
  Word root(x0.begin(), x0.begin() + per);
  int nmax = 2 * static_cast<int>(y.size()) + 2;
  WordPair best;
  bool have = false;
  for (size_t k = 0; k < x0.size(); ++k) {
    Word xk = rotate_word(x0, k);
    if (have && lex_less(best.first, xk)) continue;
    Word pk(x0.begin(), x0.begin() + k);
    Word yk = conjugate_word(inverse_word(pk), y0);
    Word rk = rotate_word(root, k % per);
    for (int n = -nmax; n <= nmax; ++n) {
      Word yn = conjugate_word(word_power(rk, n), yk);
      WordPair cand{xk, yn};
      if (!have || pair_less(cand, best)) {
        best = cand;
        have = true;
      }
    }
  }
  return best;
}

/// Third cuff of the pants with cuffs x, y.
inline Word third_cuff(const Word& x, const Word& y) {
  return inverse_word(free_reduce(concat(y, x)));
}

/// Canonical key of the pants with cuffs x, y, (yx)^-1, invariant under the
/// orientation-preserving permutations of cuffs and simultaneous conjugation.
inline WordPair pants_key(const Word& x, const Word& y) {
  std::vector<WordPair> todo{{free_reduce(x), free_reduce(y)}};
  std::set<std::pair<std::string, std::string>> seen;
  WordPair best;
  bool have = false;
  while (!todo.empty()) {
    WordPair cur = todo.back();
    todo.pop_back();
    WordPair c = pair_canonical(cur.first, cur.second);
    auto tag = std::make_pair(word_to_string(c.first), word_to_string(c.second));
    if (!seen.insert(tag).second) continue;
    if (!have || pair_less(c, best)) {
      best = c;
      have = true;
    }
    todo.push_back({c.second, third_cuff(c.first, c.second)});
    todo.push_back({c.second, conjugate_word(c.second, c.first)});
  }
  return best;
}

}  // namespace gp
