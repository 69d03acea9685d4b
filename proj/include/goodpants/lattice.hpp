#pragma once

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "moebius.hpp"
#include "words.hpp"

namespace gp {

struct GroupPresentation {
  std::vector<GroupElement> generators;
  std::vector<Word> relators;
  std::string label;

  void validate() const {
    if (generators.empty()) throw Error(ErrorCode::InvalidArgument, "no generators");
    for (const auto& g : generators)
      if (std::abs(g.det() - 1.0) > kTol)
        throw Error(ErrorCode::BadDeterminant, "generator determinant differs from 1");
  }

  GroupElement letter(int x) const {
    const GroupElement& g = generators.at(static_cast<size_t>(std::abs(x) - 1));
    GroupElement e = x > 0 ? g : g.inverse();
    e.word = {x};
    return e;
  }

  GroupElement evaluate(const Word& w) const {
    GroupElement r;
    for (int x : w) r = r * letter(x);
    r.word = free_reduce(w);
    return r;
  }

  GroupPresentation conjugated(const GroupElement& h) const {
    GroupPresentation p = *this;
    GroupElement hi = h.inverse();
    for (auto& g : p.generators) {
      GroupElement c = h * g * hi;
      g = GroupElement(c.a, c.b, c.c, c.d);
    }
    return p;
  }
};

inline GroupPresentation parse_group(std::istream& in) {
  GroupPresentation G;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    std::istringstream ss(line);
    std::string first;
    if (!(ss >> first)) continue;
    if (first == "label") {
      std::getline(ss >> std::ws, G.label);
      continue;
    }
    if (first == "relator") {
      std::string w;
      ss >> w;
      G.relators.push_back(word_from_string(w));
      continue;
    }
    double v[8];
    try {
      v[0] = std::stod(first);
    } catch (...) {
      throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno));
    }
    for (int i = 1; i < 8; ++i)
      if (!(ss >> v[i])) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": expected 8 floats");
    std::string extra;
    if (ss >> extra) throw Error(ErrorCode::ParseError, "line " + std::to_string(lineno) + ": trailing data");
    GroupElement g({v[0], v[1]}, {v[2], v[3]}, {v[4], v[5]}, {v[6], v[7]});
    if (std::abs(g.det() - 1.0) > kTol)
      throw Error(ErrorCode::BadDeterminant, "line " + std::to_string(lineno));
    G.generators.push_back(g);
  }
  if (G.generators.empty()) throw Error(ErrorCode::ParseError, "no generators");
  return G;
}

inline GroupPresentation load_group(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::ParseError, "cannot open " + path);
  return parse_group(f);
}

struct Window {
  double R = 0;
  double eps = 0;
  /// |l - 2R| < 2 eps as complex modulus
  bool contains(Complex l) const { return std::abs(l - Complex(2 * R)) < 2 * eps; }
};

struct ConjugacyClass {
  Word canonical_word;
  GroupElement representative;
  Complex length;
};

struct TraceCollision {
  Word first, second;
};

struct EnumerationResult {
  std::vector<ConjugacyClass> classes;
  std::vector<TraceCollision> collisions;  // equal lengths, no conjugator found
  bool empty_window() const { return classes.empty(); }
};

namespace detail {

// Walks all reduced words of length <= L starting with `first`, calling f(word, element).
template <class F>
void walk_words(const GroupPresentation& G, int first, int L, F&& f) {
  struct Node {
    Word w;
    GroupElement g;
  };
  int k = static_cast<int>(G.generators.size());
  std::vector<Node> stack{{Word{first}, G.letter(first)}};
  while (!stack.empty()) {
    Node cur = std::move(stack.back());
    stack.pop_back();
    f(cur.w, cur.g);
    if (static_cast<int>(cur.w.size()) >= L) continue;
    for (int x = k; x >= -k; --x) {
      if (x == 0 || x == -cur.w.back()) continue;
      Node nx{cur.w, {}};
      nx.w.push_back(x);
      nx.g = cur.g * G.letter(x);
      nx.g.word = nx.w;
      stack.push_back(std::move(nx));
    }
  }
}

inline std::vector<int> all_letters(const GroupPresentation& G) {
  std::vector<int> r;
  for (int i = 1; i <= static_cast<int>(G.generators.size()); ++i) {
    r.push_back(i);
    r.push_back(-i);
  }
  return r;
}

}  // namespace detail

/// All group elements of reduced word length in [1, L], shortlex order.
inline std::vector<GroupElement> enumerate_elements(const GroupPresentation& G, int L) {
  std::vector<GroupElement> out;
  for (int x : detail::all_letters(G))
    detail::walk_words(G, x, L, [&](const Word&, const GroupElement& g) { out.push_back(g); });
  std::sort(out.begin(), out.end(),
            [](const GroupElement& a, const GroupElement& b) { return shortlex_less(a.word, b.word); });
  return out;
}

inline bool class_order(const ConjugacyClass& a, const ConjugacyClass& b) {
  return shortlex_less(a.canonical_word, b.canonical_word);
}

inline EnumerationResult enumerate_conjugacy_classes(const GroupPresentation& G, int max_word_len,
                                                     const Window& window, int threads = 1) {
  G.validate();
  if (max_word_len < 1) throw Error(ErrorCode::InvalidArgument, "max_word_len must be >= 1");
  if (!(window.eps > 0 && window.eps < window.R))
    throw Error(ErrorCode::InvalidArgument, "need 0 < eps < R");

  std::vector<int> letters = detail::all_letters(G);
  std::vector<std::vector<ConjugacyClass>> local(letters.size());
  auto scan = [&](size_t i) {
    detail::walk_words(G, letters[i], max_word_len, [&](const Word& w, const GroupElement& g) {
      // one representative per cyclic class: cyclically reduced, lex-least rotation, primitive
      if (w.size() >= 2 && w.front() == -w.back()) return;
      if (least_rotation_index(w) != 0) return;
      if (!is_primitive(w)) return;
      Complex l;
      try {
        l = complex_translation_length(g);
      } catch (const Error&) {
        return;
      }
      if (!window.contains(l)) return;
      local[i].push_back({w, g, l});
    });
  };
  int nt = std::max(1, std::min<int>(threads, static_cast<int>(letters.size())));
  if (nt == 1) {
    for (size_t i = 0; i < letters.size(); ++i) scan(i);
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        for (size_t i = t; i < letters.size(); i += nt) scan(i);
      });
    for (auto& th : pool) th.join();
  }

  std::vector<ConjugacyClass> all;
  for (auto& v : local) all.insert(all.end(), v.begin(), v.end());
  std::sort(all.begin(), all.end(), class_order);

  // relator-level duplicates: equal length and an explicit conjugator among short elements
  EnumerationResult res;
  std::vector<GroupElement> conj = enumerate_elements(G, std::min(max_word_len, 3));
  conj.insert(conj.begin(), GroupElement::identity());
  std::vector<bool> dropped(all.size(), false);
  std::vector<size_t> by_len(all.size());
  for (size_t i = 0; i < all.size(); ++i) by_len[i] = i;
  std::sort(by_len.begin(), by_len.end(), [&](size_t x, size_t y) {
    if (all[x].length.real() != all[y].length.real()) return all[x].length.real() < all[y].length.real();
    return x < y;
  });
  for (size_t a = 0; a < by_len.size(); ++a) {
    for (size_t b = a + 1; b < by_len.size(); ++b) {
      size_t i = std::min(by_len[a], by_len[b]), j = std::max(by_len[a], by_len[b]);
      if (all[by_len[b]].length.real() - all[by_len[a]].length.real() > 1e-6) break;
      if (dropped[i] || dropped[j]) continue;
      if (std::abs(all[i].length - all[j].length) > 1e-6) continue;
      // a class and its inverse always share the trace
      if (canonical_form(inverse_word(all[i].canonical_word)) == all[j].canonical_word) continue;
      bool found = false;
      for (const auto& u : conj) {
        if ((u * all[i].representative * u.inverse()).approx_equal(all[j].representative, 1e-8)) {
          found = true;
          break;
        }
      }
      if (found)
        dropped[j] = true;
      else
        res.collisions.push_back({all[i].canonical_word, all[j].canonical_word});
    }
  }
  for (size_t i = 0; i < all.size(); ++i)
    if (!dropped[i]) res.classes.push_back(std::move(all[i]));
  return res;
}

}  // namespace gp
