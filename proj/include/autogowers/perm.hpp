#pragma once

#include <cstdint>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace autogowers {

/// Permutation of {0,..,m-1}, stored as the image array: p[i] = image of i.
/// Product is function composition, (p*q)(i) = p(q(i)).
struct Perm {
  std::vector<int> img;

  Perm() = default;
  explicit Perm(int degree) : img(degree) { std::iota(img.begin(), img.end(), 0); }
  explicit Perm(std::vector<int> images) : img(std::move(images)) {
    std::vector<char> hit(img.size(), 0);
    for (int v : img) {
      if (v < 0 || v >= static_cast<int>(img.size()) || hit[v])
        throw std::invalid_argument("not a permutation");
      hit[v] = 1;
    }
  }

  int degree() const { return static_cast<int>(img.size()); }
  int operator()(int i) const { return img[i]; }
  bool is_identity() const {
    for (int i = 0; i < degree(); ++i)
      if (img[i] != i) return false;
    return true;
  }

  friend Perm operator*(const Perm& p, const Perm& q) {
    Perm r;
    r.img.resize(p.img.size());
    for (size_t i = 0; i < p.img.size(); ++i) r.img[i] = p.img[q.img[i]];
    return r;
  }

  Perm inverse() const {
    Perm r;
    r.img.resize(img.size());
    for (size_t i = 0; i < img.size(); ++i) r.img[img[i]] = static_cast<int>(i);
    return r;
  }

  /// Left action on tuples: (p . t)_i = t_{p^{-1}(i)}.
  template <typename T>
  std::vector<T> act(const std::vector<T>& t) const {
    std::vector<T> r(t.size());
    for (size_t i = 0; i < t.size(); ++i) r[img[i]] = t[i];
    return r;
  }

  friend bool operator==(const Perm& a, const Perm& b) { return a.img == b.img; }
  friend bool operator<(const Perm& a, const Perm& b) { return a.img < b.img; }

  /// Cycle notation, 1-based display: "(1 2)(3 4 5)", identity prints "()".
  std::string cycles() const {
    std::string out;
    std::vector<char> done(img.size(), 0);
    for (int i = 0; i < degree(); ++i) {
      if (done[i] || img[i] == i) {
        done[i] = 1;
        continue;
      }
      out += '(';
      int j = i;
      bool first = true;
      while (!done[j]) {
        done[j] = 1;
        if (!first) out += ' ';
        out += std::to_string(j + 1);
        first = false;
        j = img[j];
      }
      out += ')';
    }
    return out.empty() ? "()" : out;
  }

  static Perm from_cycles(const std::string& text, int degree) {
    Perm p(degree);
    size_t i = 0;
    auto skip_ws = [&] {
      while (i < text.size() && std::isspace(static_cast<unsigned char>(text[i]))) ++i;
    };
    skip_ws();
    while (i < text.size()) {
      if (text[i] != '(') throw std::invalid_argument("expected '(' in cycle notation");
      ++i;
      std::vector<int> cyc;
      while (true) {
        skip_ws();
        if (i < text.size() && text[i] == ')') {
          ++i;
          break;
        }
        size_t j = i;
        while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
        if (j == i) throw std::invalid_argument("bad cycle notation: " + text);
        int v = std::stoi(text.substr(i, j - i)) - 1;
        if (v < 0 || v >= degree) throw std::invalid_argument("cycle entry out of range");
        cyc.push_back(v);
        i = j;
      }
      for (size_t t = 0; t < cyc.size(); ++t) {
        int from = cyc[t], to = cyc[(t + 1) % cyc.size()];
        if (p.img[from] != from && p.img[from] != to)
          throw std::invalid_argument("overlapping cycles");
        p.img[from] = to;
      }
      skip_ws();
    }
    // re-validate
    return Perm(p.img);
  }
};

struct PermHash {
  size_t operator()(const Perm& p) const {
    size_t h = 1469598103934665603ull;
    for (int v : p.img) h = (h ^ static_cast<size_t>(v)) * 1099511628211ull;
    return h;
  }
};

}  // namespace autogowers
