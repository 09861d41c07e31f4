#include "sketchlab/families.hpp"
#include "sketchlab/linalg.hpp"

#include <functional>
#include <map>

namespace sketchlab::mult {

using nlohmann::json;

namespace {

Descriptor node(const std::string& fam, json params, std::vector<Descriptor> kids = {}) {
  Descriptor d;
  d.family = fam;
  d.params = std::move(params);
  d.children = std::move(kids);
  return d;
}

Descriptor leftmost_of(Descriptor d, Index l) { return node("restrict_columns", {{"leftmost", l}}, {std::move(d)}); }

// Column-permuted (B = H P) abridged transforms, the convention of the table runs.
Descriptor col_perm(const std::string& fam, Index n) { return node(fam, {{"n", n}, {"d", 3}, {"side", "right"}}); }

// Set I: 3-APF with a random column permutation.
Descriptor lowrk_set1(Index n) { return col_perm("apf", n); }

// Set II: real circulant with ten random +-1 entries in its first column.
Descriptor lowrk_set2(Index n) { return node("sparse_f_circulant", {{"n", n}, {"q", 10}, {"f", 1.0}, {"values", "sign"}}); }

// Set III: D (101 I + S_1 Z)^{-1} + D (101 I + S_2 Z)^{-1}, D = diag(+-2^{b}), b in 0..3, one D for both terms.
Descriptor lowrk_set3(Index n) {
  auto ibd101 = [n]() { return node("inverse_bidiagonal", {{"n", n}, {"main", 101.0}, {"offset", 1}, {"off", "sign"}}); };
  return node("product", json::object(),
              {node("scaling_diagonal", {{"n", n}, {"values", {1.0, 2.0, 4.0, 8.0}}, {"random_sign", true}}),
               node("sum", json::object(), {ibd101(), ibd101()})});
}

Descriptor lowrk_class(int c, Index n) {
  switch (c) {
    case 1: return lowrk_set1(n);
    case 2: return lowrk_set2(n);
    case 3: return lowrk_set3(n);
    case 4: return node("product", json::object(), {lowrk_set1(n), lowrk_set1(n)});
    case 5: return node("product", json::object(), {lowrk_set2(n), lowrk_set2(n)});
    case 6: return node("product", json::object(), {lowrk_set3(n), lowrk_set3(n)});
    case 7: return node("sum", json::object(), {lowrk_set1(n), lowrk_set3(n)});
    case 8: return node("sum", json::object(), {lowrk_set2(n), lowrk_set3(n)});
    default: throw InvalidArgument("recipe: eight-class index must lie in 1..8");
  }
}

// 3-ASPH with diagonal values drawn from {1/4, 1/2, 1, 2, 4}.
Descriptor asph_wide(Index n) {
  return node("asph", {{"n", n}, {"d", 3}, {"side", "right"}, {"scaling", {0.25, 0.5, 1.0, 2.0, 4.0}}});
}

struct Ibd {
  int main;
  int k;     // diagonal offset
  int value;
  bool upper;
};

Descriptor ibd(Index n, const Ibd& b, bool permuted) {
  Descriptor inv = node("inverse_bidiagonal", {{"n", n},
                                               {"main", static_cast<double>(b.main)},
                                               {"offset", b.k},
                                               {"off", static_cast<double>(b.value)},
                                               {"orientation", b.upper ? "upper" : "lower"}});
  if (!permuted) return inv;
  return node("product", json::object(), {std::move(inv), node("permutation", {{"n", n}})});
}

constexpr Ibd SB(int main, int k, int v) { return {main, k, v, false}; }
constexpr Ibd SP(int main, int k, int v) { return {main, k, v, true}; }

Descriptor superfast_class(int c, Index n) {
  if (c == 0) return node("gaussian", {{"n", n}, {"l", n}});
  const char* base = nullptr;
  std::vector<Ibd> ibds;
  int perms = 0;
  switch (c) {
    case 1: base = "asph"; ibds = {SB(-1, 2, -1), SP(1, 1, 1)}; break;
    case 2: base = "asph"; ibds = {SB(1, 2, -1), SP(1, 1, -1)}; break;
    case 3: base = "asph"; ibds = {SB(1, 1, -1), SP(1, 1, -1)}; break;
    case 4:
    case 5: base = "asph"; ibds = {SB(1, 1, 1), SP(1, 1, -1)}; break;
    case 6: base = "asph"; ibds = {SB(-1, 2, -1), SP(1, 1, 1), SB(1, 9, 1)}; break;
    case 7: base = "asph"; ibds = {SB(1, 2, -1), SP(1, 1, -1), SP(1, 8, 1)}; break;
    case 8: base = "asph"; ibds = {SB(1, 1, -1), SP(1, 1, -1), SB(1, 4, 1)}; break;
    case 9: base = "asph"; ibds = {SB(1, 1, 1), SP(1, 1, -1), SP(-1, 3, 1)}; break;
    case 10: ibds = {SB(1, 1, 1), SP(1, 1, -1), SP(-1, 3, 1)}; break;
    case 11: base = "aph"; ibds = {SB(1, 2, -1), SP(1, 1, -1), SP(1, 8, 1)}; break;
    case 12: base = "aph"; ibds = {SB(1, 1, -1), SP(1, 1, -1)}; break;
    case 13: base = "asph"; perms = 1; break;
    case 14: base = "asph"; perms = 2; break;
    case 15: base = "asph"; perms = 3; break;
    case 16: base = "aph"; perms = 3; break;
    case 17: base = "aph"; perms = 2; break;
    default: throw InvalidArgument("recipe: seventeen-class index must lie in 0..17");
  }
  std::vector<Descriptor> terms;
  if (base) terms.push_back(std::string(base) == "asph" ? asph_wide(n) : col_perm("aph", n));
  for (const Ibd& b : ibds) terms.push_back(ibd(n, b, c != 5));
  for (int i = 0; i < perms; ++i) terms.push_back(node("permutation", {{"n", n}}));
  return node("sum", json::object(), std::move(terms));
}

using Recipe = std::function<Descriptor(Index n, Index l)>;

const std::map<std::string, Recipe>& recipes() {
  static const std::map<std::string, Recipe> r = [] {
    std::map<std::string, Recipe> m;
    m["gaussian"] = [](Index n, Index l) { return node("gaussian", {{"n", n}, {"l", l}}); };
    m["ternary"] = [](Index n, Index l) { return node("ternary", {{"n", n}, {"l", l}}); };
    m["3-ah"] = [](Index n, Index l) { return leftmost_of(node("ah", {{"n", n}, {"d", 3}}), l); };
    m["3-asph"] = [](Index n, Index l) { return leftmost_of(node("asph", {{"n", n}, {"d", 3}}), l); };
    m["3-aspf"] = [](Index n, Index l) { return leftmost_of(node("aspf", {{"n", n}, {"d", 3}}), l); };
    m["3-aph"] = [](Index n, Index l) { return leftmost_of(col_perm("aph", n), l); };
    m["3-apf"] = [](Index n, Index l) { return leftmost_of(col_perm("apf", n), l); };
    m["gaussian-toeplitz"] = [](Index n, Index l) { return leftmost_of(node("gaussian_toeplitz", {{"n", n}}), l); };
    m["gaussian-circulant"] = [](Index n, Index l) {
      return leftmost_of(node("circulant", {{"n", n}, {"values", "gaussian"}}), l);
    };
    m["sign-circulant"] = [](Index n, Index l) {
      return leftmost_of(node("circulant", {{"n", n}, {"values", "sign"}}), l);
    };
    for (int c = 1; c <= 8; ++c)
      m["lowrk-" + std::to_string(c)] = [c](Index n, Index l) { return leftmost_of(lowrk_class(c, n), l); };
    for (int c = 0; c <= 17; ++c)
      m["class-" + std::to_string(c)] = [c](Index n, Index l) {
        if (c == 0) return node("gaussian", {{"n", n}, {"l", l}});
        return leftmost_of(superfast_class(c, n), l);
      };
    return m;
  }();
  return r;
}

}  // namespace

Descriptor recipe(const std::string& name, Index n, Index l) {
  const auto it = recipes().find(name);
  if (it == recipes().end()) throw InvalidArgument("unknown multiplier recipe '" + name + "'");
  if (n < 1 || l < 1 || l > n) throw InvalidArgument("recipe: need 1 <= l <= n");
  return it->second(n, l);
}

std::vector<std::string> recipe_names() {
  std::vector<std::string> out;
  for (const auto& [k, v] : recipes()) out.push_back(k);
  return out;
}

}  // namespace sketchlab::mult
