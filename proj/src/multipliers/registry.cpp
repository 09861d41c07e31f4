#include "ops.hpp"
#include "sketchlab/families.hpp"

#include <functional>
#include <map>

namespace sketchlab::mult {

using nlohmann::json;
using detail::Stage;

namespace {

struct Built {
  OperatorPtr op;
  std::uint64_t rv = 0;
};

Index get_index(const json& p, const char* key) {
  if (!p.contains(key) || !p[key].is_number_integer())
    throw InvalidArgument(std::string("descriptor: missing integer parameter '") + key + "'");
  const auto v = p[key].get<long long>();
  if (v < 0) throw InvalidArgument(std::string("descriptor: negative parameter '") + key + "'");
  return static_cast<Index>(v);
}

Index get_index_or(const json& p, const char* key, Index dflt) {
  return p.contains(key) ? get_index(p, key) : dflt;
}

std::string get_str_or(const json& p, const char* key, const std::string& dflt) {
  if (!p.contains(key)) return dflt;
  if (!p[key].is_string()) throw InvalidArgument(std::string("descriptor: '") + key + "' must be a string");
  return p[key].get<std::string>();
}

cd to_cd(const json& v) {
  if (v.is_number()) return {v.get<double>(), 0.0};
  if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
    return {v[0].get<double>(), v[1].get<double>()};
  throw InvalidArgument("descriptor: expected a number or [re, im]");
}

json from_cd(cd c) {
  if (c.imag() == 0.0) return c.real();
  return json::array({c.real(), c.imag()});
}

cd get_cd_or(const json& p, const char* key, cd dflt) { return p.contains(key) ? to_cd(p[key]) : dflt; }

std::vector<cd> cd_list(const json& v) {
  if (!v.is_array()) throw InvalidArgument("descriptor: expected a list of scalars");
  std::vector<cd> out;
  out.reserve(v.size());
  for (const auto& e : v) out.push_back(to_cd(e));
  return out;
}

std::vector<std::size_t> index_list(const json& v) {
  if (!v.is_array()) throw InvalidArgument("descriptor: expected a list of indices");
  std::vector<std::size_t> out;
  out.reserve(v.size());
  for (const auto& e : v) {
    if (!e.is_number_integer() || e.get<long long>() < 0)
      throw InvalidArgument("descriptor: indices must be non-negative integers");
    out.push_back(e.get<std::size_t>());
  }
  return out;
}

void check_bijection(const std::vector<std::size_t>& p) {
  std::vector<char> seen(p.size(), 0);
  for (std::size_t v : p) {
    if (v >= p.size() || seen[v]) throw InvalidArgument("permutation: not a bijection");
    seen[v] = 1;
  }
}

int check_depth(Index n, const json& p) {
  const Index d = get_index(p, "d");
  if (d < 1 || d > 62) throw InvalidArgument("abridged: depth d must be >= 1");
  const Index q = Index{1} << d;
  if (n < 1 || n % q != 0) throw InvalidArgument("abridged: 2^d must divide n");
  return static_cast<int>(d);
}

std::vector<Stage> hadamard_stages(Index n, int d) {
  std::vector<Stage> st;
  for (int k = 0; k < d; ++k) st.push_back(detail::butterfly_stage(n >> k));
  return st;
}

std::vector<Stage> fourier_stages(Index n, int d, bool conjugate) {
  std::vector<Stage> st;
  for (int k = 0; k < d; ++k) {
    st.push_back(detail::butterfly_stage(n >> k));
    st.push_back(detail::twiddle_stage(n >> k, conjugate));
  }
  for (int k = d - 1; k >= 0; --k) st.push_back(detail::interleave_stage(n >> k));
  return st;
}

std::vector<cd> draw_unit(Index n, Rng& rng, bool complex_values) {
  std::vector<cd> v(static_cast<std::size_t>(n));
  for (auto& e : v) e = complex_values ? rng.unit_complex() : cd(rng.sign());
  return v;
}

std::vector<cd> draw_from_set(Index n, Rng& rng, const std::vector<cd>& set, bool random_sign) {
  std::vector<cd> v(static_cast<std::size_t>(n));
  for (auto& e : v) {
    e = set[static_cast<std::size_t>(rng.below(set.size()))];
    if (random_sign) e *= rng.sign();
  }
  return v;
}

/// Diagonal entries for scaled families: params "scaling" absent/"unit"
/// draws unit-modulus values, a list draws uniformly from that set.
std::vector<cd> scaling_entries(const json& p, Index n, Rng& rng, bool complex_default) {
  const bool complex_values = get_str_or(p, "diag_field", complex_default ? "complex" : "real") == "complex";
  if (!p.contains("scaling") || (p["scaling"].is_string() && p["scaling"] == "unit"))
    return draw_unit(n, rng, complex_values);
  return draw_from_set(n, rng, cd_list(p["scaling"]), p.value("random_sign", false));
}

Built build_node(const Descriptor& d);

std::vector<Built> build_children(const Descriptor& d) {
  std::vector<Built> out;
  for (const auto& c : d.children) out.push_back(build_node(c));
  return out;
}

std::uint64_t sum_rv(const std::vector<Built>& v) {
  std::uint64_t s = 0;
  for (const auto& b : v) s += b.rv;
  return s;
}

const Built& only_child(const std::vector<Built>& kids, const char* fam) {
  if (kids.size() != 1) throw InvalidArgument(std::string(fam) + ": expects exactly one child");
  return kids.front();
}

std::vector<std::size_t> select_indices(const json& p, Index total, Rng& rng, const char* list_key) {
  if (p.contains(list_key)) {
    auto idx = index_list(p[list_key]);
    std::vector<char> seen(static_cast<std::size_t>(total), 0);
    for (std::size_t i : idx) {
      if (static_cast<Index>(i) >= total || seen[i]) throw InvalidArgument("restriction: indices must be distinct and in range");
      seen[i] = 1;
    }
    return idx;
  }
  if (p.contains("leftmost") || p.contains("topmost")) {
    const Index l = get_index(p, p.contains("leftmost") ? "leftmost" : "topmost");
    if (l < 1 || l > total) throw InvalidArgument("restriction: width out of range");
    std::vector<std::size_t> idx(static_cast<std::size_t>(l));
    for (Index i = 0; i < l; ++i) idx[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
    return idx;
  }
  if (p.contains("random")) {
    const Index l = get_index(p, "random");
    if (l < 1 || l > total) throw InvalidArgument("restriction: width out of range");
    return rng.sample_without_replacement(static_cast<std::size_t>(total), static_cast<std::size_t>(l));
  }
  throw InvalidArgument("restriction: give an index list, 'leftmost', 'topmost' or 'random'");
}

using Builder = std::function<Built(const Descriptor&, Rng&)>;

Built make(OperatorPtr op, const Rng& rng, std::uint64_t child_rv = 0) { return {std::move(op), rng.draws() + child_rv}; }

const std::map<std::string, Builder>& registry() {
  static const std::map<std::string, Builder> reg = [] {
    std::map<std::string, Builder> r;

    r["identity"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      std::vector<std::size_t> p(static_cast<std::size_t>(n));
      for (std::size_t i = 0; i < p.size(); ++i) p[i] = i;
      return make(std::make_shared<detail::PermOp>(p), rng);
    };

    r["permutation"] = [](const Descriptor& d, Rng& rng) {
      std::vector<std::size_t> p;
      if (d.params.contains("perm")) {
        p = index_list(d.params["perm"]);
        check_bijection(p);
        if (d.params.contains("n") && get_index(d.params, "n") != static_cast<Index>(p.size()))
          throw InvalidArgument("permutation: n does not match the explicit permutation");
      } else {
        p = rng.permutation(static_cast<std::size_t>(get_index(d.params, "n")));
      }
      if (p.empty()) throw InvalidArgument("permutation: n must be >= 1");
      return make(std::make_shared<detail::PermOp>(p), rng);
    };

    r["unit_diagonal"] = [](const Descriptor& d, Rng& rng) {
      std::vector<cd> e;
      if (d.params.contains("entries")) {
        e = cd_list(d.params["entries"]);
        for (cd c : e)
          if (std::abs(std::abs(c) - 1.0) > 1e-12) throw InvalidArgument("unit_diagonal: |d_i| must be 1");
      } else {
        const Index n = get_index(d.params, "n");
        e = draw_unit(n, rng, get_str_or(d.params, "field", "real") == "complex");
      }
      if (e.empty()) throw InvalidArgument("unit_diagonal: n must be >= 1");
      return make(std::make_shared<detail::DiagOp>(e), rng);
    };

    r["scaling_diagonal"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      std::vector<cd> e;
      if (d.params.contains("entries"))
        e = cd_list(d.params["entries"]);
      else
        e = draw_from_set(n, rng, cd_list(d.params.at("values")), d.params.value("random_sign", false));
      if (static_cast<Index>(e.size()) != n) throw InvalidArgument("scaling_diagonal: entry count != n");
      return make(std::make_shared<detail::DiagOp>(e), rng);
    };

    r["shift"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const cd f = get_cd_or(d.params, "f", 0.0);
      if (f != cd(0.0) && std::abs(std::abs(f) - 1.0) > 1e-12)
        throw InvalidArgument("shift: f must be 0 or have modulus 1");
      if (n < 1) throw InvalidArgument("shift: n must be >= 1");
      return make(std::make_shared<detail::ShiftOp>(n, f), rng);
    };

    r["hadamard_primitive"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      if (n < 2 || n % 2 != 0) throw InvalidArgument("hadamard_primitive: order must be even");
      return make(std::make_shared<detail::StageOp>(n, std::vector<Stage>{detail::butterfly_stage(n)}), rng);
    };

    r["ah"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const int depth = check_depth(n, d.params);
      return make(std::make_shared<detail::StageOp>(n, hadamard_stages(n, depth)), rng);
    };

    r["af"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const int depth = check_depth(n, d.params);
      return make(std::make_shared<detail::StageOp>(n, fourier_stages(n, depth, false)), rng);
    };

    for (const std::string fam : {"ash", "aph", "asph", "asf", "apf", "aspf"}) {
      r[fam] = [fam](const Descriptor& d, Rng& rng) {
        const Index n = get_index(d.params, "n");
        const int depth = check_depth(n, d.params);
        const bool fourier = fam.back() == 'f';
        const bool scaled = fam.find('s') != std::string::npos;
        const bool permuted = fam.find('p') != std::string::npos;
        const std::string side = get_str_or(d.params, "side", "left");
        if (side != "left" && side != "right") throw InvalidArgument("abridged variant: side must be left or right");
        std::vector<Stage> base = fourier ? fourier_stages(n, depth, false) : hadamard_stages(n, depth);
        std::vector<Stage> extra;
        // Draw order: permutation first, then scaling.
        std::vector<std::size_t> perm;
        std::vector<cd> diag;
        if (permuted) perm = rng.permutation(static_cast<std::size_t>(n));
        if (scaled) diag = scaling_entries(d.params, n, rng, fourier);
        std::vector<Stage> st;
        if (side == "left") {
          st = base;
          if (scaled) st.push_back(detail::block_diag_stage(diag));
          if (permuted) st.push_back(detail::block_perm_stage(perm));
        } else {
          if (permuted) st.push_back(detail::block_perm_stage(perm));
          if (scaled) st.push_back(detail::block_diag_stage(diag));
          st.insert(st.end(), base.begin(), base.end());
        }
        return make(std::make_shared<detail::StageOp>(n, st), rng);
      };
    }

    for (const char kind : {'h', 'f'}) {
      r[std::string("rand_abridged_") + kind] = [kind](const Descriptor& d, Rng& rng) {
        const Index n = get_index(d.params, "n");
        const int depth = check_depth(n, d.params);
        const bool fourier = kind == 'f';
        std::vector<Stage> st;
        for (int k = 0; k < depth; ++k) {
          st.push_back(detail::butterfly_stage(n >> k));
          if (fourier) st.push_back(detail::twiddle_stage(n >> k, false));
        }
        // P_{2q} D_{2q} per level, innermost level acting first.
        std::vector<std::vector<cd>> diags(static_cast<std::size_t>(depth));
        std::vector<std::vector<std::size_t>> perms(static_cast<std::size_t>(depth));
        for (int k = 0; k < depth; ++k) {
          const Index size = n >> k;
          diags[static_cast<std::size_t>(k)] = draw_unit(size, rng, fourier);
          perms[static_cast<std::size_t>(k)] = rng.permutation(static_cast<std::size_t>(size));
        }
        for (int k = depth - 1; k >= 0; --k) {
          st.push_back(detail::block_diag_stage(diags[static_cast<std::size_t>(k)]));
          st.push_back(detail::block_perm_stage(perms[static_cast<std::size_t>(k)]));
        }
        return make(std::make_shared<detail::StageOp>(n, st), rng);
      };
    }

    r["sparse_f_circulant"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      cd f = 1.0;
      std::vector<std::size_t> pos;
      std::vector<cd> val;
      if (d.params.contains("positions")) {
        pos = index_list(d.params["positions"]);
        val = cd_list(d.params.at("values"));
      } else {
        const Index q = get_index(d.params, "q");
        if (q < 1 || q > n) throw InvalidArgument("sparse_f_circulant: need 1 <= q <= n");
        pos = rng.sample_without_replacement(static_cast<std::size_t>(n), static_cast<std::size_t>(q));
        val = draw_unit(q, rng, get_str_or(d.params, "values", "sign") == "unit_complex");
      }
      if (d.params.contains("f") && d.params["f"].is_string()) {
        if (d.params["f"] != "random") throw InvalidArgument("sparse_f_circulant: f must be a scalar or \"random\"");
        f = rng.unit_complex();
      } else {
        f = get_cd_or(d.params, "f", 1.0);
      }
      if (std::abs(std::abs(f) - 1.0) > 1e-12) throw InvalidArgument("sparse_f_circulant: |f| must be 1");
      return make(std::make_shared<detail::CirculantOp>(n, pos, val, f), rng);
    };

    r["circulant"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const std::string values = get_str_or(d.params, "values", "gaussian");
      std::vector<std::size_t> pos(static_cast<std::size_t>(n));
      std::vector<cd> val(static_cast<std::size_t>(n));
      for (Index i = 0; i < n; ++i) {
        pos[static_cast<std::size_t>(i)] = static_cast<std::size_t>(i);
        if (values == "gaussian")
          val[static_cast<std::size_t>(i)] = rng.normal();
        else if (values == "sign")
          val[static_cast<std::size_t>(i)] = rng.sign();
        else
          throw InvalidArgument("circulant: values must be gaussian or sign");
      }
      return make(std::make_shared<detail::CirculantOp>(n, pos, val, get_cd_or(d.params, "f", 1.0)), rng);
    };

    r["uniformly_sparse"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      std::vector<std::vector<std::size_t>> perms;
      std::vector<std::vector<cd>> signs;
      if (d.params.contains("perms")) {
        for (const auto& p : d.params["perms"]) perms.push_back(index_list(p));
        for (const auto& s : d.params.at("signs")) signs.push_back(cd_list(s));
      } else {
        const Index q = get_index(d.params, "q");
        if (q < 1 || q > n) throw InvalidArgument("uniformly_sparse: need 1 <= q <= n");
        for (Index i = 0; i < q; ++i) {
          perms.push_back(rng.permutation(static_cast<std::size_t>(n)));
          signs.push_back(draw_unit(n, rng, false));
        }
      }
      if (perms.empty() || perms.size() != signs.size()) throw InvalidArgument("uniformly_sparse: malformed terms");
      std::vector<OperatorPtr> terms;
      for (std::size_t i = 0; i < perms.size(); ++i) {
        check_bijection(perms[i]);
        if (static_cast<Index>(perms[i].size()) != n || static_cast<Index>(signs[i].size()) != n)
          throw InvalidArgument("uniformly_sparse: term order != n");
        terms.push_back(std::make_shared<detail::ProductOp>(std::vector<OperatorPtr>{
            std::make_shared<detail::DiagOp>(signs[i]), std::make_shared<detail::PermOp>(perms[i])}));
      }
      return make(std::make_shared<detail::SumOp>(std::vector<cd>(terms.size(), 1.0), terms), rng);
    };

    r["abridged_f_circulant"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const int depth = check_depth(n, d.params);
      const cd f = get_cd_or(d.params, "f", 1.0);
      if (std::abs(std::abs(f) - 1.0) > 1e-12) throw InvalidArgument("abridged_f_circulant: |f| must be 1");
      std::vector<cd> u;
      if (d.params.contains("u"))
        u = cd_list(d.params["u"]);
      else
        u = draw_unit(n, rng, true);
      if (static_cast<Index>(u.size()) != n) throw InvalidArgument("abridged_f_circulant: u must have n entries");
      // AF = P T R with P the interleaves and T the last twiddle diagonal, so
      // AF^H diag(u) AF = R^H diag(P^T u) R.
      std::vector<Stage> st = fourier_stages(n, depth, false);
      std::vector<Stage> perm_stages(st.begin() + 2 * depth, st.end());
      st.resize(static_cast<std::size_t>(2 * depth - 1));
      const detail::StageOp inter(n, perm_stages);
      CVec uv = Eigen::Map<const CVec>(u.data(), n);
      FlopTally none;
      CVec pu(n);
      inter.apply_transpose(uv.data(), pu.data(), none);
      u.assign(pu.data(), pu.data() + n);
      auto af = std::make_shared<detail::StageOp>(n, st);
      auto af_h = std::make_shared<detail::AdjointOp>(af);
      std::vector<OperatorPtr> factors;
      const bool plain = f == cd(1.0);
      std::vector<cd> df(static_cast<std::size_t>(n)), dfi(static_cast<std::size_t>(n));
      if (!plain) {
        const double ang = std::arg(f) / static_cast<double>(n);
        for (Index i = 0; i < n; ++i) {
          df[static_cast<std::size_t>(i)] = std::polar(1.0, ang * static_cast<double>(i));
          dfi[static_cast<std::size_t>(i)] = std::conj(df[static_cast<std::size_t>(i)]);
        }
        factors.push_back(std::make_shared<detail::DiagOp>(dfi));
      }
      factors.push_back(af_h);
      factors.push_back(std::make_shared<detail::DiagOp>(u));
      factors.push_back(af);
      if (!plain) factors.push_back(std::make_shared<detail::DiagOp>(df));
      return make(std::make_shared<detail::ProductOp>(factors), rng);
    };

    r["inverse_bidiagonal"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const std::string orient = get_str_or(d.params, "orientation", "lower");
      if (orient != "lower" && orient != "upper") throw InvalidArgument("inverse_bidiagonal: orientation must be lower or upper");
      const cd a = get_cd_or(d.params, "main", 1.0);
      const Index k = get_index_or(d.params, "offset", 1);
      if (n < 2) throw InvalidArgument("inverse_bidiagonal: n must be >= 2");
      std::vector<cd> b;
      if (d.params.contains("entries")) {
        b = cd_list(d.params["entries"]);
      } else if (!d.params.contains("off") || (d.params["off"].is_string() && d.params["off"] == "sign")) {
        b = draw_unit(n - k, rng, false);
      } else {
        b.assign(static_cast<std::size_t>(n - k), to_cd(d.params["off"]));
      }
      return make(std::make_shared<detail::InverseBidiagOp>(n, a, k, b, orient == "upper"), rng);
    };

    r["givens_chain"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      Index full = 0;
      while ((Index{1} << full) < n) ++full;
      json p = d.params;
      if (!p.contains("d")) p["d"] = full;
      const int depth = check_depth(n, p);
      const std::string omega = get_str_or(p, "omega", "af");
      auto chain = [&]() {
        std::vector<double> th(static_cast<std::size_t>(n - 1));
        for (auto& t : th) t = 2.0 * std::numbers::pi * rng.uniform();
        auto perm = rng.permutation(static_cast<std::size_t>(n));
        return std::make_shared<detail::GivensOp>(th, perm);
      };
      auto d1 = std::make_shared<detail::DiagOp>(draw_unit(n, rng, true));
      auto g1 = chain();
      auto d2 = std::make_shared<detail::DiagOp>(draw_unit(n, rng, true));
      auto g2 = chain();
      auto d3 = std::make_shared<detail::DiagOp>(draw_unit(n, rng, true));
      std::vector<Stage> st = fourier_stages(n, depth, false);
      if (omega == "aspf") {
        st.push_back(detail::block_diag_stage(draw_unit(n, rng, true)));
        st.push_back(detail::block_perm_stage(rng.permutation(static_cast<std::size_t>(n))));
      } else if (omega != "af") {
        throw InvalidArgument("givens_chain: omega must be af or aspf");
      }
      auto om = std::make_shared<detail::StageOp>(n, st);
      const double scale = 1.0 / std::sqrt(static_cast<double>(Index{1} << depth));
      auto prod = std::make_shared<detail::ProductOp>(std::vector<OperatorPtr>{d1, g1, d2, g2, d3, om});
      return make(std::make_shared<detail::ScaleOp>(scale, prod), rng);
    };

    r["block2x2_circulant"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      if (n < 2 || n % 2 != 0) throw InvalidArgument("block2x2_circulant: order must be even");
      const Index h = n / 2;
      const std::string values = get_str_or(d.params, "values", "sign");
      auto vec = [&]() {
        std::vector<cd> v(static_cast<std::size_t>(h));
        for (auto& e : v) e = values == "gaussian" ? cd(rng.normal()) : cd(rng.sign());
        return v;
      };
      std::vector<std::size_t> pos(static_cast<std::size_t>(h));
      for (std::size_t i = 0; i < pos.size(); ++i) pos[i] = i;
      auto zu = std::make_shared<detail::CirculantOp>(h, pos, vec(), 1.0);
      auto zv = std::make_shared<detail::CirculantOp>(h, pos, vec(), 1.0);
      auto dg = std::make_shared<detail::DiagOp>(draw_unit(n, rng, false));
      auto blk = std::make_shared<detail::Block2x2Op>(zu, zv);
      auto prod = std::make_shared<detail::ProductOp>(std::vector<OperatorPtr>{blk, dg});
      return make(std::make_shared<detail::ScaleOp>(1.0 / std::sqrt(static_cast<double>(n)), prod), rng);
    };

    r["gaussian"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const Index l = get_index_or(d.params, "l", n);
      return make(std::make_shared<detail::DenseOp>(linalg::gaussian_matrix(n, l, rng)), rng);
    };

    r["ternary"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      const Index l = get_index_or(d.params, "l", n);
      if (n < 1 || l < 1) throw InvalidArgument("ternary: dimensions must be positive");
      RMat a(n, l);
      for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < l; ++j) a(i, j) = static_cast<double>(rng.below(3)) - 1.0;
      return make(std::make_shared<detail::DenseOp>(DenseMatrix(a)), rng);
    };

    r["gaussian_toeplitz"] = [](const Descriptor& d, Rng& rng) {
      const Index n = get_index(d.params, "n");
      if (n < 1) throw InvalidArgument("gaussian_toeplitz: n must be >= 1");
      std::vector<double> t(static_cast<std::size_t>(2 * n - 1));
      for (auto& v : t) v = rng.normal();
      return make(std::make_shared<detail::ToeplitzOp>(n, t), rng);
    };

    r["explicit"] = [](const Descriptor& d, Rng& rng) {
      const Index rows = get_index(d.params, "rows");
      const Index cols = get_index(d.params, "cols");
      const auto e = cd_list(d.params.at("entries"));
      if (static_cast<Index>(e.size()) != rows * cols) throw InvalidArgument("explicit: entry count != rows*cols");
      if (detail::is_real_vec(e)) {
        RMat a(rows, cols);
        for (Index i = 0; i < rows * cols; ++i) a(i / cols, i % cols) = e[static_cast<std::size_t>(i)].real();
        return make(std::make_shared<detail::DenseOp>(DenseMatrix(a)), rng);
      }
      CMat a(rows, cols);
      for (Index i = 0; i < rows * cols; ++i) a(i / cols, i % cols) = e[static_cast<std::size_t>(i)];
      return make(std::make_shared<detail::DenseOp>(DenseMatrix(a)), rng);
    };

    r["sum"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      if (kids.empty()) throw InvalidArgument("sum: no children");
      std::vector<cd> coeffs;
      if (!d.params.contains("coeffs")) {
        coeffs.assign(kids.size(), 1.0);
      } else if (d.params["coeffs"].is_string()) {
        if (d.params["coeffs"] != "signs") throw InvalidArgument("sum: coeffs must be a list or \"signs\"");
        for (std::size_t i = 0; i < kids.size(); ++i) coeffs.push_back(rng.sign());
      } else {
        coeffs = cd_list(d.params["coeffs"]);
      }
      std::vector<OperatorPtr> ops;
      for (auto& k : kids) ops.push_back(k.op);
      return make(std::make_shared<detail::SumOp>(coeffs, ops), rng, sum_rv(kids));
    };

    r["product"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      std::vector<OperatorPtr> ops;
      for (auto& k : kids) ops.push_back(k.op);
      return make(std::make_shared<detail::ProductOp>(ops), rng, sum_rv(kids));
    };

    r["restrict_columns"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      const Built& c = only_child(kids, "restrict_columns");
      auto idx = select_indices(d.params, c.op->cols(), rng, "cols");
      return make(std::make_shared<detail::RestrictColumnsOp>(c.op, idx), rng, c.rv);
    };

    r["restrict_rows"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      const Built& c = only_child(kids, "restrict_rows");
      auto idx = select_indices(d.params, c.op->rows(), rng, "rows");
      return make(std::make_shared<detail::RestrictRowsOp>(c.op, idx), rng, c.rv);
    };

    r["scale"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      const Built& c = only_child(kids, "scale");
      return make(std::make_shared<detail::ScaleOp>(to_cd(d.params.at("alpha")), c.op), rng, c.rv);
    };

    r["normalized"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      const Built& c = only_child(kids, "normalized");
      const double s = unitary_scale(d.children.front());
      return make(std::make_shared<detail::ScaleOp>(s, c.op), rng, c.rv);
    };

    r["adjoint"] = [](const Descriptor& d, Rng& rng) {
      auto kids = build_children(d);
      const Built& c = only_child(kids, "adjoint");
      return make(std::make_shared<detail::AdjointOp>(c.op), rng, c.rv);
    };
    return r;
  }();
  return reg;
}

Built build_node(const Descriptor& d) {
  const auto& reg = registry();
  const auto it = reg.find(d.family);
  if (it == reg.end()) throw InvalidArgument("unknown multiplier family '" + d.family + "'");
  Rng rng(d.seed);
  return it->second(d, rng);
}

}  // namespace

Multiplier build(const Descriptor& d) {
  Built b = build_node(d);
  return Multiplier(std::move(b.op), d, b.rv);
}

std::vector<std::string> known_families() {
  std::vector<std::string> out;
  for (const auto& [k, v] : registry()) out.push_back(k);
  return out;
}

double unitary_scale(const Descriptor& d) {
  const std::string& f = d.family;
  const json& p = d.params;
  auto depth = [&]() { return static_cast<double>(get_index(p, "d")); };
  if (f == "identity" || f == "permutation" || f == "unit_diagonal" || f == "givens_chain") return 1.0;
  if (f == "hadamard_primitive") return 1.0 / std::sqrt(2.0);
  if (f == "ah" || f == "af" || f == "rand_abridged_h" || f == "rand_abridged_f") return std::pow(2.0, -depth() / 2.0);
  if (f == "ash" || f == "aph" || f == "asph" || f == "asf" || f == "apf" || f == "aspf") {
    if (p.contains("scaling") && !(p["scaling"].is_string() && p["scaling"] == "unit"))
      throw InvalidArgument("unitary_scale: non-unit scaling has no unitary constant");
    return std::pow(2.0, -depth() / 2.0);
  }
  if (f == "abridged_f_circulant") return std::pow(2.0, -depth());
  if (f == "shift" && std::abs(std::abs(get_cd_or(p, "f", 0.0)) - 1.0) < 1e-12) return 1.0;
  if (f == "product") {
    double s = 1.0;
    for (const auto& c : d.children) s *= unitary_scale(c);
    return s;
  }
  throw InvalidArgument("unitary_scale: family '" + f + "' has no unitary scaling constant");
}

// Factories: thin descriptor constructors routed through build().

namespace {

Descriptor desc(const std::string& fam, json params, std::uint64_t seed = 0, std::vector<Descriptor> kids = {}) {
  Descriptor d;
  d.family = fam;
  d.params = std::move(params);
  d.seed = seed;
  d.children = std::move(kids);
  return d;
}

std::vector<Descriptor> descs(const std::vector<Multiplier>& ms) {
  std::vector<Descriptor> out;
  for (const auto& m : ms) out.push_back(m.descriptor());
  return out;
}

json index_json(const std::vector<std::size_t>& v) {
  json a = json::array();
  for (std::size_t x : v) a.push_back(x);
  return a;
}

}  // namespace

Multiplier identity(Index n) { return build(desc("identity", {{"n", n}})); }
Multiplier permutation(Index n, std::uint64_t seed) { return build(desc("permutation", {{"n", n}}, seed)); }
Multiplier permutation(const std::vector<std::size_t>& perm) {
  return build(desc("permutation", {{"n", perm.size()}, {"perm", index_json(perm)}}));
}
Multiplier unit_diagonal(Index n, std::uint64_t seed, Field field) {
  return build(desc("unit_diagonal", {{"n", n}, {"field", field == Field::Real ? "real" : "complex"}}, seed));
}
Multiplier unit_diagonal(const std::vector<cd>& entries) {
  json e = json::array();
  for (cd c : entries) e.push_back(from_cd(c));
  return build(desc("unit_diagonal", {{"n", entries.size()}, {"entries", e}}));
}
Multiplier shift(Index n, cd f) { return build(desc("shift", {{"n", n}, {"f", from_cd(f)}})); }
Multiplier hadamard_primitive(Index n) { return build(desc("hadamard_primitive", {{"n", n}})); }
Multiplier abridged_hadamard(Index n, int d) { return build(desc("ah", {{"n", n}, {"d", d}})); }
Multiplier abridged_fourier(Index n, int d) { return build(desc("af", {{"n", n}, {"d", d}})); }
Multiplier abridged_variant(const std::string& family, Index n, int d, std::uint64_t seed, Side side) {
  return build(desc(family, {{"n", n}, {"d", d}, {"side", side == Side::Left ? "left" : "right"}}, seed));
}
Multiplier randomized_abridged(Index n, int d, char kind, std::uint64_t seed) {
  if (kind != 'H' && kind != 'F' && kind != 'h' && kind != 'f')
    throw InvalidArgument("randomized_abridged: kind must be H or F");
  const bool f = kind == 'F' || kind == 'f';
  return build(desc(f ? "rand_abridged_f" : "rand_abridged_h", {{"n", n}, {"d", d}}, seed));
}
Multiplier sparse_f_circulant(Index n, Index q, cd f, std::uint64_t seed, Field values) {
  return build(desc("sparse_f_circulant",
                    {{"n", n}, {"q", q}, {"f", from_cd(f)}, {"values", values == Field::Real ? "sign" : "unit_complex"}},
                    seed));
}
Multiplier circulant(Index n, const std::string& values, std::uint64_t seed) {
  return build(desc("circulant", {{"n", n}, {"values", values}}, seed));
}
Multiplier uniformly_sparse(Index n, Index q, std::uint64_t seed) {
  return build(desc("uniformly_sparse", {{"n", n}, {"q", q}}, seed));
}
Multiplier abridged_f_circulant(Index n, int d, cd f, std::uint64_t seed) {
  return build(desc("abridged_f_circulant", {{"n", n}, {"d", d}, {"f", from_cd(f)}}, seed));
}
Multiplier inverse_bidiagonal(Index n, std::uint64_t seed, bool upper) {
  return build(desc("inverse_bidiagonal", {{"n", n}, {"orientation", upper ? "upper" : "lower"}}, seed));
}
Multiplier inverse_bidiagonal_const(Index n, double a, Index k, double b, bool upper) {
  return build(desc("inverse_bidiagonal",
                    {{"n", n}, {"orientation", upper ? "upper" : "lower"}, {"main", a}, {"offset", k}, {"off", b}}));
}
Multiplier givens_chain(Index n, int d_fourier, std::uint64_t seed) {
  return build(desc("givens_chain", {{"n", n}, {"d", d_fourier}}, seed));
}
Multiplier block2x2_circulant(Index n, std::uint64_t seed) {
  return build(desc("block2x2_circulant", {{"n", n}}, seed));
}
Multiplier gaussian(Index n, Index l, std::uint64_t seed) { return build(desc("gaussian", {{"n", n}, {"l", l}}, seed)); }
Multiplier ternary(Index n, Index l, std::uint64_t seed) { return build(desc("ternary", {{"n", n}, {"l", l}}, seed)); }
Multiplier gaussian_toeplitz(Index n, std::uint64_t seed) { return build(desc("gaussian_toeplitz", {{"n", n}}, seed)); }
Multiplier explicit_matrix(const DenseMatrix& A) {
  json e = json::array();
  for (Index i = 0; i < A.rows(); ++i)
    for (Index j = 0; j < A.cols(); ++j) e.push_back(from_cd(A(i, j)));
  return build(desc("explicit", {{"rows", A.rows()}, {"cols", A.cols()}, {"entries", e}}));
}

Multiplier sum(const std::vector<cd>& coeffs, const std::vector<Multiplier>& terms) {
  json c = json::array();
  for (cd v : coeffs) c.push_back(from_cd(v));
  std::vector<OperatorPtr> ops;
  std::uint64_t rv = 0;
  for (const auto& t : terms) {
    ops.push_back(t.op_ptr());
    rv += t.random_variables();
  }
  auto op = std::make_shared<detail::SumOp>(coeffs, ops);
  return Multiplier(op, desc("sum", {{"coeffs", c}}, 0, descs(terms)), rv);
}

Multiplier product(const std::vector<Multiplier>& factors) {
  std::vector<OperatorPtr> ops;
  std::uint64_t rv = 0;
  for (const auto& t : factors) {
    ops.push_back(t.op_ptr());
    rv += t.random_variables();
  }
  auto op = std::make_shared<detail::ProductOp>(ops);
  return Multiplier(op, desc("product", json::object(), 0, descs(factors)), rv);
}

Multiplier restrict_columns(const Multiplier& B, const std::vector<std::size_t>& cols) {
  std::vector<char> seen(static_cast<std::size_t>(B.cols()), 0);
  for (std::size_t c : cols) {
    if (static_cast<Index>(c) >= B.cols() || seen[c]) throw InvalidArgument("restrict_columns: indices must be distinct and in range");
    seen[c] = 1;
  }
  if (cols.empty()) throw InvalidArgument("restrict_columns: no columns");
  auto op = std::make_shared<detail::RestrictColumnsOp>(B.op_ptr(), cols);
  return Multiplier(op, desc("restrict_columns", {{"cols", index_json(cols)}}, 0, {B.descriptor()}), B.random_variables());
}

Multiplier leftmost(const Multiplier& B, Index l) {
  if (l < 1 || l > B.cols()) throw InvalidArgument("leftmost: width out of range");
  std::vector<std::size_t> idx(static_cast<std::size_t>(l));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto op = std::make_shared<detail::RestrictColumnsOp>(B.op_ptr(), idx);
  return Multiplier(op, desc("restrict_columns", {{"leftmost", l}}, 0, {B.descriptor()}), B.random_variables());
}

Multiplier random_columns(const Multiplier& B, Index l, std::uint64_t seed) {
  return build(desc("restrict_columns", {{"random", l}}, seed, {B.descriptor()}));
}

Multiplier restrict_rows(const Multiplier& B, const std::vector<std::size_t>& rows) {
  std::vector<char> seen(static_cast<std::size_t>(B.rows()), 0);
  for (std::size_t r : rows) {
    if (static_cast<Index>(r) >= B.rows() || seen[r]) throw InvalidArgument("restrict_rows: indices must be distinct and in range");
    seen[r] = 1;
  }
  if (rows.empty()) throw InvalidArgument("restrict_rows: no rows");
  auto op = std::make_shared<detail::RestrictRowsOp>(B.op_ptr(), rows);
  return Multiplier(op, desc("restrict_rows", {{"rows", index_json(rows)}}, 0, {B.descriptor()}), B.random_variables());
}

Multiplier topmost(const Multiplier& B, Index k) {
  if (k < 1 || k > B.rows()) throw InvalidArgument("topmost: height out of range");
  std::vector<std::size_t> idx(static_cast<std::size_t>(k));
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  auto op = std::make_shared<detail::RestrictRowsOp>(B.op_ptr(), idx);
  return Multiplier(op, desc("restrict_rows", {{"topmost", k}}, 0, {B.descriptor()}), B.random_variables());
}

Multiplier scaled(const Multiplier& B, cd alpha) {
  auto op = std::make_shared<detail::ScaleOp>(alpha, B.op_ptr());
  return Multiplier(op, desc("scale", {{"alpha", from_cd(alpha)}}, 0, {B.descriptor()}), B.random_variables());
}

Multiplier adjoint(const Multiplier& B) {
  auto op = std::make_shared<detail::AdjointOp>(B.op_ptr());
  return Multiplier(op, desc("adjoint", json::object(), 0, {B.descriptor()}), B.random_variables());
}

Multiplier normalized(const Multiplier& B) {
  const double s = unitary_scale(B.descriptor());
  auto op = std::make_shared<detail::ScaleOp>(s, B.op_ptr());
  return Multiplier(op, desc("normalized", json::object(), 0, {B.descriptor()}), B.random_variables());
}

}  // namespace sketchlab::mult
