#pragma once

#include <algorithm>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "teachkit/concept_class.hpp"
#include "teachkit/errors.hpp"

namespace teachkit {

inline constexpr std::size_t kMatchingEdgeBudget = 100000;

// Bipartite graph with black and white vertex parts. In the concept-class
// view, black = concepts and white = instances. Vertices may carry
// provenance tags (used by the SAT reduction gadgets).
class BipartiteGraph {
 public:
  BipartiteGraph(std::size_t black_count, std::size_t white_count)
      : black_count_(black_count), white_count_(white_count) {}

  std::size_t black_count() const { return black_count_; }
  std::size_t white_count() const { return white_count_; }
  const std::vector<std::pair<std::uint32_t, std::uint32_t>>& edges() const {
    return edges_;
  }

  void add_edge(std::uint32_t black, std::uint32_t white) {
    if (black >= black_count_ || white >= white_count_)
      throw IndexOutOfRange("edge (" + std::to_string(black) + "," +
                            std::to_string(white) + ") out of range");
    if (adjacent(black, white)) return;
    edges_.emplace_back(black, white);
    adj_rows_.resize(black_count_ * blocks_per_row());
    adj_rows_[black * blocks_per_row() + white / 64] |= std::uint64_t{1}
                                                        << (white % 64);
    dirty_ = true;
  }

  bool adjacent(std::uint32_t black, std::uint32_t white) const {
    std::size_t idx = black * blocks_per_row() + white / 64;
    if (idx >= adj_rows_.size()) return false;
    return (adj_rows_[idx] >> (white % 64)) & 1;
  }

  const std::vector<std::uint32_t>& black_adj(std::uint32_t b) const {
    rebuild();
    return black_neighbors_[b];
  }
  const std::vector<std::uint32_t>& white_adj(std::uint32_t w) const {
    rebuild();
    return white_neighbors_[w];
  }
  std::size_t black_degree(std::uint32_t b) const { return black_adj(b).size(); }
  std::size_t white_degree(std::uint32_t w) const { return white_adj(w).size(); }

  void set_black_tag(std::uint32_t b, std::string tag) {
    black_tags_.resize(black_count_);
    black_tags_[b] = std::move(tag);
  }
  void set_white_tag(std::uint32_t w, std::string tag) {
    white_tags_.resize(white_count_);
    white_tags_[w] = std::move(tag);
  }
  std::string black_tag(std::uint32_t b) const {
    return b < black_tags_.size() ? black_tags_[b] : std::string{};
  }
  std::string white_tag(std::uint32_t w) const {
    return w < white_tags_.size() ? white_tags_[w] : std::string{};
  }

 private:
  std::size_t blocks_per_row() const { return (white_count_ + 63) / 64; }

  void rebuild() const {
    if (!dirty_ && !black_neighbors_.empty()) return;
    black_neighbors_.assign(black_count_, {});
    white_neighbors_.assign(white_count_, {});
    for (auto [b, w] : edges_) {
      black_neighbors_[b].push_back(w);
      white_neighbors_[w].push_back(b);
    }
    for (auto& v : black_neighbors_) std::sort(v.begin(), v.end());
    for (auto& v : white_neighbors_) std::sort(v.begin(), v.end());
    dirty_ = false;
  }

  std::size_t black_count_;
  std::size_t white_count_;
  std::vector<std::pair<std::uint32_t, std::uint32_t>> edges_;
  std::vector<std::uint64_t> adj_rows_;
  std::vector<std::string> black_tags_, white_tags_;
  mutable std::vector<std::vector<std::uint32_t>> black_neighbors_;
  mutable std::vector<std::vector<std::uint32_t>> white_neighbors_;
  mutable bool dirty_ = true;
};

struct Matching {
  std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;

  std::optional<std::uint32_t> white_of(std::uint32_t black) const {
    for (auto [b, w] : pairs)
      if (b == black) return w;
    return std::nullopt;
  }
  bool uses(std::uint32_t black, std::uint32_t white) const {
    for (auto [b, w] : pairs)
      if (b == black && w == white) return true;
    return false;
  }
};

// Concepts become black vertices, instances white ones, membership edges.
inline BipartiteGraph from_concept_class(const ConceptClass& cc) {
  if (cc.contains(0))
    throw InvalidArgument(
        "class contains the empty concept; apply remove_empty first");
  BipartiteGraph g(cc.size(), cc.domain_size());
  for (std::size_t i = 0; i < cc.size(); ++i)
    for (Mask rest = cc.mask(i); rest;) {
      std::uint32_t j = static_cast<std::uint32_t>(std::countr_zero(rest));
      g.add_edge(static_cast<std::uint32_t>(i), j);
      rest &= rest - 1;
    }
  return g;
}

// Checks the two conditions: saturates every black vertex, and no two
// matched edges lie on a common 4-cycle ((u,v),(u',v') clash iff u~v' and
// u'~v).
inline bool verify_nc_matching(const BipartiteGraph& g, const Matching& m) {
  std::vector<char> black_done(g.black_count(), 0), white_done(g.white_count(), 0);
  for (auto [b, w] : m.pairs) {
    if (b >= g.black_count() || w >= g.white_count() || !g.adjacent(b, w))
      return false;
    if (black_done[b] || white_done[w]) return false;
    black_done[b] = white_done[w] = 1;
  }
  for (std::size_t b = 0; b < g.black_count(); ++b)
    if (!black_done[b]) return false;
  for (std::size_t i = 0; i < m.pairs.size(); ++i)
    for (std::size_t j = i + 1; j < m.pairs.size(); ++j) {
      auto [u, v] = m.pairs[i];
      auto [u2, v2] = m.pairs[j];
      if (g.adjacent(u, v2) && g.adjacent(u2, v)) return false;
    }
  return true;
}

// Exact solver for the non-clashing bipartite matching problem (NP-hard in
// general). Backtracks over black vertices in ascending-degree order, whites
// in index order; a partial assignment is abandoned as soon as a 4-cycle
// clash appears or some unassigned black vertex runs out of free whites.
inline std::optional<Matching> nc_matching(const BipartiteGraph& g,
                                           Budget budget = Budget{}) {
  if (g.edges().size() > kMatchingEdgeBudget)
    throw SearchBudgetExceeded("graph exceeds the edge budget", 0, -1);
  std::size_t nb = g.black_count();
  for (std::size_t b = 0; b < nb; ++b)
    if (g.black_degree(static_cast<std::uint32_t>(b)) == 0) return std::nullopt;

  std::vector<std::uint32_t> order(nb);
  for (std::size_t b = 0; b < nb; ++b) order[b] = static_cast<std::uint32_t>(b);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::uint32_t a, std::uint32_t b) {
                     return g.black_degree(a) < g.black_degree(b);
                   });

  std::vector<char> white_used(g.white_count(), 0);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> chosen;
  chosen.reserve(nb);

  auto clashes = [&](std::uint32_t b, std::uint32_t w) {
    for (auto [b2, w2] : chosen)
      if (g.adjacent(b, w2) && g.adjacent(b2, w)) return true;
    return false;
  };
  auto someone_starved = [&](std::size_t next) {
    for (std::size_t k = next; k < nb; ++k) {
      bool any = false;
      for (std::uint32_t w : g.black_adj(order[k]))
        if (!white_used[w]) {
          any = true;
          break;
        }
      if (!any) return true;
    }
    return false;
  };

  bool out_of_budget = false;
  auto descend = [&](auto&& self, std::size_t pos) -> bool {
    if (pos == nb) return true;
    if (!budget.tick()) {
      out_of_budget = true;
      return false;
    }
    std::uint32_t b = order[pos];
    for (std::uint32_t w : g.black_adj(b)) {
      if (white_used[w] || clashes(b, w)) continue;
      white_used[w] = 1;
      chosen.emplace_back(b, w);
      bool ok = !someone_starved(pos + 1) && self(self, pos + 1);
      if (ok) return true;
      chosen.pop_back();
      white_used[w] = 0;
      if (out_of_budget) return false;
    }
    return false;
  };

  if (descend(descend, 0)) {
    Matching m{chosen};
    std::sort(m.pairs.begin(), m.pairs.end());
    return m;
  }
  if (out_of_budget)
    throw SearchBudgetExceeded("nc_matching budget exhausted", 0, -1);
  return std::nullopt;
}

namespace detail {

// Kuhn's augmenting-path maximum matching; small graphs only.
inline std::size_t max_bipartite_matching(
    const std::vector<std::vector<std::uint32_t>>& black_adj,
    std::size_t white_count, std::vector<std::int64_t>& match_black,
    std::vector<std::int64_t>& match_white) {
  std::size_t nb = black_adj.size();
  match_black.assign(nb, -1);
  match_white.assign(white_count, -1);
  std::vector<char> visited(white_count, 0);
  auto try_augment = [&](auto&& self, std::uint32_t b) -> bool {
    for (std::uint32_t w : black_adj[b]) {
      if (visited[w]) continue;
      visited[w] = 1;
      if (match_white[w] < 0 ||
          self(self, static_cast<std::uint32_t>(match_white[w]))) {
        match_black[b] = w;
        match_white[w] = b;
        return true;
      }
    }
    return false;
  };
  std::size_t size = 0;
  for (std::uint32_t b = 0; b < nb; ++b) {
    std::fill(visited.begin(), visited.end(), 0);
    if (try_augment(try_augment, b)) ++size;
  }
  return size;
}

}  // namespace detail

// Polynomial-time solver for the case where one part has maximum degree two.
// Degree-1 edges are forced (they cannot lie on a 4-cycle), twins in the
// bounded part are then resolved (black twins preclude a solution, white
// twins collapse), after which no 4-cycle survives and any black-saturating
// matching is non-clashing.
inline std::optional<Matching> nc_matching_degree2(const BipartiteGraph& g) {
  std::size_t nb = g.black_count(), nw = g.white_count();
  bool black_bounded = true, white_bounded = true;
  for (std::size_t b = 0; b < nb; ++b)
    if (g.black_degree(static_cast<std::uint32_t>(b)) > 2) black_bounded = false;
  for (std::size_t w = 0; w < nw; ++w)
    if (g.white_degree(static_cast<std::uint32_t>(w)) > 2) white_bounded = false;
  if (!black_bounded && !white_bounded)
    throw InvalidArgument(
        "nc_matching_degree2 requires one part with maximum degree 2");
  bool bounded_is_black = black_bounded;

  std::vector<char> black_alive(nb, 1), white_alive(nw, 1);
  std::vector<std::vector<std::uint32_t>> badj(nb), wadj(nw);
  for (auto [b, w] : g.edges()) {
    badj[b].push_back(w);
    wadj[w].push_back(b);
  }
  for (auto& v : badj) std::sort(v.begin(), v.end());
  for (auto& v : wadj) std::sort(v.begin(), v.end());

  auto live_black_deg = [&](std::uint32_t b) {
    std::size_t d = 0;
    for (std::uint32_t w : badj[b])
      if (white_alive[w]) ++d;
    return d;
  };
  auto live_white_deg = [&](std::uint32_t w) {
    std::size_t d = 0;
    for (std::uint32_t b : wadj[w])
      if (black_alive[b]) ++d;
    return d;
  };

  std::vector<std::pair<std::uint32_t, std::uint32_t>> forced;
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::uint32_t b = 0; b < nb; ++b) {
      if (!black_alive[b]) continue;
      std::size_t d = live_black_deg(b);
      if (d == 0) return std::nullopt;
      if (d == 1 && bounded_is_black) {
        std::uint32_t w = 0;
        for (std::uint32_t cand : badj[b])
          if (white_alive[cand]) w = cand;
        forced.emplace_back(b, w);
        black_alive[b] = white_alive[w] = 0;
        changed = true;
      }
    }
    if (!bounded_is_black) {
      for (std::uint32_t w = 0; w < nw; ++w) {
        if (!white_alive[w]) continue;
        std::size_t d = live_white_deg(w);
        if (d == 0) {
          white_alive[w] = 0;  // harmless, never matchable
          continue;
        }
        if (d == 1) {
          std::uint32_t b = 0;
          for (std::uint32_t cand : wadj[w])
            if (black_alive[cand]) b = cand;
          forced.emplace_back(b, w);
          black_alive[b] = white_alive[w] = 0;
          changed = true;
        }
      }
    }
    if (changed) continue;

    // Twin resolution on the bounded part (all remaining degrees are 2).
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> seen;
    if (bounded_is_black) {
      for (std::uint32_t b = 0; b < nb; ++b) {
        if (!black_alive[b]) continue;
        std::vector<std::uint32_t> ns;
        for (std::uint32_t w : badj[b])
          if (white_alive[w]) ns.push_back(w);
        if (ns.size() != 2) continue;
        auto key = std::pair(ns[0], ns[1]);
        if (seen.count(key)) return std::nullopt;  // black twins
        seen[key] = b;
      }
    } else {
      for (std::uint32_t w = 0; w < nw; ++w) {
        if (!white_alive[w]) continue;
        std::vector<std::uint32_t> ns;
        for (std::uint32_t b : wadj[w])
          if (black_alive[b]) ns.push_back(b);
        if (ns.size() != 2) continue;
        auto key = std::pair(ns[0], ns[1]);
        auto it = seen.find(key);
        if (it != seen.end()) {
          white_alive[w] = 0;  // white twins: keep a single copy
          changed = true;
        } else {
          seen[key] = w;
        }
      }
    }
  }

  std::vector<std::vector<std::uint32_t>> live_adj(nb);
  std::size_t live_blacks = 0;
  for (std::uint32_t b = 0; b < nb; ++b) {
    if (!black_alive[b]) continue;
    ++live_blacks;
    for (std::uint32_t w : badj[b])
      if (white_alive[w]) live_adj[b].push_back(w);
  }
  std::vector<std::int64_t> mb, mw;
  std::size_t size = detail::max_bipartite_matching(live_adj, nw, mb, mw);
  if (size < live_blacks) return std::nullopt;

  Matching m{std::move(forced)};
  for (std::uint32_t b = 0; b < nb; ++b)
    if (black_alive[b] && mb[b] >= 0)
      m.pairs.emplace_back(b, static_cast<std::uint32_t>(mb[b]));
  std::sort(m.pairs.begin(), m.pairs.end());
  return m;
}

// ---------------------------------------------------------------------------
// Graph text format: "p bip <black> <white>" header, "e <black> <white>"
// edge lines, "c ..." comments (vertex tags are emitted as comments).

inline void write_graph(std::ostream& out, const BipartiteGraph& g) {
  out << "p bip " << g.black_count() << " " << g.white_count() << "\n";
  for (std::uint32_t b = 0; b < g.black_count(); ++b)
    if (!g.black_tag(b).empty()) out << "c tag b " << b << " " << g.black_tag(b) << "\n";
  for (std::uint32_t w = 0; w < g.white_count(); ++w)
    if (!g.white_tag(w).empty()) out << "c tag w " << w << " " << g.white_tag(w) << "\n";
  auto edges = g.edges();
  std::sort(edges.begin(), edges.end());
  for (auto [b, w] : edges) out << "e " << b << " " << w << "\n";
}

inline std::string format_graph(const BipartiteGraph& g) {
  std::ostringstream out;
  write_graph(out, g);
  return out.str();
}

inline BipartiteGraph parse_graph(std::istream& in) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<BipartiteGraph> g;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == 'c') continue;
    std::istringstream ss(line);
    std::string kind;
    ss >> kind;
    if (kind == "p") {
      std::string fmt;
      long long nb = -1, nw = -1;
      ss >> fmt >> nb >> nw;
      if (fmt != "bip" || nb < 0 || nw < 0)
        throw ParseError(lineno, 1, "expected 'p bip <black> <white>'");
      g.emplace(static_cast<std::size_t>(nb), static_cast<std::size_t>(nw));
    } else if (kind == "e") {
      if (!g) throw ParseError(lineno, 1, "edge before 'p bip' header");
      long long b = -1, w = -1;
      ss >> b >> w;
      if (b < 0 || w < 0 || b >= static_cast<long long>(g->black_count()) ||
          w >= static_cast<long long>(g->white_count()))
        throw ParseError(lineno, 3, "edge endpoint out of range");
      g->add_edge(static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(w));
    } else {
      throw ParseError(lineno, 1, "unknown line kind '" + kind + "'");
    }
  }
  if (!g) throw ParseError(lineno + 1, 1, "missing 'p bip' header");
  return *g;
}

inline BipartiteGraph parse_graph(const std::string& text) {
  std::istringstream in(text);
  return parse_graph(in);
}

}  // namespace teachkit
