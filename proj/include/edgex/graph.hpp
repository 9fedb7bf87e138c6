#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <ostream>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "edgex/errors.hpp"

namespace edgex {

using label_t = std::int64_t;

inline std::uint64_t pack_pair(label_t a, label_t b) {
  if (a > b) std::swap(a, b);
  if (a < -1 || b >= (1LL << 31) - 2) throw capacity_error("pack_pair: label out of range");
  return (static_cast<std::uint64_t>(b + 1) << 32) | static_cast<std::uint32_t>(a + 1);
}

inline std::pair<label_t, label_t> unpack_pair(std::uint64_t key) {
  label_t lo = static_cast<label_t>(key & 0xffffffffULL) - 1;
  label_t hi = static_cast<label_t>(key >> 32) - 1;
  return {lo, hi};
}

// Edge arriving on a blip column: the labels 0 / -1 are realized as fresh
// vertices, so these edges are never parallel to anything.
struct BlipEdge {
  enum class Kind { star, dust_edge, dust_loop };
  Kind kind;
  label_t center = 0;       // positive endpoint for star edges
  label_t blip_a = 0;       // synthetic labels
  label_t blip_b = 0;       // second synthetic label (dust_edge only)
};

// Multigraph as a multiplicity map over unordered positive-label pairs,
// plus the blip edges kept separately.
struct MultiGraph {
  std::unordered_map<std::uint64_t, std::uint64_t> multiplicities;
  std::vector<BlipEdge> blip_edges;

  void add_edge(label_t i, label_t j, std::uint64_t count = 1) {
    if (i < 1 || j < 1) throw parameter_error("MultiGraph::add_edge: labels must be >= 1");
    if (count == 0) return;
    multiplicities[pack_pair(i, j)] += count;
  }

  std::uint64_t multiplicity(label_t i, label_t j) const {
    auto it = multiplicities.find(pack_pair(i, j));
    return it == multiplicities.end() ? 0 : it->second;
  }

  std::uint64_t edge_total() const {
    std::uint64_t n = blip_edges.size();
    for (auto& [k, c] : multiplicities) n += c;
    return n;
  }

  // Multigraph degrees over positive labels; loops count twice.
  std::map<label_t, std::uint64_t> degrees() const {
    std::map<label_t, std::uint64_t> d;
    for (auto& [k, c] : multiplicities) {
      auto [i, j] = unpack_pair(k);
      d[i] += c;
      d[j] += c;
    }
    for (auto& b : blip_edges)
      if (b.kind == BlipEdge::Kind::star) d[b.center] += 1;
    return d;
  }
};

struct SimpleGraph {
  std::unordered_set<std::uint64_t> edges;

  void add_edge(label_t i, label_t j) {
    if (i == j) throw parameter_error("SimpleGraph::add_edge: loops not allowed");
    edges.insert(pack_pair(i, j));
  }
  bool has_edge(label_t i, label_t j) const { return edges.count(pack_pair(i, j)) > 0; }
  std::size_t edge_count() const { return edges.size(); }

  std::vector<label_t> vertices() const {
    std::unordered_set<label_t> vs;
    for (auto k : edges) {
      auto [i, j] = unpack_pair(k);
      vs.insert(i);
      vs.insert(j);
    }
    std::vector<label_t> out(vs.begin(), vs.end());
    std::sort(out.begin(), out.end());
    return out;
  }
  std::size_t vertex_count() const {
    std::unordered_set<label_t> vs;
    for (auto k : edges) {
      auto [i, j] = unpack_pair(k);
      vs.insert(i);
      vs.insert(j);
    }
    return vs.size();
  }

  std::unordered_map<label_t, std::uint64_t> degrees() const {
    std::unordered_map<label_t, std::uint64_t> d;
    for (auto k : edges) {
      auto [i, j] = unpack_pair(k);
      ++d[i];
      ++d[j];
    }
    return d;
  }

  std::vector<std::pair<label_t, label_t>> sorted_edges() const {
    std::vector<std::uint64_t> ks(edges.begin(), edges.end());
    std::sort(ks.begin(), ks.end());
    std::vector<std::pair<label_t, label_t>> out;
    out.reserve(ks.size());
    for (auto k : ks) out.push_back(unpack_pair(k));
    return out;
  }
};

// Hyperedges as sorted label multisets; nonpositive labels were already
// realized as fresh blips by the samplers, so all labels here are final.
struct MultiHyperGraph {
  std::vector<std::vector<label_t>> edges;
};

// Merge parallel edges, delete loops (and vertices that only carried loops).
inline SimpleGraph simplify(const MultiGraph& g) {
  SimpleGraph s;
  for (auto& [k, c] : g.multiplicities) {
    auto [i, j] = unpack_pair(k);
    if (i != j) s.edges.insert(k);
  }
  for (auto& b : g.blip_edges) {
    switch (b.kind) {
      case BlipEdge::Kind::star: s.add_edge(b.center, b.blip_a); break;
      case BlipEdge::Kind::dust_edge: s.add_edge(b.blip_a, b.blip_b); break;
      case BlipEdge::Kind::dust_loop: break;  // loop at a fresh vertex
    }
  }
  return s;
}

struct Decomposition {
  MultiGraph central;
  std::vector<std::pair<label_t, std::uint64_t>> stars;  // (centre, edge count)
  std::uint64_t dust_edges = 0;
  std::uint64_t dust_loops = 0;

  std::uint64_t star_edge_total() const {
    std::uint64_t n = 0;
    for (auto& [c, k] : stars) n += k;
    return n;
  }
};

// Split by which endpoints are blips: none -> central, one -> attached star,
// both -> dust.
inline Decomposition decompose(const MultiGraph& g) {
  Decomposition d;
  d.central.multiplicities = g.multiplicities;
  std::map<label_t, std::uint64_t> star_counts;
  for (auto& b : g.blip_edges) {
    switch (b.kind) {
      case BlipEdge::Kind::star: ++star_counts[b.center]; break;
      case BlipEdge::Kind::dust_edge: ++d.dust_edges; break;
      case BlipEdge::Kind::dust_loop: ++d.dust_loops; break;
    }
  }
  d.stars.assign(star_counts.begin(), star_counts.end());
  return d;
}

// Blow-up: every vertex repeated m times, adjacency inherited.
inline SimpleGraph blowup(const SimpleGraph& g, std::size_t m) {
  if (m == 0) throw parameter_error("blowup: m >= 1");
  auto vs = g.vertices();
  std::unordered_map<label_t, std::size_t> rank;
  for (std::size_t i = 0; i < vs.size(); ++i) rank[vs[i]] = i;
  SimpleGraph out;
  for (auto [i, j] : g.sorted_edges()) {
    for (std::size_t a = 0; a < m; ++a)
      for (std::size_t b = 0; b < m; ++b)
        out.add_edge(static_cast<label_t>(rank[i] * m + a + 1),
                     static_cast<label_t>(rank[j] * m + b + 1));
  }
  return out;
}

inline std::uint64_t triangle_count(const SimpleGraph& g) {
  auto vs = g.vertices();
  std::unordered_map<label_t, std::uint32_t> rank;
  for (std::size_t i = 0; i < vs.size(); ++i) rank[vs[i]] = static_cast<std::uint32_t>(i);
  std::vector<std::vector<std::uint32_t>> adj(vs.size());
  for (auto [i, j] : g.sorted_edges()) {
    auto a = rank[i], b = rank[j];
    if (a > b) std::swap(a, b);
    adj[a].push_back(b);  // orient low -> high, then count merged wedges
  }
  for (auto& v : adj) std::sort(v.begin(), v.end());
  std::uint64_t tri = 0;
  for (std::size_t a = 0; a < adj.size(); ++a) {
    for (auto b : adj[a]) {
      auto &A = adj[a], &B = adj[b];
      std::size_t x = 0, y = 0;
      while (x < A.size() && y < B.size()) {
        if (A[x] < B[y]) ++x;
        else if (A[x] > B[y]) ++y;
        else { ++tri; ++x; ++y; }
      }
    }
  }
  return tri;
}

// Text edge list: "i<TAB>j<TAB>multiplicity", blip edges with a "b" prefix.
inline void write_edge_list(std::ostream& os, const MultiGraph& g) {
  std::vector<std::uint64_t> ks;
  ks.reserve(g.multiplicities.size());
  for (auto& [k, c] : g.multiplicities) ks.push_back(k);
  std::sort(ks.begin(), ks.end());
  for (auto k : ks) {
    auto [i, j] = unpack_pair(k);
    os << i << '\t' << j << '\t' << g.multiplicities.at(k) << '\n';
  }
  for (auto& b : g.blip_edges) {
    switch (b.kind) {
      case BlipEdge::Kind::star: os << 'b' << '\t' << b.center << '\t' << b.blip_a << "\t1\n"; break;
      case BlipEdge::Kind::dust_edge: os << 'b' << '\t' << b.blip_a << '\t' << b.blip_b << "\t1\n"; break;
      case BlipEdge::Kind::dust_loop: os << 'b' << '\t' << b.blip_a << '\t' << b.blip_a << "\t1\n"; break;
    }
  }
}

inline void write_edge_list(std::ostream& os, const SimpleGraph& g) {
  for (auto [i, j] : g.sorted_edges()) os << i << '\t' << j << "\t1\n";
}

}  // namespace edgex
