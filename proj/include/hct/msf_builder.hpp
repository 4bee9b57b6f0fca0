#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hct/builder.hpp"
#include "hct/msf.hpp"

namespace hct {

// One returned list per cut round, blue edge ids in emission order.
using PhaseLog = std::vector<std::vector<EdgeId>>;

struct MsfBuildOptions {
  MsfBackendKind backend = MsfBackendKind::kNaive;
  bool debug_checks = false;                 // assert the phase invariants
  std::vector<std::string>* trace = nullptr;  // "del <id> kind=<blue|red> replaced=<id|none>"
};

struct MsfBuildResult {
  BuildOutcome outcome;
  PhaseLog phases;
};

namespace detail {

inline void delete_traced(MsfBackend& b, const CoupledGraph& g, EdgeId e, std::vector<std::string>* trace) {
  auto rep = b.delete_edge(e);
  if (trace) {
    trace->push_back("del " + std::to_string(e) + " kind=" + (g.is_blue(e) ? "blue" : "red") +
                     " replaced=" + (rep ? std::to_string(*rep) : std::string("none")));
  }
}

// Components of the live blue edges, as a root id per point.
inline std::vector<int> blue_components(const MsfBackend& b, const CoupledGraph& g) {
  UnionFind uf(g.num_points);
  for (std::size_t i = 0; i < g.num_constraints; ++i) {
    auto e = static_cast<EdgeId>(i);
    if (b.alive(e)) uf.unite(g.edges[e].u, g.edges[e].v);
  }
  std::vector<int> out(g.num_points);
  for (std::size_t p = 0; p < g.num_points; ++p) out[p] = uf.find(static_cast<int>(p));
  return out;
}

inline bool same_partition(const std::vector<int>& a, UnionFind& uf) {
  // same partition iff both labelings induce identical equalities; compare
  // via the first member seen for each class
  const std::size_t n = a.size();
  std::vector<int> rep_a(n, -1), rep_b(n, -1);
  for (std::size_t p = 0; p < n; ++p) {
    int ra = a[p], rb = uf.find(static_cast<int>(p));
    if (rep_a[ra] < 0) rep_a[ra] = static_cast<int>(p);
    if (rep_b[rb] < 0) rep_b[rb] = static_cast<int>(p);
    if (rep_a[ra] != rep_b[rb]) return false;
  }
  return true;
}

}  // namespace detail

// While the heaviest forest edge is red: delete it and queue its blue twin.
// Then delete the queued blue edges and return them.
inline std::vector<EdgeId> cut_inter_component_edges(MsfBackend& backend, const CoupledGraph& g,
                                                     std::vector<std::string>* trace = nullptr) {
  std::vector<EdgeId> del;
  while (true) {
    auto h = backend.heaviest_msf_edge();
    if (!h || g.is_blue(*h)) break;
    detail::delete_traced(backend, g, *h, trace);
    del.push_back(g.blue_of(*h));
  }
  for (EdgeId e : del) detail::delete_traced(backend, g, e, trace);
  return del;
}

// Two-phase construction: peel blue edges round by round with the forest,
// then merge them back in reverse order with a union-find.
inline MsfBuildResult build_via_msf(const OrientedSet& set, const MsfBuildOptions& opt = {}) {
  const std::size_t n = set.points.size();
  if (n == 0) throw std::invalid_argument("cannot build a tree over zero points");
  CoupledGraph g = build_coupled_graph(set);
  auto backend = make_msf_backend(opt.backend, g);
  PhaseLog phases;
  std::vector<std::vector<int>> snapshots;  // blue components at each round start

  while (backend->msf_size() > 0) {
    std::vector<int> comps;
    if (opt.debug_checks) comps = detail::blue_components(*backend, g);
    auto list = cut_inter_component_edges(*backend, g, opt.trace);
    if (list.empty()) {
      auto w = find_closed_set(set, false);
      if (!w) throw std::logic_error("forest builder rejected a satisfiable set");
      return {BuildOutcome::reject(std::move(*w)), std::move(phases)};
    }
    if (opt.debug_checks) {
      for (EdgeId b : list) {
        const auto& red = g.edges[g.red_of(b)];
        if (comps[red.u] == comps[red.v])
          throw std::logic_error("deleted red edge " + std::to_string(g.red_of(b)) + " inside a blue component");
      }
      snapshots.push_back(std::move(comps));
    }
    phases.push_back(std::move(list));
  }

  TreeBuilder tb(n);
  std::vector<NodeId> top(n);
  for (std::size_t p = 0; p < n; ++p) top[p] = tb.add_leaf(static_cast<Point>(p));
  UnionFind uf(n);
  for (std::size_t j = phases.size(); j-- > 0;) {
    const auto& list = phases[j];
    for (auto it = list.rbegin(); it != list.rend(); ++it) {
      const auto& e = g.edges[*it];
      int rx = uf.find(e.u), ry = uf.find(e.v);
      if (rx == ry) continue;
      NodeId joined = tb.add_internal({top[rx], top[ry]});
      uf.unite(rx, ry);
      top[uf.find(rx)] = joined;
    }
    if (opt.debug_checks && !detail::same_partition(snapshots[j], uf))
      throw std::logic_error("merge round " + std::to_string(j) + " disagrees with the peel snapshot");
  }
  // leftover trees in order of their smallest point, joined by a comb
  NodeId root = kNoNode;
  std::vector<char> used(n, 0);
  for (std::size_t p = 0; p < n; ++p) {
    int r = uf.find(static_cast<int>(p));
    if (used[r]) continue;
    used[r] = 1;
    root = root == kNoNode ? top[r] : tb.add_internal({root, top[r]});
  }
  return {BuildOutcome::accept(std::move(tb).build(root, Arity::kBinary)), std::move(phases)};
}

// k-tuples with binary shapes, reduced to their triplets.
inline MsfBuildResult build_ktuple_via_msf(const OrientedSet& set, const MsfBuildOptions& opt = {}) {
  OrientedSet flat;
  flat.points = set.points;
  std::size_t k = 0;
  for (const auto& c : set.constraints) {
    if (!c.is_ktuple()) throw std::invalid_argument("expected k-tuple constraints only");
    if (k == 0) k = c.arity();
    if (c.arity() != k) throw std::invalid_argument("mixed tuple sizes");
    if (!c.as_ktuple().shape.is_binary()) throw std::invalid_argument("k-tuple shape is not binary");
    for (auto& r : reduce_ktuple(c)) flat.constraints.push_back(std::move(r));
  }
  return build_via_msf(flat, opt);
}

}  // namespace hct
