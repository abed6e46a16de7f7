// Primal network simplex over an artificial-root starting basis. The arc set
// is kept partitioned into the basis tree T and the non-tree sets L (flow 0)
// and U (flow at capacity); pivots cancel the negative cycle the entering arc
// closes. Entering rule: block search, most negative reduced cost per block.
// Leaving rule: last blocking arc from the apex, which keeps the basis
// strongly feasible and rules out cycling.

#include <algorithm>
#include <cassert>
#include <cmath>

#include "mcfsel/solvers.hpp"
#include "solver_internal.hpp"

namespace mcfsel {

namespace {

enum ArcState : char { kTree = 0, kLower = 1, kUpper = 2 };

struct Simplex {
  // extended graph: original arcs then one artificial arc per vertex
  std::vector<Vertex> tail, head;
  std::vector<std::int64_t> cost, cap, flow;
  std::vector<char> state;
  std::int64_t num_original;
  Vertex root;

  std::vector<Vertex> parent;
  std::vector<std::int64_t> pred_arc;
  std::vector<std::int32_t> depth;
  Potentials pi;
  std::vector<std::vector<std::int64_t>> tree_adj;  // tree arc ids per vertex

  std::int64_t block_size = 0;
  std::int64_t scan_start = 0;

  detail::LoopGuard guard;

  Simplex(const Instance& instance, const SolveOptions& options) : guard(options) {
    const Vertex n = instance.num_vertices();
    num_original = instance.num_arcs();
    root = n;
    const std::int64_t total = num_original + n;
    tail.reserve(total);
    head.reserve(total);
    cost.reserve(total);
    cap.reserve(total);
    for (const Arc& a : instance.arcs()) {
      tail.push_back(a.tail);
      head.push_back(a.head);
      cost.push_back(a.cost);
      cap.push_back(a.capacity);
    }
    flow.assign(static_cast<std::size_t>(total), 0);
    state.assign(static_cast<std::size_t>(total), kLower);

    // Artificial star basis: cost M beats any real path, so artificial arcs
    // carry flow at the optimum only if the instance is infeasible.
    const std::int64_t big_m = 1 + static_cast<std::int64_t>(n) * instance.max_cost();
    const std::int64_t art_cap = instance.total_supply() + 1;
    parent.assign(static_cast<std::size_t>(n) + 1, -1);
    pred_arc.assign(static_cast<std::size_t>(n) + 1, -1);
    depth.assign(static_cast<std::size_t>(n) + 1, 0);
    pi.assign(static_cast<std::size_t>(n) + 1, 0);
    tree_adj.assign(static_cast<std::size_t>(n) + 1, {});
    for (Vertex v = 0; v < n; ++v) {
      const std::int64_t b = instance.supply(v);
      const std::int64_t arc_id = num_original + v;
      if (b >= 0) {
        tail.push_back(v);
        head.push_back(root);
      } else {
        tail.push_back(root);
        head.push_back(v);
      }
      cost.push_back(big_m);
      cap.push_back(art_cap);
      flow[static_cast<std::size_t>(arc_id)] = b >= 0 ? b : -b;
      state[static_cast<std::size_t>(arc_id)] = kTree;
      parent[static_cast<std::size_t>(v)] = root;
      pred_arc[static_cast<std::size_t>(v)] = arc_id;
      depth[static_cast<std::size_t>(v)] = 1;
      pi[static_cast<std::size_t>(v)] = b >= 0 ? -big_m : big_m;
      tree_adj[static_cast<std::size_t>(v)].push_back(arc_id);
      tree_adj[static_cast<std::size_t>(root)].push_back(arc_id);
    }
    block_size = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(total)))));
  }

  std::int64_t reduced(std::int64_t a) const {
    return cost[static_cast<std::size_t>(a)] + pi[static_cast<std::size_t>(tail[static_cast<std::size_t>(a)])] -
           pi[static_cast<std::size_t>(head[static_cast<std::size_t>(a)])];
  }

  // Most negative violation within successive blocks, cyclic scan.
  std::int64_t find_entering() {
    const std::int64_t total = static_cast<std::int64_t>(tail.size());
    std::int64_t best = -1;
    std::int64_t best_violation = 0;
    std::int64_t examined = 0;
    std::int64_t a = scan_start;
    while (examined < total) {
      for (std::int64_t i = 0; i < block_size && examined < total; ++i, ++examined) {
        const char s = state[static_cast<std::size_t>(a)];
        if (s != kTree) {
          const std::int64_t rc = reduced(a);
          const std::int64_t violation = s == kLower ? -rc : rc;
          if (violation > best_violation) {
            best_violation = violation;
            best = a;
          }
        }
        if (++a == total) a = 0;
      }
      if (best >= 0) {
        scan_start = a;
        return best;
      }
    }
    return -1;
  }

  struct CycleArc {
    std::int64_t arc;
    bool forward;  // traversal direction matches the arc direction
  };

  std::int64_t residual(const CycleArc& c) const {
    return c.forward ? cap[static_cast<std::size_t>(c.arc)] - flow[static_cast<std::size_t>(c.arc)]
                     : flow[static_cast<std::size_t>(c.arc)];
  }

  bool in_subtree(Vertex v, Vertex sub_root) const {
    while (v != root && v != sub_root) v = parent[static_cast<std::size_t>(v)];
    return v == sub_root;
  }

  void pivot(std::int64_t entering) {
    // Augmenting orientation: a LOWER arc gains flow tail->head, an UPPER arc
    // loses flow, i.e. the cycle traverses it head->tail.
    const bool from_lower = state[static_cast<std::size_t>(entering)] == kLower;
    const Vertex first = from_lower ? tail[static_cast<std::size_t>(entering)]
                                    : head[static_cast<std::size_t>(entering)];
    const Vertex second = from_lower ? head[static_cast<std::size_t>(entering)]
                                     : tail[static_cast<std::size_t>(entering)];

    Vertex u = first, v = second;
    while (depth[static_cast<std::size_t>(u)] > depth[static_cast<std::size_t>(v)])
      u = parent[static_cast<std::size_t>(u)];
    while (depth[static_cast<std::size_t>(v)] > depth[static_cast<std::size_t>(u)])
      v = parent[static_cast<std::size_t>(v)];
    while (u != v) {
      u = parent[static_cast<std::size_t>(u)];
      v = parent[static_cast<std::size_t>(v)];
    }
    const Vertex apex = u;

    // Ordered cycle starting at the apex, in augmenting orientation:
    // apex -> first (down), entering arc, second -> apex (up).
    std::vector<CycleArc> cycle;
    {
      std::vector<CycleArc> down;
      for (Vertex x = first; x != apex; x = parent[static_cast<std::size_t>(x)]) {
        const std::int64_t a = pred_arc[static_cast<std::size_t>(x)];
        // traversed parent -> x; forward iff the arc points down to x
        down.push_back({a, head[static_cast<std::size_t>(a)] == x});
      }
      cycle.assign(down.rbegin(), down.rend());
    }
    cycle.push_back({entering, from_lower});
    for (Vertex x = second; x != apex; x = parent[static_cast<std::size_t>(x)]) {
      const std::int64_t a = pred_arc[static_cast<std::size_t>(x)];
      // traversed x -> parent; forward iff the arc points up from x
      cycle.push_back({a, tail[static_cast<std::size_t>(a)] == x});
    }

    std::int64_t delta = kInfDistance;
    for (const CycleArc& c : cycle) delta = std::min(delta, residual(c));
    std::size_t leaving_pos = 0;
    for (std::size_t i = 0; i < cycle.size(); ++i) {
      if (residual(cycle[i]) == delta) leaving_pos = i;  // last blocking arc
    }
    if (delta > 0) {
      for (const CycleArc& c : cycle) {
        flow[static_cast<std::size_t>(c.arc)] += c.forward ? delta : -delta;
      }
    }

    const std::int64_t leaving = cycle[leaving_pos].arc;
    if (leaving == entering) {
      state[static_cast<std::size_t>(entering)] = from_lower ? kUpper : kLower;
      return;
    }

    // Structural pivot: drop the leaving arc, attach the entering arc, and
    // rebuild parent/depth/potentials for the detached subtree.
    const Vertex leaf_parent =
        depth[static_cast<std::size_t>(tail[static_cast<std::size_t>(leaving)])] <
                depth[static_cast<std::size_t>(head[static_cast<std::size_t>(leaving)])]
            ? tail[static_cast<std::size_t>(leaving)]
            : head[static_cast<std::size_t>(leaving)];
    const Vertex sub_root = leaf_parent == tail[static_cast<std::size_t>(leaving)]
                                ? head[static_cast<std::size_t>(leaving)]
                                : tail[static_cast<std::size_t>(leaving)];

    state[static_cast<std::size_t>(leaving)] =
        flow[static_cast<std::size_t>(leaving)] == 0 ? kLower : kUpper;
    detach_adj(leaving, tail[static_cast<std::size_t>(leaving)]);
    detach_adj(leaving, head[static_cast<std::size_t>(leaving)]);

    const Vertex e_tail = tail[static_cast<std::size_t>(entering)];
    const Vertex e_head = head[static_cast<std::size_t>(entering)];
    const Vertex attach_in = in_subtree_detached(e_tail, sub_root) ? e_tail : e_head;
    const Vertex attach_out = attach_in == e_tail ? e_head : e_tail;

    state[static_cast<std::size_t>(entering)] = kTree;
    tree_adj[static_cast<std::size_t>(e_tail)].push_back(entering);
    tree_adj[static_cast<std::size_t>(e_head)].push_back(entering);

    // DFS over the subtree from its new attachment point.
    parent[static_cast<std::size_t>(attach_in)] = attach_out;
    pred_arc[static_cast<std::size_t>(attach_in)] = entering;
    rebuild_subtree(attach_in);
  }

  void detach_adj(std::int64_t arc, Vertex v) {
    auto& list = tree_adj[static_cast<std::size_t>(v)];
    list.erase(std::find(list.begin(), list.end(), arc));
  }

  // Membership test against the subtree hanging below sub_root. Called after
  // the leaving arc is removed from the adjacency but while parent pointers
  // are still the old ones, which is exactly what the walk needs.
  bool in_subtree_detached(Vertex v, Vertex sub_root) const { return in_subtree(v, sub_root); }

  void rebuild_subtree(Vertex start) {
    std::vector<Vertex> stack = {start};
    {
      const std::int64_t a = pred_arc[static_cast<std::size_t>(start)];
      const Vertex p = parent[static_cast<std::size_t>(start)];
      depth[static_cast<std::size_t>(start)] = depth[static_cast<std::size_t>(p)] + 1;
      pi[static_cast<std::size_t>(start)] =
          tail[static_cast<std::size_t>(a)] == p
              ? pi[static_cast<std::size_t>(p)] + cost[static_cast<std::size_t>(a)]
              : pi[static_cast<std::size_t>(p)] - cost[static_cast<std::size_t>(a)];
    }
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      for (std::int64_t a : tree_adj[static_cast<std::size_t>(x)]) {
        const Vertex w = tail[static_cast<std::size_t>(a)] == x
                             ? head[static_cast<std::size_t>(a)]
                             : tail[static_cast<std::size_t>(a)];
        if (w == parent[static_cast<std::size_t>(x)] &&
            a == pred_arc[static_cast<std::size_t>(x)]) {
          continue;
        }
        parent[static_cast<std::size_t>(w)] = x;
        pred_arc[static_cast<std::size_t>(w)] = a;
        depth[static_cast<std::size_t>(w)] = depth[static_cast<std::size_t>(x)] + 1;
        pi[static_cast<std::size_t>(w)] =
            tail[static_cast<std::size_t>(a)] == x
                ? pi[static_cast<std::size_t>(x)] + cost[static_cast<std::size_t>(a)]
                : pi[static_cast<std::size_t>(x)] - cost[static_cast<std::size_t>(a)];
        stack.push_back(w);
      }
    }
  }

  void check_basis_invariants() const {
    std::size_t tree_count = 0;
    for (std::size_t a = 0; a < state.size(); ++a) {
      if (flow[a] < 0 || flow[a] > cap[a]) {
        throw std::logic_error("ns invariant: flow outside bounds");
      }
      switch (state[a]) {
        case kTree: ++tree_count; break;
        case kLower:
          if (flow[a] != 0) throw std::logic_error("ns invariant: L arc with nonzero flow");
          break;
        case kUpper:
          if (flow[a] != cap[a]) throw std::logic_error("ns invariant: U arc not at capacity");
          break;
      }
    }
    if (tree_count != pi.size() - 1) {  // |T| = n counting the artificial root
      throw std::logic_error("ns invariant: tree size mismatch");
    }
  }

  SpanningTreeBasis snapshot_basis() const {
    SpanningTreeBasis basis;
    for (std::size_t a = 0; a < state.size(); ++a) {
      switch (state[a]) {
        case kTree: basis.tree_arcs.push_back(static_cast<std::int64_t>(a)); break;
        case kLower: basis.lower_set.push_back(static_cast<std::int64_t>(a)); break;
        case kUpper: basis.upper_set.push_back(static_cast<std::int64_t>(a)); break;
      }
    }
    basis.parent = parent;
    basis.depth = depth;
    // Preorder thread over the current tree, cyclic through the root.
    basis.thread.assign(parent.size(), -1);
    std::vector<Vertex> order;
    order.reserve(parent.size());
    std::vector<Vertex> stack = {root};
    std::vector<std::vector<Vertex>> children(parent.size());
    for (std::size_t v = 0; v < parent.size(); ++v) {
      if (parent[v] >= 0) children[static_cast<std::size_t>(parent[v])].push_back(static_cast<Vertex>(v));
    }
    while (!stack.empty()) {
      const Vertex x = stack.back();
      stack.pop_back();
      order.push_back(x);
      for (auto it = children[static_cast<std::size_t>(x)].rbegin();
           it != children[static_cast<std::size_t>(x)].rend(); ++it) {
        stack.push_back(*it);
      }
    }
    for (std::size_t i = 0; i < order.size(); ++i) {
      basis.thread[static_cast<std::size_t>(order[i])] = order[(i + 1) % order.size()];
    }
    return basis;
  }
};

}  // namespace

SolveResult solve_ns(const Instance& instance, const SolveOptions& options) {
  if (instance.supply_imbalance() != 0) return detail::infeasible_result(0);
  Simplex simplex(instance, options);

  for (;;) {
    simplex.guard.on_iteration();
    const std::int64_t entering = simplex.find_entering();
    if (entering < 0) break;
    simplex.pivot(entering);
    if (options.check_invariants) simplex.check_basis_invariants();
    if (options.ns_basis_trace) options.ns_basis_trace->push_back(simplex.snapshot_basis());
  }

  for (std::int64_t a = simplex.num_original;
       a < static_cast<std::int64_t>(simplex.flow.size()); ++a) {
    if (simplex.flow[static_cast<std::size_t>(a)] > 0) {
      return detail::infeasible_result(simplex.guard.iterations);
    }
  }
  Flow flow(simplex.flow.begin(), simplex.flow.begin() + simplex.num_original);
  return detail::optimal_result(instance, std::move(flow), simplex.guard.iterations);
}

}  // namespace mcfsel
