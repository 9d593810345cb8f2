#include "ergode/structure.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <set>

namespace ergode {

std::vector<std::size_t> ClassStructure::closed_class_ids() const {
  std::vector<std::size_t> ids;
  for (const auto& c : classes)
    if (c.closed) ids.push_back(c.id);
  return ids;
}

namespace {

constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();

// Strongly connected components of the positive-transition digraph. Iterative
// Tarjan with an explicit frame stack; recursion depth would scale with N.
std::vector<std::vector<std::size_t>> tarjan_sccs(const StochasticMatrix& P) {
  const std::size_t n = P.size();
  std::vector<std::size_t> index(n, kUnvisited), lowlink(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> sccs;
  std::size_t next_index = 0;

  struct Frame {
    std::size_t v;
    std::size_t edge;
  };
  std::vector<Frame> frames;

  for (std::size_t root = 0; root < n; ++root) {
    if (index[root] != kUnvisited) continue;
    index[root] = lowlink[root] = next_index++;
    stack.push_back(root);
    on_stack[root] = true;
    frames.push_back({root, 0});

    while (!frames.empty()) {
      Frame& fr = frames.back();
      const auto& row = P.row(fr.v);
      if (fr.edge < row.size()) {
        const std::size_t w = row[fr.edge].col;
        ++fr.edge;
        if (index[w] == kUnvisited) {
          index[w] = lowlink[w] = next_index++;
          stack.push_back(w);
          on_stack[w] = true;
          frames.push_back({w, 0});
        } else if (on_stack[w]) {
          lowlink[fr.v] = std::min(lowlink[fr.v], index[w]);
        }
      } else {
        const std::size_t v = fr.v;
        frames.pop_back();
        if (!frames.empty()) lowlink[frames.back().v] = std::min(lowlink[frames.back().v], lowlink[v]);
        if (lowlink[v] == index[v]) {
          std::vector<std::size_t> scc;
          for (;;) {
            const std::size_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            scc.push_back(w);
            if (w == v) break;
          }
          std::sort(scc.begin(), scc.end());
          sccs.push_back(std::move(scc));
        }
      }
    }
  }
  return sccs;
}

}  // namespace

ClassStructure communicating_classes(const StochasticMatrix& P) {
  const std::size_t n = P.size();
  auto sccs = tarjan_sccs(P);
  const std::size_t n_classes = sccs.size();

  std::vector<std::size_t> scc_of(n, 0);
  for (std::size_t c = 0; c < n_classes; ++c)
    for (std::size_t v : sccs[c]) scc_of[v] = c;

  // Closed iff no member has positive probability out of the class; also
  // collect the condensation edges for the topological ordering.
  std::vector<bool> closed(n_classes, true);
  std::vector<std::set<std::size_t>> out_edges(n_classes);
  for (std::size_t v = 0; v < n; ++v) {
    for (const auto& e : P.row(v)) {
      const std::size_t a = scc_of[v], b = scc_of[e.col];
      if (a != b) {
        closed[a] = false;
        out_edges[a].insert(b);
      }
    }
  }

  // Kahn's algorithm. Priority (closed, smallest member) puts open classes in
  // topological order first, closed classes last, deterministic throughout.
  std::vector<std::size_t> indegree(n_classes, 0);
  for (std::size_t c = 0; c < n_classes; ++c)
    for (std::size_t d : out_edges[c]) ++indegree[d];

  using Key = std::tuple<bool, std::size_t, std::size_t>;  // (closed, min member, scc)
  std::priority_queue<Key, std::vector<Key>, std::greater<>> ready;
  for (std::size_t c = 0; c < n_classes; ++c)
    if (indegree[c] == 0) ready.emplace(closed[c], sccs[c].front(), c);

  ClassStructure out;
  out.classes.reserve(n_classes);
  out.class_of.assign(n, 0);
  std::vector<std::size_t> emitted_id(n_classes, 0);
  while (!ready.empty()) {
    const auto [is_closed, min_member, c] = ready.top();
    ready.pop();
    const std::size_t id = out.classes.size();
    emitted_id[c] = id;
    out.classes.push_back(CommClass{id, std::move(sccs[c]), is_closed});
    for (std::size_t d : out_edges[c])
      if (--indegree[d] == 0) ready.emplace(closed[d], sccs[d].front(), d);
  }

  for (std::size_t v = 0; v < n; ++v) out.class_of[v] = emitted_id[scc_of[v]];
  out.classification = classify_states(out);
  return out;
}

std::vector<StateClass> classify_states(const ClassStructure& structure) {
  std::vector<StateClass> classification(structure.n_states(), StateClass::Transient);
  for (const auto& cls : structure.classes) {
    if (!cls.closed) continue;
    for (std::size_t v : cls.members) classification[v] = StateClass::PositiveRecurrent;
  }
  return classification;
}

}  // namespace ergode
