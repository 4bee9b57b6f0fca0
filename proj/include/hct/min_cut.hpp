#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <vector>

namespace hct {

struct MinCut {
  std::int64_t weight = 0;
  std::vector<int> side;  // vertices on one side, sorted
};

// Stoer-Wagner global minimum cut on a dense symmetric weight matrix.
// Deterministic: every phase starts at vertex 0, the most tightly connected
// vertex is the lowest index among ties, and the first minimum phase wins.
inline MinCut stoer_wagner(std::vector<std::vector<std::int64_t>> w) {
  const int n = static_cast<int>(w.size());
  if (n < 2) throw std::invalid_argument("min cut needs at least 2 vertices");
  std::vector<std::vector<int>> merged(n);
  for (int i = 0; i < n; ++i) merged[i] = {i};
  std::vector<int> alive(n);
  for (int i = 0; i < n; ++i) alive[i] = i;

  MinCut best;
  best.weight = std::numeric_limits<std::int64_t>::max();
  std::vector<std::int64_t> conn(n);
  std::vector<char> added(n);
  while (alive.size() > 1) {
    for (int v : alive) {
      conn[v] = 0;
      added[v] = 0;
    }
    int prev = -1, last = alive[0];
    for (std::size_t step = 0; step < alive.size(); ++step) {
      int pick = step == 0 ? alive[0] : -1;
      if (step > 0)
        for (int v : alive) {
          if (added[v]) continue;
          if (pick < 0 || conn[v] > conn[pick]) pick = v;
        }
      if (pick < 0) break;
      added[pick] = 1;
      prev = last;
      last = pick;
      for (int v : alive)
        if (!added[v]) conn[v] += w[pick][v];
    }
    std::int64_t phase = 0;
    for (int v : alive)
      if (v != last) phase += w[last][v];
    if (phase < best.weight) {
      best.weight = phase;
      best.side = merged[last];
    }
    // merge last into prev
    for (int v : alive) {
      w[prev][v] += w[last][v];
      w[v][prev] = w[prev][v];
    }
    w[prev][prev] = 0;
    merged[prev].insert(merged[prev].end(), merged[last].begin(), merged[last].end());
    std::erase(alive, last);
  }
  std::sort(best.side.begin(), best.side.end());
  return best;
}

}  // namespace hct
