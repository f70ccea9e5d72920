#include "laser/stn.hpp"

#include <deque>

namespace laser {

std::optional<std::vector<Seconds>> Stn::earliest() const {
  std::vector<Seconds> dist(num_vars_, 0);
  std::vector<std::vector<std::pair<int, Seconds>>> out(num_vars_);
  for (const Edge& e : edges_) {
    if (e.from < 0) {
      if (e.weight > dist[e.to]) dist[e.to] = e.weight;
    } else {
      out[e.from].push_back({e.to, e.weight});
    }
  }

  // SPFA-style longest-path relaxation; a node relaxed more than |V| times
  // lies on a positive cycle.
  std::deque<int> queue;
  std::vector<char> in_queue(num_vars_, 1);
  std::vector<int> relax_count(num_vars_, 0);
  for (int v = 0; v < num_vars_; ++v) queue.push_back(v);

  while (!queue.empty()) {
    int u = queue.front();
    queue.pop_front();
    in_queue[u] = 0;
    Seconds du = dist[u];
    for (const auto& [v, w] : out[u]) {
      if (du + w > dist[v]) {
        dist[v] = du + w;
        if (++relax_count[v] > num_vars_ + 1) return std::nullopt;
        if (!in_queue[v]) {
          in_queue[v] = 1;
          queue.push_back(v);
        }
      }
    }
  }
  for (const auto& [x, c] : ubs_)
    if (dist[x] > c) return std::nullopt;
  return dist;
}

}  // namespace laser
