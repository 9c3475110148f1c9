#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <queue>
#include <set>
#include <utility>

namespace surgq::oracle {

Fused fuse(const std::vector<std::uint8_t>& classes, const std::vector<std::uint32_t>& sections, int width,
           int height) {
  std::map<std::uint32_t, std::map<int, int>> tallies;
  for (std::size_t i = 0; i < classes.size(); ++i) ++tallies[sections[i]][classes[i]];

  std::map<std::uint32_t, int> winner;
  for (const auto& [s, t] : tallies) {
    int best = -1, best_count = -1;
    for (const auto& [c, n] : t) {  // ascending class id, so ties keep the lowest
      if (n > best_count) {
        best = c;
        best_count = n;
      }
    }
    winner[s] = best;
  }

  std::set<std::pair<std::uint32_t, std::uint32_t>> adjacent;
  auto link = [&](std::size_t a, std::size_t b) {
    const auto sa = sections[a], sb = sections[b];
    if (sa != sb && winner[sa] == winner[sb]) {
      adjacent.insert({sa, sb});
      adjacent.insert({sb, sa});
    }
  };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      const std::size_t i = static_cast<std::size_t>(y) * width + x;
      if (x + 1 < width) link(i, i + 1);
      if (y + 1 < height) link(i, i + width);
    }
  }

  std::map<std::uint32_t, std::uint32_t> group;
  std::uint32_t groups = 0;
  for (const auto& [s, _] : winner) {
    if (group.count(s)) continue;
    std::queue<std::uint32_t> q;
    q.push(s);
    group[s] = groups;
    while (!q.empty()) {
      const auto cur = q.front();
      q.pop();
      for (auto it = adjacent.lower_bound({cur, 0}); it != adjacent.end() && it->first == cur; ++it) {
        if (!group.count(it->second)) {
          group[it->second] = groups;
          q.push(it->second);
        }
      }
    }
    ++groups;
  }

  Fused out;
  std::map<std::uint32_t, std::uint32_t> renumber;
  for (std::size_t i = 0; i < classes.size(); ++i) {
    out.classes.push_back(static_cast<std::uint8_t>(winner[sections[i]]));
    const auto g = group[sections[i]];
    if (!renumber.count(g)) {
      const auto next = static_cast<std::uint32_t>(renumber.size());
      renumber[g] = next;
    }
    out.sections.push_back(renumber[g]);
  }
  return out;
}

double f1(const std::vector<std::uint8_t>& pred, const std::vector<std::uint8_t>& truth, int cls) {
  double tp = 0, fp = 0, fn = 0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const bool p = pred[i] == cls, t = truth[i] == cls;
    if (p && t) tp += 1;
    if (p && !t) fp += 1;
    if (!p && t) fn += 1;
  }
  if (tp + fp + fn == 0) return -1.0;
  if (tp == 0) return 0.0;
  const double precision = tp / (tp + fp);
  const double recall = tp / (tp + fn);
  return 2 * precision * recall / (precision + recall);
}

double one_hot_mse(const std::vector<std::uint8_t>& a, const std::vector<std::uint8_t>& b) {
  double sum = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (int c = 0; c < 9; ++c) {
      const double d = (a[i] == c ? 1.0 : 0.0) - (b[i] == c ? 1.0 : 0.0);
      sum += d * d;
    }
  }
  return sum / (static_cast<double>(a.size()) * 9.0);
}

std::vector<double> similarity_signal(const std::vector<std::vector<double>>& rows, int w) {
  const int t_count = static_cast<int>(rows.size());
  std::vector<std::vector<double>> sim(t_count, std::vector<double>(t_count));
  for (int i = 0; i < t_count; ++i) {
    for (int j = 0; j < t_count; ++j) {
      double dot = 0, ni = 0, nj = 0;
      for (std::size_t d = 0; d < rows[i].size(); ++d) {
        dot += rows[i][d] * rows[j][d];
        ni += rows[i][d] * rows[i][d];
        nj += rows[j][d] * rows[j][d];
      }
      sim[i][j] = dot / (std::sqrt(ni) * std::sqrt(nj));
    }
  }
  std::vector<double> out;
  for (int t = 0; t < t_count; ++t) {
    const int lo = std::max(0, t - w), hi = std::min(t_count - 1, t + w);
    double sum = 0;
    int pairs = 0;
    for (int i = lo; i <= hi; ++i) {
      for (int j = i + 1; j <= hi; ++j) {
        sum += sim[i][j];
        ++pairs;
      }
    }
    out.push_back(pairs == 0 ? 1.0 : sum / pairs);
  }
  return out;
}

std::vector<RankedFrame> brute_force_rank(const std::vector<OracleFrame>& frames,
                                          const std::vector<std::uint8_t>& query) {
  std::vector<RankedFrame> out;
  for (const auto& f : frames) out.push_back({f.video, f.index, one_hot_mse(f.cells, query)});
  std::sort(out.begin(), out.end(), [](const RankedFrame& a, const RankedFrame& b) {
    if (a.distance != b.distance) return a.distance < b.distance;
    if (a.video != b.video) return a.video < b.video;
    return a.index < b.index;
  });
  return out;
}

std::vector<std::uint8_t> random_labels(int width, int height, int classes, std::mt19937_64& rng, int block) {
  std::uniform_int_distribution<int> pick(0, classes - 1);
  const int bw = (width + block - 1) / block, bh = (height + block - 1) / block;
  std::vector<int> coarse(static_cast<std::size_t>(bw) * bh);
  for (auto& c : coarse) c = pick(rng);
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height);
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      out[static_cast<std::size_t>(y) * width + x] = static_cast<std::uint8_t>(coarse[(y / block) * bw + x / block]);
    }
  }
  return out;
}

}  // namespace surgq::oracle
