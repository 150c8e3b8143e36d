#include "tricluster/merge_state.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <tuple>

#include <absl/container/flat_hash_set.h>

#include "cost_terms.hpp"
#include "tricluster/criterion.hpp"
#include "tricluster/errors.hpp"

namespace tricluster {

namespace {

// The two axes other than `axis`, ascending. View keys of `axis` pack them in this order.
constexpr std::array<std::array<int, 2>, 3> kOthers{{{1, 2}, {0, 2}, {0, 1}}};

inline std::uint64_t pack(std::uint32_t hi, std::uint32_t lo) {
  return (static_cast<std::uint64_t>(hi) << 32) | lo;
}
inline std::uint32_t hi_of(std::uint64_t key) { return static_cast<std::uint32_t>(key >> 32); }
inline std::uint32_t lo_of(std::uint64_t key) { return static_cast<std::uint32_t>(key); }

inline std::uint64_t key_of(int axis, const std::array<std::uint32_t, 3>& c) {
  return pack(c[kOthers[axis][0]], c[kOthers[axis][1]]);
}

// Change of the interaction sum of a pair of cells (p, q) when two slices merge.
inline double merged_pair_change(std::int64_t keep_p, std::int64_t gone_p, std::int64_t keep_q,
                                 std::int64_t gone_q) {
  return detail::pair_gain(keep_p + gone_p, keep_q + gone_q) - detail::pair_gain(keep_p, keep_q) -
         detail::pair_gain(gone_p, gone_q);
}

}  // namespace

MergeState::MergeState(const Triclustering& model) : base_(model), m_(model.num_edges()) {
  universe_ = {static_cast<std::int64_t>(model.num_sources()),
               static_cast<std::int64_t>(model.num_destinations())};
  k_ = {model.k_sources(), model.k_destinations(), model.k_time()};
  for (int x = 0; x < 3; ++x) {
    const auto k = k_[x];
    alive_[x].assign(k, 1);
    auto marg = model.marginals(static_cast<Axis>(x));
    marginal_[x].assign(marg.begin(), marg.end());
    view_[x].resize(k);
    rep_[x].resize(k);
    std::iota(rep_[x].begin(), rep_[x].end(), 0u);
    members_[x].resize(k);
    for (std::uint32_t c = 0; c < k; ++c) members_[x][c] = {c};
  }
  auto ss = model.source_cluster_sizes();
  auto ds = model.destination_cluster_sizes();
  size_[0].assign(ss.begin(), ss.end());
  size_[1].assign(ds.begin(), ds.end());

  for (const auto& cell : model.cells()) {
    const std::array<std::uint32_t, 3> c{cell.i, cell.j, cell.l};
    for (int x = 0; x < 3; ++x) view_[x][c[x]][key_of(x, c)] = cell.count;
  }

  const auto kt = k_[2];
  next_.resize(kt);
  prev_.resize(kt);
  for (std::uint32_t l = 0; l < kt; ++l) {
    next_[l] = l + 1 < kt ? static_cast<std::int64_t>(l + 1) : -1;
    prev_[l] = static_cast<std::int64_t>(l) - 1;
  }

  init_vertex_gains(0);
  init_vertex_gains(1);
  init_time_gains();
  cost_ = tricluster::cost(model).total;
}

void MergeState::init_vertex_gains(int axis) {
  const auto k = k_[axis];
  const std::size_t pairs = static_cast<std::size_t>(k) * (k - 1) / 2;
  gain_[axis].assign(pairs, 0.0);
  stamp_[axis].assign(pairs, 0);

  // Cells sharing the other two coordinates form a fiber; every pair of
  // clusters inside a fiber contributes to their interaction sum.
  struct Fiber {
    std::uint64_t key;
    std::uint32_t cluster;
    std::int64_t count;
  };
  std::vector<Fiber> fibers;
  fibers.reserve(base_.cells().size());
  for (const auto& cell : base_.cells()) {
    const std::array<std::uint32_t, 3> c{cell.i, cell.j, cell.l};
    fibers.push_back({key_of(axis, c), c[axis], cell.count});
  }
  std::sort(fibers.begin(), fibers.end(), [](const Fiber& p, const Fiber& q) {
    return std::tie(p.key, p.cluster) < std::tie(q.key, q.cluster);
  });
  for (std::size_t s = 0; s < fibers.size();) {
    std::size_t e = s;
    while (e < fibers.size() && fibers[e].key == fibers[s].key) ++e;
    for (std::size_t p = s; p < e; ++p) {
      for (std::size_t q = p + 1; q < e; ++q) {
        gain_[axis][tri(fibers[p].cluster, fibers[q].cluster)] +=
            detail::pair_gain(fibers[p].count, fibers[q].count);
      }
    }
    s = e;
  }
  for (std::uint32_t b = 1; b < k; ++b) {
    for (std::uint32_t a = 0; a < b; ++a) push_vertex(axis, a, b);
  }
}

void MergeState::init_time_gains() {
  const auto kt = k_[2];
  time_gain_.assign(kt, 0.0);
  time_stamp_.assign(kt, 0);
  for (std::uint32_t l = 0; l + 1 < kt; ++l) {
    time_gain_[l] = intersect_gain(view_[2][l], view_[2][l + 1]);
    push_time(l);
  }
}

double MergeState::intersect_gain(const CellMap& x, const CellMap& y) const {
  const CellMap& small = x.size() <= y.size() ? x : y;
  const CellMap& large = x.size() <= y.size() ? y : x;
  double g = 0.0;
  for (const auto& [key, count] : small) {
    auto it = large.find(key);
    if (it != large.end()) g += detail::pair_gain(count, it->second);
  }
  return g;
}

std::int64_t MergeState::other_product(int axis) const {
  std::int64_t p = 1;
  for (int o : kOthers[axis]) p *= k_[o];
  return p;
}

double MergeState::global_delta(int axis) const {
  if (axis < 2) return detail::vertex_global_delta(universe_[axis], k_[axis], other_product(axis), m_);
  return detail::time_global_delta(k_[2], other_product(2), m_);
}

double MergeState::vertex_local(int axis, std::uint32_t a, std::uint32_t b) const {
  return detail::vertex_local_base(marginal_[axis][a], size_[axis][a], marginal_[axis][b], size_[axis][b]) -
         gain_[axis][tri(a, b)];
}

double MergeState::time_local(std::uint32_t l) const {
  const auto n = static_cast<std::uint32_t>(next_[l]);
  return detail::pair_gain(marginal_[2][l], marginal_[2][n]) - time_gain_[l];
}

void MergeState::push_vertex(int axis, std::uint32_t a, std::uint32_t b) {
  if (a > b) std::swap(a, b);
  queue_[axis].push({vertex_local(axis, a, b), a, b, stamp_[axis][tri(a, b)]});
}

void MergeState::push_time(std::uint32_t l) {
  queue_[2].push({time_local(l), l, static_cast<std::uint32_t>(next_[l]), time_stamp_[l]});
}

bool MergeState::live(int axis, const MergeCandidateQueue::Entry& e) const {
  if (!alive_[axis][e.a] || !alive_[axis][e.b]) return false;
  if (axis < 2) return stamp_[axis][tri(e.a, e.b)] == e.stamp;
  return next_[e.a] == static_cast<std::int64_t>(e.b) && time_stamp_[e.a] == e.stamp;
}

std::optional<MergeChoice> MergeState::best_merge(std::array<bool, 3> allowed) {
  std::optional<MergeChoice> best;
  for (int x = 0; x < 3; ++x) {
    if (!allowed[x] || k_[x] < 2) continue;
    auto top = queue_[x].top([&](const MergeCandidateQueue::Entry& e) { return live(x, e); });
    if (!top) continue;
    const double total = top->delta + global_delta(x);
    if (!best || total < best->delta) best = MergeChoice{static_cast<Axis>(x), top->a, top->b, total};
  }
  return best;
}

double MergeState::delta(Axis axis, std::uint32_t a, std::uint32_t b) const {
  const int x = static_cast<int>(axis);
  if (a >= alive_[x].size() || b >= alive_[x].size() || a == b || !alive_[x][a] ||
      !alive_[x][b]) {
    throw std::invalid_argument("merge on dead or invalid clusters");
  }
  if (x < 2) return vertex_local(x, a, b) + global_delta(x);
  if (next_[a] != static_cast<std::int64_t>(b)) throw OrderingError("time intervals are not adjacent");
  return time_local(a) + global_delta(2);
}

void MergeState::for_each_candidate(const std::function<void(const MergeChoice&)>& visit) const {
  for (int x = 0; x < 2; ++x) {
    if (k_[x] < 2) continue;
    const double g = global_delta(x);
    for (std::uint32_t b = 0; b < alive_[x].size(); ++b) {
      if (!alive_[x][b]) continue;
      for (std::uint32_t a = 0; a < b; ++a) {
        if (alive_[x][a]) visit({static_cast<Axis>(x), a, b, vertex_local(x, a, b) + g});
      }
    }
  }
  if (k_[2] >= 2) {
    const double g = global_delta(2);
    for (std::uint32_t l = 0; l < alive_[2].size(); ++l) {
      if (alive_[2][l] && next_[l] >= 0) {
        visit({Axis::Time, l, static_cast<std::uint32_t>(next_[l]), time_local(l) + g});
      }
    }
  }
}

void MergeState::update_cross(int axis, std::uint32_t keep, std::uint32_t gone, int other) {
  const bool other_first = kOthers[axis][0] == other;
  auto split = [&](std::uint64_t key) {
    return other_first ? std::pair{hi_of(key), lo_of(key)} : std::pair{lo_of(key), hi_of(key)};
  };

  const CellMap& keep_map = view_[axis][keep];
  const CellMap& gone_map = view_[axis][gone];
  const bool drive_by_gone = gone_map.size() <= keep_map.size();
  const CellMap& driver = drive_by_gone ? gone_map : keep_map;

  absl::flat_hash_set<std::uint32_t, StableHash> groups;
  for (const auto& [key, count] : driver) groups.insert(split(key).second);

  std::vector<Entry> entries;
  entries.reserve(gone_map.size() + keep_map.size());
  for (const auto& [key, count] : gone_map) {
    auto [y, z] = split(key);
    if (!groups.contains(z)) continue;
    auto it = keep_map.find(key);
    entries.push_back({y, z, it == keep_map.end() ? 0 : it->second, count});
  }
  for (const auto& [key, count] : keep_map) {
    auto [y, z] = split(key);
    if (!groups.contains(z) || gone_map.contains(key)) continue;
    entries.push_back({y, z, count, 0});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& p, const Entry& q) { return std::tie(p.z, p.y) < std::tie(q.z, q.y); });

  auto drives = [&](const Entry& e) { return (drive_by_gone ? e.gone : e.keep) > 0; };
  absl::flat_hash_map<std::uint64_t, double, StableHash> change;
  std::vector<std::uint64_t> order;  // first-touch order keeps pushes deterministic
  auto add = [&](std::uint64_t key, double d) {
    auto [it, inserted] = change.try_emplace(key, 0.0);
    if (inserted) order.push_back(key);
    it->second += d;
  };

  for (std::size_t s = 0; s < entries.size();) {
    std::size_t e = s;
    while (e < entries.size() && entries[e].z == entries[s].z) ++e;
    if (other < 2) {
      for (std::size_t p = s; p < e; ++p) {
        if (!drives(entries[p])) continue;
        for (std::size_t q = s; q < e; ++q) {
          if (q == p || (q < p && drives(entries[q]))) continue;
          const double d =
              merged_pair_change(entries[p].keep, entries[p].gone, entries[q].keep, entries[q].gone);
          if (d != 0.0) add(pack(std::min(entries[p].y, entries[q].y), std::max(entries[p].y, entries[q].y)), d);
        }
      }
    } else {
      for (std::size_t p = s; p + 1 < e; ++p) {
        const auto& a = entries[p];
        const auto& b = entries[p + 1];
        if (next_[a.y] != static_cast<std::int64_t>(b.y)) continue;
        const double d = merged_pair_change(a.keep, a.gone, b.keep, b.gone);
        if (d != 0.0) add(a.y, d);
      }
    }
    s = e;
  }

  for (auto key : order) {
    const double d = change[key];
    if (other < 2) {
      const auto a = hi_of(key);
      const auto b = lo_of(key);
      gain_[other][tri(a, b)] += d;
      ++stamp_[other][tri(a, b)];
      push_vertex(other, a, b);
    } else {
      const auto l = static_cast<std::uint32_t>(key);
      time_gain_[l] += d;
      ++time_stamp_[l];
      push_time(l);
    }
  }
}

void MergeState::move_cells(int axis, std::uint32_t keep, std::uint32_t gone) {
  const int o1 = kOthers[axis][0];
  const int o2 = kOthers[axis][1];
  CellMap moved;
  moved.swap(view_[axis][gone]);
  CellMap& target = view_[axis][keep];
  for (const auto& [key, count] : moved) {
    target[key] += count;
    std::array<std::uint32_t, 3> c{};
    c[axis] = gone;
    c[o1] = hi_of(key);
    c[o2] = lo_of(key);
    auto renamed = c;
    renamed[axis] = keep;
    for (int o : {o1, o2}) {
      CellMap& v = view_[o][c[o]];
      v.erase(key_of(o, c));
      v[key_of(o, renamed)] += count;
    }
  }
}

std::pair<double, std::uint32_t> MergeState::apply(Axis axis_enum, std::uint32_t a, std::uint32_t b) {
  const int axis = static_cast<int>(axis_enum);
  if (axis == 2 && next_.size() > b && next_[b] == static_cast<std::int64_t>(a)) std::swap(a, b);
  const double d = delta(axis_enum, a, b);

  std::uint32_t keep = a;
  std::uint32_t gone = b;
  if (axis < 2) {
    const auto na = view_[axis][a].size();
    const auto nb = view_[axis][b].size();
    if (nb > na || (nb == na && b < a)) std::swap(keep, gone);
  }

  for (int other = 0; other < 3; ++other) {
    if (other != axis) update_cross(axis, keep, gone, other);
  }
  move_cells(axis, keep, gone);

  marginal_[axis][keep] += marginal_[axis][gone];
  marginal_[axis][gone] = 0;
  if (axis < 2) {
    size_[axis][keep] += size_[axis][gone];
    size_[axis][gone] = 0;
  }
  alive_[axis][gone] = 0;
  --k_[axis];
  for (auto c : members_[axis][gone]) rep_[axis][c] = keep;
  members_[axis][keep].insert(members_[axis][keep].end(), members_[axis][gone].begin(),
                              members_[axis][gone].end());
  members_[axis][gone].clear();

  if (axis < 2) {
    for (std::uint32_t c = 0; c < alive_[axis].size(); ++c) {
      if (c == keep || !alive_[axis][c]) continue;
      gain_[axis][tri(keep, c)] = intersect_gain(view_[axis][keep], view_[axis][c]);
      ++stamp_[axis][tri(keep, c)];
      push_vertex(axis, keep, c);
    }
  } else {
    next_[keep] = next_[gone];
    if (next_[gone] >= 0) prev_[next_[gone]] = keep;
    next_[gone] = -1;
    prev_[gone] = -1;
    if (next_[keep] >= 0) {
      time_gain_[keep] = intersect_gain(view_[2][keep], view_[2][next_[keep]]);
      ++time_stamp_[keep];
      push_time(keep);
    }
    if (prev_[keep] >= 0) {
      const auto p = static_cast<std::uint32_t>(prev_[keep]);
      time_gain_[p] = intersect_gain(view_[2][p], view_[2][keep]);
      ++time_stamp_[p];
      push_time(p);
    }
  }
  cost_ += d;
  return {d, keep};
}

std::vector<std::uint32_t> MergeState::representatives(Axis axis) const { return rep_[static_cast<int>(axis)]; }

Triclustering MergeState::snapshot() const {
  return collapse_clusters(base_, rep_[0], rep_[1], rep_[2]);
}

}  // namespace tricluster
