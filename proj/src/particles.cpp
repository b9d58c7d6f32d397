#include "kpz/particles.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace kpz {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

ParticleState step_state(int n, double alpha) {
  ParticleState s;
  s.alpha = alpha;
  s.x.resize(n);
  for (int i = 0; i < n; ++i) s.x[i] = -(i + 1);
  return s;
}

ParticleState stationary_gap_init(double p, int size, std::uint64_t seed) {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("gap probability outside [0,1]");
  if (size < 1) throw std::invalid_argument("size must be positive");
  Rng rng(seed);
  std::bernoulli_distribution b(p);
  ParticleState s;
  s.x.resize(size);
  s.x[0] = 0;
  for (int i = 1; i < size; ++i) s.x[i] = s.x[i - 1] - 1 - (b(rng) ? 1 : 0);
  return s;
}

std::vector<std::uint8_t> gap_map(const ParticleState& s) {
  std::vector<std::uint8_t> g;
  if (s.x.empty()) return g;
  g.resize(s.x.size() - 1);
  for (size_t i = 0; i + 1 < s.x.size(); ++i) {
    const long d = s.x[i] - s.x[i + 1];
    if (d != 1 && d != 2) {
      std::ostringstream m;
      m << "gap between particles " << i + 1 << " and " << i + 2 << " is " << d
        << ", outside {1,2}";
      throw std::invalid_argument(m.str());
    }
    g[i] = static_cast<std::uint8_t>(d - 1);
  }
  return g;
}

std::string kind_name(EventKind k) {
  switch (k) {
    case EventKind::kInject: return "inject";
    case EventKind::kBulk: return "bulk";
    case EventKind::kFtasep: return "ftasep";
  }
  return "unknown";
}

namespace {

// Set of enabled indices with O(1) insert, erase and uniform pick.
class IndexSet {
 public:
  explicit IndexSet(int n) : where_(n, -1) {}
  void insert(int i) {
    if (where_[i] >= 0) return;
    where_[i] = static_cast<int>(items_.size());
    items_.push_back(i);
  }
  void erase(int i) {
    const int w = where_[i];
    if (w < 0) return;
    const int last = items_.back();
    items_[w] = last;
    where_[last] = w;
    items_.pop_back();
    where_[i] = -1;
  }
  void set(int i, bool on) { on ? insert(i) : erase(i); }
  int size() const { return static_cast<int>(items_.size()); }
  int at(int k) const { return items_[k]; }

 private:
  std::vector<int> where_;
  std::vector<int> items_;
};

inline double uniform01(Rng& rng) {
  return (rng() >> 11) * 0x1.0p-53;
}
inline double exp_sample(Rng& rng, double rate) {
  return -std::log1p(-uniform01(rng)) / rate;
}

}  // namespace

FtasepTrajectory ftasep_simulate(double alpha, const ParticleState& init, double horizon,
                                 std::uint64_t seed, int n_particles, FtasepOptions opt) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (n_particles < 1 || n_particles > init.size())
    throw std::invalid_argument("n_particles must be in [1, initial size]");

  FtasepTrajectory tr;
  tr.alpha = alpha;
  tr.horizon = horizon;
  tr.initial.alpha = alpha;
  tr.initial.x.assign(init.x.begin(), init.x.begin() + n_particles);
  tr.frozen = n_particles < init.size() ? init.x[n_particles] : init.x[n_particles - 1] - 1;
  {
    ParticleState check = tr.initial;
    check.x.push_back(tr.frozen);
    gap_map(check);
  }

  const int n = n_particles;
  // y[i] for i = 0..n, y[n] frozen
  std::vector<long> y(tr.initial.x);
  y.push_back(tr.frozen);
  auto enabled = [&](int i) {
    if (i == 0) return y[0] - y[1] == 1;
    return y[i] - y[i + 1] == 1 && y[i - 1] - y[i] == 2;
  };
  IndexSet bulk(n);
  for (int i = 1; i < n; ++i)
    if (enabled(i)) bulk.insert(i);
  bool first = enabled(0);

  Rng rng(seed);
  double t = 0.0;
  while (tr.event_count < opt.max_events) {
    const double total = (first ? alpha : 0.0) + bulk.size();
    if (total <= 0.0) break;
    t += exp_sample(rng, total);
    if (t > horizon) break;
    int i;
    const double u = uniform01(rng) * total;
    if (first && u < alpha) {
      i = 0;
    } else {
      const double v = first ? u - alpha : u;
      int k = static_cast<int>(v);
      if (k >= bulk.size()) k = bulk.size() - 1;
      i = bulk.at(k);
    }
    ++y[i];
    ++tr.event_count;
    if (opt.record) tr.events.push_back({t, EventKind::kFtasep, i + 1});
    for (int j = std::max(0, i - 1); j <= std::min(n - 1, i + 1); ++j) {
      if (j == 0)
        first = enabled(0);
      else
        bulk.set(j, enabled(j));
    }
  }
  tr.stopped_by_count = tr.event_count >= opt.max_events;
  tr.final_state.alpha = alpha;
  tr.final_state.time = tr.stopped_by_count ? t : horizon;
  tr.final_state.x.assign(y.begin(), y.begin() + n);
  return tr;
}

HalfLineTrajectory halfline_tasep_simulate(double alpha, double horizon, std::uint64_t seed,
                                           int x_max) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (x_max < 2) throw std::invalid_argument("x_max must be at least 2");

  HalfLineTrajectory tr;
  tr.alpha = alpha;
  tr.horizon = horizon;
  tr.x_max = x_max;
  std::vector<int> occ(x_max + 2, -1);  // site -> particle, sites 1..x_max
  std::vector<int> pos;
  std::vector<double> since;            // enabling time of each particle's next jump
  double inject_since = 0.0;
  IndexSet movers(x_max + 1);  // at most one particle per site

  Rng rng(seed);
  double t = 0.0;
  auto can_move = [&](int j) { return pos[j] < x_max && occ[pos[j] + 1] < 0; };
  for (;;) {
    const bool source = occ[1] < 0;
    const double total = (source ? alpha : 0.0) + movers.size();
    if (total <= 0.0) break;
    t += exp_sample(rng, total);
    if (t > horizon) break;
    const double u = uniform01(rng) * total;
    if (source && u < alpha) {
      const int j = static_cast<int>(pos.size());
      pos.push_back(1);
      occ[1] = j;
      tr.waiting.push_back({t - inject_since});
      tr.arrival.push_back({t});
      tr.events.push_back({t, EventKind::kInject, 0});
      since.push_back(t);
      if (can_move(j)) movers.insert(j);
    } else {
      const double v = source ? u - alpha : u;
      int k = static_cast<int>(v);
      if (k >= movers.size()) k = movers.size() - 1;
      const int j = movers.at(k);
      const int s = pos[j];
      tr.events.push_back({t, EventKind::kBulk, s});
      tr.waiting[j].push_back(t - since[j]);
      occ[s] = -1;
      occ[s + 1] = j;
      pos[j] = s + 1;
      tr.arrival[j].push_back(t);
      if (s + 1 == x_max) tr.truncated = true;
      movers.erase(j);
      if (can_move(j)) {
        movers.insert(j);
        since[j] = t;
      }
      if (s == 1) {
        inject_since = t;
      } else if (occ[s - 1] >= 0) {
        const int b = occ[s - 1];
        movers.insert(b);
        since[b] = t;
      }
    }
  }
  tr.final_occupation.assign(x_max, 0);
  for (int s = 1; s <= x_max; ++s) tr.final_occupation[s - 1] = occ[s] >= 0;
  return tr;
}

long current(const HalfLineTrajectory& traj, int x, double t) {
  if (t > traj.horizon) throw std::invalid_argument("time beyond the horizon");
  if (x < 1 || x > traj.x_max) throw std::invalid_argument("site outside {1..x_max}");
  long c = 0;
  for (const auto& a : traj.arrival)
    if (static_cast<int>(a.size()) >= x && a[x - 1] <= t) ++c;
  return c;
}

CouplingReport verify_coupling(const FtasepTrajectory& traj) {
  CouplingReport rep;
  const int n = traj.initial.size();
  std::vector<long> y(traj.initial.x);
  y.push_back(traj.frozen);
  // half-line image on sites 1..n: g[s] = y[s-1] - y[s] - 1
  std::vector<int> g(n + 2, 0);
  for (int s = 1; s <= n; ++s) g[s] = static_cast<int>(y[s - 1] - y[s] - 1);
  auto currents = [&] {
    std::vector<long> c(n + 2, 0);
    for (int s = n; s >= 1; --s) c[s] = c[s + 1] + g[s];
    return c;
  };
  const std::vector<long> c0 = currents();
  const std::vector<long> x0(y.begin(), y.begin() + n);

  auto fail = [&](long e, const std::string& m) {
    rep.pass = false;
    rep.first_violation = e;
    std::ostringstream s;
    s << "event " << e << ": " << m;
    rep.message = s.str();
    return rep;
  };

  double last = 0.0;
  for (size_t e = 0; e < traj.events.size(); ++e) {
    const Event& ev = traj.events[e];
    const long ei = static_cast<long>(e);
    if (ev.kind != EventKind::kFtasep) return fail(ei, "not an FTASEP event");
    if (!(ev.time > last)) return fail(ei, "event times not increasing");
    last = ev.time;
    const int i = ev.index;  // particle, 1-based
    if (i < 1 || i > n) return fail(ei, "particle index out of range");
    // FTASEP legality
    const bool left = y[i - 1] - y[i] == 1;
    const bool right = i == 1 || y[i - 2] - y[i - 1] == 2;
    if (!left || !right) return fail(ei, "FTASEP move not enabled");
    // image move: injection into site 1 or bulk jump i-1 -> i
    if (i == 1) {
      if (g[1] != 0) return fail(ei, "injection into an occupied site 1");
      ++y[0];
      g[1] = 1;
    } else {
      const int s = i - 1;
      if (g[s] != 1 || g[s + 1] != 0) return fail(ei, "illegal half-line bulk jump");
      ++y[i - 1];
      g[s] = 0;
      g[s + 1] = 1;
    }
    for (int s = 1; s <= n; ++s)
      if (g[s] != y[s - 1] - y[s] - 1) return fail(ei, "image differs from the gap map");
    const std::vector<long> c = currents();
    for (int k = 1; k <= n; ++k)
      if (y[k - 1] - x0[k - 1] != c[k] - c0[k])
        return fail(ei, "x_n(t) - x_n(0) differs from N_n(t) - N_n(0) at n = " +
                            std::to_string(k));
    ++rep.events_checked;
  }
  return rep;
}

}  // namespace kpz
