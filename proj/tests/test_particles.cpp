#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "kpz/export.hpp"
#include "kpz/lpp.hpp"
#include "kpz/particles.hpp"

using namespace kpz;

TEST_CASE("derived seeds are distinct and reproducible") {
  std::set<std::uint64_t> s;
  for (std::uint64_t i = 0; i < 1000; ++i) s.insert(derive_seed(7, i));
  CHECK(s.size() == 1000);
  CHECK(derive_seed(7, 3) == derive_seed(7, 3));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));
}

TEST_CASE("step state and gap map") {
  const auto s = step_state(5, 0.7);
  CHECK(s.x == std::vector<long>{-1, -2, -3, -4, -5});
  CHECK(s.alpha == 0.7);
  const auto g = gap_map(s);
  CHECK(g == std::vector<std::uint8_t>{0, 0, 0, 0});
  ParticleState bad;
  bad.x = {0, -2, -5};
  CHECK_THROWS_WITH(gap_map(bad), doctest::Contains("outside {1,2}"));
}

TEST_CASE("stationary gaps are one or two") {
  const auto s = stationary_gap_init(0.5, 2000, 3);
  CHECK(s.x[0] == 0);
  long twos = 0;
  for (int i = 1; i < s.size(); ++i) {
    const long d = s.x[i - 1] - s.x[i];
    CHECK((d == 1 || d == 2));
    twos += d == 2;
  }
  CHECK(std::abs(twos / 1999.0 - 0.5) < 0.05);
}

TEST_CASE("FTASEP moves are facilitated and exclusion holds") {
  const auto init = step_state(60);
  const auto tr = ftasep_simulate(1.0, init, 30.0, 11, 60);
  auto x = init.x;
  double last = 0.0;
  for (const auto& e : tr.events) {
    CHECK(e.time > last);
    last = e.time;
    const int i = e.index - 1;
    if (i > 0) CHECK(x[i - 1] > x[i] + 1);
    const long behind = i + 1 < static_cast<int>(x.size()) ? x[i + 1] : tr.frozen;
    CHECK(behind == x[i] - 1);
    ++x[i];
  }
  CHECK(x == tr.final_state.x);
  CHECK(tr.event_count == static_cast<long>(tr.events.size()));
}

TEST_CASE("FTASEP runs are reproducible and can stop on an event count") {
  const auto init = step_state(100);
  FtasepOptions o;
  o.max_events = 500;
  const auto a = ftasep_simulate(1.0, init, 1e9, 5, 100, o);
  const auto b = ftasep_simulate(1.0, init, 1e9, 5, 100, o);
  CHECK(a.stopped_by_count);
  CHECK(a.event_count == 500);
  CHECK(a.final_state.x == b.final_state.x);
  CHECK(a.events.back().time == b.events.back().time);
}

TEST_CASE("coupling to half-line TASEP holds and detects corruption") {
  const auto init = step_state(400);
  FtasepOptions o;
  o.max_events = 3000;
  auto tr = ftasep_simulate(1.0, init, 1e9, 21, 400, o);
  const auto rep = verify_coupling(tr);
  CHECK(rep.pass);
  CHECK(rep.events_checked == 3000);
  // a bulk particle cannot jump without its left neighbour directly behind it
  tr.events.insert(tr.events.begin(), Event{tr.events.front().time / 2, EventKind::kFtasep, 5});
  CHECK_FALSE(verify_coupling(tr).pass);
}

TEST_CASE("half-line TASEP: exclusion, currents and logged times") {
  const auto tr = halfline_tasep_simulate(0.8, 60.0, 9, 200);
  CHECK_FALSE(tr.truncated);
  CHECK(tr.injected() > 10);
  long occupied = 0;
  for (auto o : tr.final_occupation) occupied += o;
  CHECK(occupied == tr.injected());
  CHECK(current(tr, 1, 60.0) == tr.injected());
  CHECK(current(tr, 1, 0.0) == 0);
  for (int j = 0; j < tr.injected(); ++j)
    for (size_t s = 1; s < tr.arrival[j].size(); ++s) CHECK(tr.arrival[j][s] > tr.arrival[j][s - 1]);
  CHECK_THROWS(halfline_tasep_simulate(1.0, 1.0, 1, 1));
}

TEST_CASE("first particle of FTASEP has the law of the diagonal passage times") {
  // P(x_1(t) >= k) = P(H(k+1, k+1) <= t)
  const double t = 12.0;
  const int m = 20000, kmax = 8;
  const auto init = step_state(80);
  FtasepOptions o;
  o.record = false;
  for (double al : {1.0, 0.3}) {
    std::vector<double> pf(kmax + 1, 0.0), pl(kmax + 1, 0.0);
    for (int r = 0; r < m; ++r) {
      const long x1 = ftasep_simulate(al, init, t, derive_seed(1, r), 80, o).final_state.x[0];
      const auto d = diagonal_passage_times(kmax + 1, al, derive_seed(2, r));
      for (int k = 0; k <= kmax; ++k) {
        pf[k] += x1 >= k;
        pl[k] += d[k] <= t;
      }
    }
    for (int k = 0; k <= kmax; ++k) {
      const double a = pf[k] / m, b = pl[k] / m;
      const double se = std::sqrt((a * (1 - a) + b * (1 - b)) / m) + 1e-9;
      CHECK(std::abs(a - b) < 4.5 * se);
    }
  }
}

TEST_CASE("trajectory csv") {
  std::ostringstream out;
  write_trajectory_csv(out, {Event{0.125, EventKind::kFtasep, 1}, Event{1.0 / 3, EventKind::kInject, 0}});
  CHECK(out.str() == "event_index,time,kind,index\n0,0.125,ftasep,1\n1,0.333333333333,inject,0\n");
  CHECK(format_time(2.0) == "2");
}
