#pragma once
#include <cstdint>
#include <limits>
#include <random>
#include <string>
#include <vector>

namespace kpz {

// 64-bit mixing (splitmix64 finalizer) of a master seed and a run index.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

using Rng = std::mt19937_64;

// Positions x_1 > x_2 > ... (x[0] is particle 1).
struct ParticleState {
  std::vector<long> x;
  double alpha = 1.0;
  double time = 0.0;
  int size() const { return static_cast<int>(x.size()); }
};

ParticleState step_state(int n, double alpha = 1.0);

// x_1 = 0, consecutive gaps x_i - x_{i+1} = 1 + Bernoulli(p).
ParticleState stationary_gap_init(double p, int size, std::uint64_t seed);

// g_i = x_i - x_{i+1} - 1 for i = 1..size-1; throws naming the first gap outside {1,2}.
std::vector<std::uint8_t> gap_map(const ParticleState& s);

enum class EventKind : std::uint8_t { kInject, kBulk, kFtasep };
std::string kind_name(EventKind k);

// FTASEP: index is the particle (1-based). Half-line: 0 for an injection, otherwise the
// site the particle leaves.
struct Event {
  double time = 0.0;
  EventKind kind = EventKind::kFtasep;
  int index = 0;
};

struct FtasepOptions {
  bool record = true;                                         // keep the event list
  long max_events = std::numeric_limits<long>::max();
};

struct FtasepTrajectory {
  double alpha = 1.0, horizon = 0.0;
  ParticleState initial;   // tracked particles
  long frozen = 0;         // position of particle n_particles + 1, never moves
  std::vector<Event> events;
  ParticleState final_state;
  long event_count = 0;
  bool stopped_by_count = false;
};

// Exact continuous-time FTASEP(alpha) from init, restricted to its first n_particles.
// Particle n_particles + 1 sits frozen at init.x[n_particles] (or one site behind the last).
FtasepTrajectory ftasep_simulate(double alpha, const ParticleState& init, double horizon,
                                 std::uint64_t seed, int n_particles, FtasepOptions opt = {});

struct HalfLineTrajectory {
  double alpha = 1.0, horizon = 0.0;
  int x_max = 0;
  std::vector<Event> events;
  // waiting[j][k]: (k+1)-th waiting time of particle j+1, the first one being its injection delay
  std::vector<std::vector<double>> waiting;
  // arrival[j][s]: time particle j+1 reached site s+1
  std::vector<std::vector<double>> arrival;
  std::vector<std::uint8_t> final_occupation;  // sites 1..x_max
  bool truncated = false;                       // some particle reached x_max
  int injected() const { return static_cast<int>(arrival.size()); }
};

// Half-line TASEP on {1..x_max} from the empty configuration, source rate alpha.
HalfLineTrajectory halfline_tasep_simulate(double alpha, double horizon, std::uint64_t seed,
                                           int x_max);

// N_x(t): particles at sites >= x at time t.
long current(const HalfLineTrajectory& traj, int x, double t);

struct CouplingReport {
  bool pass = true;
  long events_checked = 0;
  long first_violation = -1;  // event index
  std::string message;
};

// Replays an FTASEP trajectory through the gap map and checks that every event is a legal
// half-line TASEP move and that x_n(t) - x_n(0) = N_n(t) - N_n(0) after every event.
CouplingReport verify_coupling(const FtasepTrajectory& traj);

}  // namespace kpz
