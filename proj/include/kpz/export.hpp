#pragma once
#include <ostream>
#include <string>

#include "kpz/particles.hpp"

namespace kpz {

// event_index,time,kind,index with times at 12 significant digits.
void write_trajectory_csv(std::ostream& out, const std::vector<Event>& events);
void write_trajectory_csv(const std::string& path, const std::vector<Event>& events);

// Shortest decimal form at 12 significant digits.
std::string format_time(double t);

}  // namespace kpz
