#include "kpz/export.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace kpz {

std::string format_time(double t) {
  std::ostringstream s;
  s << std::setprecision(12) << t;
  return s.str();
}

void write_trajectory_csv(std::ostream& out, const std::vector<Event>& events) {
  out << "event_index,time,kind,index\n";
  for (size_t i = 0; i < events.size(); ++i)
    out << i << ',' << format_time(events[i].time) << ',' << kind_name(events[i].kind) << ','
        << events[i].index << '\n';
}

void write_trajectory_csv(const std::string& path, const std::vector<Event>& events) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot write " + path);
  write_trajectory_csv(f, events);
}

}  // namespace kpz
