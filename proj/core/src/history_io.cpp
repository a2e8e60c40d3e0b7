#include "gedfem/history_io.hpp"

#include <fstream>
#include <sstream>

#include "gedfem/errors.hpp"

namespace gedfem {

void write_history(const std::vector<HistoryRow>& rows, const std::string& path) {
  if (rows.empty()) throw IoError("write_history: empty trajectory");
  std::ofstream out(path);
  if (!out) throw IoError("cannot open history file for writing: " + path);
  out << kHistoryHeader << "\n";
  char buf[360];
  for (const HistoryRow& r : rows) {
    std::snprintf(buf, sizeof buf, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", r.step,
                  r.load_factor, r.prescribed_displacement, r.reaction_force, r.max_s11,
                  r.max_kappa, r.max_d, r.max_phi);
    out << buf;
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<HistoryRow> read_history(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open history file: " + path);
  std::vector<HistoryRow> rows;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (lineno == 1) {
      if (line != kHistoryHeader)
        throw ParseError(path + ":1: unexpected history header");
      continue;
    }
    std::istringstream ss(line);
    HistoryRow r;
    char c;
    if (!(ss >> r.step >> c >> r.load_factor >> c >> r.prescribed_displacement >> c >>
          r.reaction_force >> c >> r.max_s11 >> c >> r.max_kappa >> c >> r.max_d >> c >>
          r.max_phi))
      throw ParseError(path + ":" + std::to_string(lineno) + ": malformed history row");
    rows.push_back(r);
  }
  return rows;
}

}  // namespace gedfem
