#include "gedfem/inp_reader.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <sstream>

#include "gedfem/errors.hpp"

namespace gedfem {

namespace {

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(trim(cur));
  if (!line.empty() && line.back() == ',') out.push_back("");
  return out;
}

// keyword line: *KEYWORD, PARAM=VALUE, FLAG, ...
struct Keyword {
  std::string name;
  std::map<std::string, std::string> params;
};

Keyword parse_keyword(const std::string& line) {
  Keyword k;
  const auto fields = split_csv(line);
  k.name = upper(trim(fields[0].substr(1)));
  for (std::size_t i = 1; i < fields.size(); ++i) {
    const std::string f = fields[i];
    const auto eq = f.find('=');
    if (eq == std::string::npos)
      k.params[upper(trim(f))] = "";
    else
      k.params[upper(trim(f.substr(0, eq)))] = trim(f.substr(eq + 1));
  }
  return k;
}

long parse_id(const std::string& s, const std::string& ctx, int lineno) {
  try {
    std::size_t pos = 0;
    const long v = std::stol(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ":" + std::to_string(lineno) + ": expected integer id, got '" + s +
                     "'");
  }
}

double parse_real(const std::string& s, const std::string& ctx, int lineno) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("trailing");
    return v;
  } catch (const std::exception&) {
    throw ParseError(ctx + ":" + std::to_string(lineno) + ": expected number, got '" + s + "'");
  }
}

}  // namespace

Mesh parse_inp_text(const std::string& text, const std::string& ctx) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;

  std::map<long, std::array<double, 3>> nodes;      // original id -> coords
  std::map<long, int> node_lines;                   // duplicate detection
  std::vector<std::pair<long, std::array<long, 8>>> elements;
  std::map<long, int> element_lines;
  std::map<std::string, std::vector<long>> nsets;   // original ids
  std::map<std::string, std::vector<long>> elsets;

  enum class Section { none, node, element, nset, elset };
  Section section = Section::none;
  std::string current_set;
  bool generate = false;
  std::string pending;  // element records may continue across lines

  auto flush_element = [&](const std::string& record, int at_line) {
    const auto f = split_csv(record);
    if (f.size() != 9)
      throw ParseError(ctx + ":" + std::to_string(at_line) +
                       ": element record needs 9 entries (id + 8 nodes), got " +
                       std::to_string(f.size()));
    const long id = parse_id(f[0], ctx, at_line);
    if (element_lines.count(id))
      throw ParseError(ctx + ":" + std::to_string(at_line) + ": duplicate element id " +
                       std::to_string(id) + " (first at line " +
                       std::to_string(element_lines[id]) + ")");
    element_lines[id] = at_line;
    std::array<long, 8> conn;
    for (int a = 0; a < 8; ++a) conn[a] = parse_id(f[a + 1], ctx, at_line);
    elements.emplace_back(id, conn);
  };

  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("**", 0) == 0) continue;  // comment
    if (t[0] == '*') {
      if (!pending.empty())
        throw ParseError(ctx + ":" + std::to_string(lineno) + ": unterminated element record");
      const Keyword k = parse_keyword(t);
      if (k.name == "NODE") {
        section = Section::node;
      } else if (k.name == "ELEMENT") {
        auto it = k.params.find("TYPE");
        const std::string type = it == k.params.end() ? "" : upper(it->second);
        if (type.rfind("C3D8", 0) != 0)
          throw ParseError(ctx + ":" + std::to_string(lineno) + ": unsupported element type '" +
                           (it == k.params.end() ? std::string("?") : it->second) +
                           "' (only C3D8 variants are supported)");
        section = Section::element;
      } else if (k.name == "NSET" || k.name == "ELSET") {
        auto it = k.params.find(k.name);
        if (it == k.params.end() || it->second.empty())
          throw ParseError(ctx + ":" + std::to_string(lineno) + ": missing " + k.name +
                           "=<name>");
        current_set = it->second;
        generate = k.params.count("GENERATE") > 0;
        section = k.name == "NSET" ? Section::nset : Section::elset;
      } else {
        // Foreign keywords (materials, steps ...) are skipped with their data.
        section = Section::none;
      }
      continue;
    }

    switch (section) {
      case Section::none:
        break;
      case Section::node: {
        const auto f = split_csv(t);
        if (f.size() < 4)
          throw ParseError(ctx + ":" + std::to_string(lineno) +
                           ": node record needs id and 3 coordinates");
        const long id = parse_id(f[0], ctx, lineno);
        if (node_lines.count(id))
          throw ParseError(ctx + ":" + std::to_string(lineno) + ": duplicate node id " +
                           std::to_string(id) + " (first at line " +
                           std::to_string(node_lines[id]) + ")");
        node_lines[id] = lineno;
        nodes[id] = {parse_real(f[1], ctx, lineno), parse_real(f[2], ctx, lineno),
                     parse_real(f[3], ctx, lineno)};
        break;
      }
      case Section::element: {
        std::string record = pending + t;
        pending.clear();
        if (!record.empty() && record.back() == ',') {
          pending = record;  // continuation
          break;
        }
        flush_element(record, lineno);
        break;
      }
      case Section::nset:
      case Section::elset: {
        auto& target = section == Section::nset ? nsets[current_set] : elsets[current_set];
        const auto f = split_csv(t);
        if (generate) {
          if (f.size() < 2 || f.size() > 3)
            throw ParseError(ctx + ":" + std::to_string(lineno) +
                             ": GENERATE record needs first,last[,step]");
          const long first = parse_id(f[0], ctx, lineno);
          const long last = parse_id(f[1], ctx, lineno);
          const long inc = f.size() == 3 && !f[2].empty() ? parse_id(f[2], ctx, lineno) : 1;
          if (inc <= 0 || last < first)
            throw ParseError(ctx + ":" + std::to_string(lineno) + ": bad GENERATE range");
          for (long id = first; id <= last; id += inc) target.push_back(id);
        } else {
          for (const std::string& s : f)
            if (!s.empty()) target.push_back(parse_id(s, ctx, lineno));
        }
        break;
      }
    }
  }
  if (!pending.empty()) throw ParseError(ctx + ": unterminated element record at end of file");
  if (nodes.empty()) throw ParseError(ctx + ": no *NODE section found");
  if (elements.empty()) throw ParseError(ctx + ": no *ELEMENT section found");

  // Remap sparse 1-based ids to dense 0-based indices.
  Mesh m;
  std::map<long, int> node_index;
  for (const auto& [id, xyz] : nodes) {
    node_index[id] = m.node_count();
    m.nodes.push_back(xyz);
  }
  std::map<long, int> elem_index;
  for (const auto& [id, conn] : elements) {
    std::array<int, 8> c;
    for (int a = 0; a < 8; ++a) {
      auto it = node_index.find(conn[a]);
      if (it == node_index.end())
        throw ParseError(ctx + ": element " + std::to_string(id) + " references undefined node " +
                         std::to_string(conn[a]));
      c[a] = it->second;
    }
    elem_index[id] = m.element_count();
    m.elements.push_back(c);
  }
  for (const auto& [name, ids] : nsets) {
    std::vector<int>& s = m.node_sets[name];
    for (long id : ids) {
      auto it = node_index.find(id);
      if (it == node_index.end())
        throw ParseError(ctx + ": node set '" + name + "' references undefined node " +
                         std::to_string(id));
      s.push_back(it->second);
    }
  }
  for (const auto& [name, ids] : elsets) {
    std::vector<int>& s = m.element_sets[name];
    for (long id : ids) {
      auto it = elem_index.find(id);
      if (it == elem_index.end())
        throw ParseError(ctx + ": element set '" + name + "' references undefined element " +
                         std::to_string(id));
      s.push_back(it->second);
    }
  }
  m.validate();
  return m;
}

Mesh parse_inp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open mesh file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return parse_inp_text(text, path);
}

void write_inp(const Mesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open mesh file for writing: " + path);
  out << "** generated hexahedral mesh\n*NODE\n";
  char buf[160];
  for (int i = 0; i < mesh.node_count(); ++i) {
    std::snprintf(buf, sizeof buf, "%d, %.17g, %.17g, %.17g\n", i + 1, mesh.nodes[i][0],
                  mesh.nodes[i][1], mesh.nodes[i][2]);
    out << buf;
  }
  out << "*ELEMENT, TYPE=C3D8\n";
  for (int e = 0; e < mesh.element_count(); ++e) {
    out << e + 1;
    for (int a = 0; a < 8; ++a) out << ", " << mesh.elements[e][a] + 1;
    out << "\n";
  }
  for (const auto& [name, ids] : mesh.node_sets) {
    out << "*NSET, NSET=" << name << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
      out << ids[i] + 1 << (i % 8 == 7 || i + 1 == ids.size() ? "\n" : ", ");
  }
  for (const auto& [name, ids] : mesh.element_sets) {
    out << "*ELSET, ELSET=" << name << "\n";
    for (std::size_t i = 0; i < ids.size(); ++i)
      out << ids[i] + 1 << (i % 8 == 7 || i + 1 == ids.size() ? "\n" : ", ");
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace gedfem
