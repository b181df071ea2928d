#include <algorithm>
#include <cctype>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "mpsaw/errors.hpp"
#include "mpsaw/mesh.hpp"

namespace mpsaw {

namespace detail {
void derive_faces(Mesh& m);
void derive_edges(Mesh& m);
void derive_adjacency(Mesh& m);
}  // namespace detail

namespace {

struct LineReader {
  std::istringstream in;
  std::string name;
  int lineno = 0;

  LineReader(const std::string& text, const std::string& n)
      : in(text), name(n) {}

  [[noreturn]] void fail(const std::string& msg) const {
    throw IoError(name + ":" + std::to_string(lineno) + ": " + msg);
  }

  // Next non-empty, non-comment line.
  bool next(std::string& line) {
    while (std::getline(in, line)) {
      ++lineno;
      const auto h = line.find('#');
      if (h != std::string::npos) line.erase(h);
      bool blank = true;
      for (char ch : line)
        if (!std::isspace(static_cast<unsigned char>(ch))) blank = false;
      if (!blank) return true;
    }
    return false;
  }

  std::string expect(const std::string& what) {
    std::string line;
    if (!next(line)) fail("unexpected end of file, expected " + what);
    return line;
  }
};

double num(const std::string& tok, LineReader& r) {
  size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    r.fail("not a number: '" + tok + "'");
  }
  if (pos != tok.size()) r.fail("trailing characters in number: '" + tok + "'");
  return v;
}

std::vector<std::string> tokens(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string t;
  while (is >> t) out.push_back(t);
  return out;
}

void fmt_double(std::string& out, double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  out += buf;
}

}  // namespace

Mesh mesh_from_string(const std::string& text, const std::string& name) {
  LineReader r(text, name);
  Mesh m;

  auto header = tokens(r.expect("'msh 1' header"));
  if (header.size() != 2 || header[0] != "msh" || header[1] != "1")
    r.fail("expected header 'msh 1'");
  auto dim_line = tokens(r.expect("'dim D'"));
  if (dim_line.size() != 2 || dim_line[0] != "dim")
    r.fail("expected 'dim D'");
  m.dim = static_cast<int>(num(dim_line[1], r));
  if (m.dim != 2 && m.dim != 3) r.fail("dim must be 2 or 3");

  auto vline = tokens(r.expect("'vertices N'"));
  if (vline.size() != 2 || vline[0] != "vertices")
    r.fail("expected 'vertices N'");
  const long nv = static_cast<long>(num(vline[1], r));
  if (nv < 1) r.fail("vertex count must be positive");
  for (long i = 0; i < nv; ++i) {
    auto t = tokens(r.expect("vertex coordinates"));
    if (static_cast<int>(t.size()) != m.dim)
      r.fail("expected " + std::to_string(m.dim) + " coordinates");
    Vec3 p = Vec3::Zero();
    for (int d = 0; d < m.dim; ++d) p[d] = num(t[d], r);
    m.verts.push_back(p);
  }

  auto cline = tokens(r.expect("'cells M'"));
  if (cline.size() != 2 || cline[0] != "cells") r.fail("expected 'cells M'");
  const long nc = static_cast<long>(num(cline[1], r));
  if (nc < 1) r.fail("cell count must be positive");
  for (long i = 0; i < nc; ++i) {
    auto t = tokens(r.expect("cell vertex list"));
    const int k = static_cast<int>(t.size());
    const bool ok = (m.dim == 2) ? (k == 3 || k == 4) : (k == 4 || k == 8);
    if (!ok)
      r.fail("cell with " + std::to_string(k) + " vertices not supported in " +
             std::to_string(m.dim) + "D");
    Cell c;
    for (const auto& tok : t) {
      const double iv = num(tok, r);
      const long vi = static_cast<long>(iv);
      if (iv != static_cast<double>(vi) || vi < 0 || vi >= nv)
        r.fail("vertex index " + tok + " out of range [0," +
               std::to_string(nv - 1) + "]");
      c.verts.push_back(static_cast<int>(vi));
    }
    m.cells.push_back(std::move(c));
  }
  std::string extra;
  if (r.next(extra)) r.fail("trailing content after cell list");

  // Normalize simplex orientation so the derived geometry is positive.
  for (auto& c : m.cells) {
    if (m.dim == 2 && c.verts.size() == 3) {
      const Vec3 d1 = m.verts[c.verts[1]] - m.verts[c.verts[0]];
      const Vec3 d2 = m.verts[c.verts[2]] - m.verts[c.verts[0]];
      if (d1.x() * d2.y() - d1.y() * d2.x() < 0.0)
        std::swap(c.verts[1], c.verts[2]);
    } else if (m.dim == 3 && c.verts.size() == 4) {
      const Vec3 p0 = m.verts[c.verts[0]];
      if ((m.verts[c.verts[1]] - p0)
              .cross(m.verts[c.verts[2]] - p0)
              .dot(m.verts[c.verts[3]] - p0) < 0.0)
        std::swap(c.verts[2], c.verts[3]);
    }
  }

  try {
    detail::derive_faces(m);
    detail::derive_edges(m);
    detail::derive_adjacency(m);
    compute_geometry(m);
  } catch (const NumericalError& e) {
    throw IoError(name + ": " + e.what());
  }

  // Domain box from the hull; only meaningful for box meshes but harmless.
  m.box_lo = Vec3::Constant(std::numeric_limits<double>::max());
  m.box_hi = Vec3::Constant(std::numeric_limits<double>::lowest());
  for (const auto& p : m.verts)
    for (int d = 0; d < 3; ++d) {
      m.box_lo[d] = std::min(m.box_lo[d], p[d]);
      m.box_hi[d] = std::max(m.box_hi[d], p[d]);
    }
  return m;
}

Mesh read_mesh(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open mesh file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return mesh_from_string(ss.str(), path);
}

std::string mesh_to_string(const Mesh& m) {
  std::string out;
  out.reserve(m.verts.size() * 40 + m.cells.size() * 20 + 64);
  out += "msh 1\ndim " + std::to_string(m.dim) + "\n";
  out += "vertices " + std::to_string(m.verts.size()) + "\n";
  for (const auto& p : m.verts) {
    for (int d = 0; d < m.dim; ++d) {
      if (d) out += ' ';
      fmt_double(out, p[d]);
    }
    out += '\n';
  }
  out += "cells " + std::to_string(m.cells.size()) + "\n";
  for (const auto& c : m.cells) {
    for (size_t i = 0; i < c.verts.size(); ++i) {
      if (i) out += ' ';
      out += std::to_string(c.verts[i]);
    }
    out += '\n';
  }
  return out;
}

void write_mesh(const Mesh& m, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << mesh_to_string(m);
  if (!out) throw IoError("failed writing mesh to '" + path + "'");
}

std::uint64_t mesh_hash(const Mesh& m) {
  const std::string s = mesh_to_string(m);
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace mpsaw
