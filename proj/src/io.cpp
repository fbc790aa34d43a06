// Copyright 2026 The DreamCloud Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dreamcloud/io.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "dreamcloud/error.hpp"

namespace dreamcloud {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char ch) { return std::tolower(ch); });
  return out;
}

std::vector<std::string_view> Tokens(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i])))
      ++i;
    std::size_t j = i;
    while (j < line.size() &&
           !std::isspace(static_cast<unsigned char>(line[j])))
      ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

// Line reader that tracks 1-based line numbers and drops '#' comments and
// blank lines.
class LineReader {
 public:
  LineReader(std::istream& in, std::string what)
      : in_(in), what_(std::move(what)) {}

  bool Next(std::vector<std::string_view>& tokens, bool strip_comments = true) {
    while (std::getline(in_, line_)) {
      ++number_;
      if (!line_.empty() && line_.back() == '\r') line_.pop_back();
      std::string_view view = line_;
      if (strip_comments) {
        if (auto hash = view.find('#'); hash != std::string_view::npos) {
          view = view.substr(0, hash);
        }
      }
      tokens = Tokens(view);
      if (!tokens.empty()) return true;
    }
    return false;
  }

  void Require(std::vector<std::string_view>& tokens, const char* expected) {
    if (!Next(tokens)) Fail(std::string("unexpected end of file, expected ") +
                            expected);
  }

  [[noreturn]] void Fail(const std::string& msg) const {
    ThrowIo(what_ + " line " + std::to_string(number_) + ": " + msg);
  }

  double Real(std::string_view tok) const {
    double v = 0.0;
    const char* end = tok.data() + tok.size();
    // from_chars rejects a leading '+'.
    const char* begin = tok.data();
    if (begin != end && *begin == '+') ++begin;
    auto [ptr, ec] = std::from_chars(begin, end, v);
    if (ec != std::errc() || ptr != end) {
      Fail("invalid number '" + std::string(tok) + "'");
    }
    if (!std::isfinite(v)) Fail("non-finite value '" + std::string(tok) + "'");
    return v;
  }

  std::uint64_t Count(std::string_view tok) const {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || ptr != tok.data() + tok.size()) {
      Fail("invalid count '" + std::string(tok) + "'");
    }
    return v;
  }

  int number() const { return number_; }

 private:
  std::istream& in_;
  std::string what_;
  std::string line_;
  int number_ = 0;
};

Point ReadPoint(const LineReader& r, const std::vector<std::string_view>& t) {
  if (t.size() < 3) r.Fail("expected 3 coordinates");
  return {r.Real(t[0]), r.Real(t[1]), r.Real(t[2])};
}

// Appends a fan triangulation of one polygon.
void AddPolygon(const LineReader& r, const std::vector<std::uint64_t>& idx,
                std::size_t vertex_count, std::vector<Face>& faces) {
  if (idx.size() < 3) r.Fail("face needs at least 3 vertices");
  for (std::uint64_t i : idx) {
    if (i >= vertex_count) {
      r.Fail("vertex index " + std::to_string(i) + " out of range");
    }
  }
  for (std::size_t k = 1; k + 1 < idx.size(); ++k) {
    Face f{static_cast<std::uint32_t>(idx[0]),
           static_cast<std::uint32_t>(idx[k]),
           static_cast<std::uint32_t>(idx[k + 1])};
    if (f.a == f.b || f.b == f.c || f.a == f.c) {
      r.Fail("face repeats a vertex index");
    }
    faces.push_back(f);
  }
}

void WriteReal(std::ostream& out, double v) {
  char buf[32];
  const int n = std::snprintf(buf, sizeof buf, "%.17g", v);
  out.write(buf, n);
}

void WritePoint(std::ostream& out, const Point& p) {
  WriteReal(out, p[0]);
  out << ' ';
  WriteReal(out, p[1]);
  out << ' ';
  WriteReal(out, p[2]);
}

std::ifstream OpenIn(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) ThrowIo("cannot open '" + path + "' for reading");
  return in;
}

std::ofstream OpenOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) ThrowIo("cannot open '" + path + "' for writing");
  return out;
}

void Finish(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) ThrowIo("failed writing '" + path + "'");
}

}  // namespace

FileFormat ParseFileFormat(std::string_view name) {
  const std::string n = Lower(name);
  if (n == "off") return FileFormat::kOff;
  if (n == "ply") return FileFormat::kPly;
  if (n == "xyz") return FileFormat::kXyz;
  ThrowUsage("unknown file format '" + std::string(name) + "'");
}

FileFormat FormatFromPath(const std::string& path) {
  const auto dot = path.find_last_of('.');
  if (dot == std::string::npos) {
    ThrowUsage("cannot infer format of '" + path + "' without an extension");
  }
  return ParseFileFormat(std::string_view(path).substr(dot + 1));
}

std::string_view FormatName(FileFormat format) {
  switch (format) {
    case FileFormat::kOff: return "off";
    case FileFormat::kPly: return "ply";
    case FileFormat::kXyz: return "xyz";
  }
  return "?";
}

Geometry ParseOff(std::istream& in) {
  LineReader r(in, "OFF");
  std::vector<std::string_view> t;
  r.Require(t, "OFF header");

  std::vector<std::string_view> counts;
  const std::string_view head = t[0];
  if (head == "OFF") {
    counts.assign(t.begin() + 1, t.end());
    if (counts.empty()) r.Require(counts, "vertex/face counts");
  } else if (head.size() > 3 && head.substr(0, 3) == "OFF" &&
             std::isdigit(static_cast<unsigned char>(head[3]))) {
    counts.push_back(head.substr(3));
    counts.insert(counts.end(), t.begin() + 1, t.end());
  } else {
    r.Fail("expected OFF header");
  }
  if (counts.size() != 3) r.Fail("expected 'vertices faces edges' counts");
  // Copy: the token views die with the next line.
  const std::uint64_t nv = r.Count(counts[0]);
  const std::uint64_t nf = r.Count(counts[1]);
  r.Count(counts[2]);

  std::vector<Point> vertices;
  vertices.reserve(nv);
  for (std::uint64_t i = 0; i < nv; ++i) {
    r.Require(t, "vertex");
    vertices.push_back(ReadPoint(r, t));
  }
  std::vector<Face> faces;
  faces.reserve(nf);
  std::vector<std::uint64_t> idx;
  for (std::uint64_t i = 0; i < nf; ++i) {
    r.Require(t, "face");
    const std::uint64_t n = r.Count(t[0]);
    if (t.size() < n + 1) r.Fail("face lists fewer indices than declared");
    idx.clear();
    for (std::uint64_t k = 0; k < n; ++k) idx.push_back(r.Count(t[k + 1]));
    AddPolygon(r, idx, vertices.size(), faces);
  }
  if (r.Next(t)) r.Fail("unexpected trailing content");
  if (faces.empty()) return PointCloud(std::move(vertices));
  return TriangleMesh(std::move(vertices), std::move(faces));
}

Geometry ParsePly(std::istream& in) {
  LineReader r(in, "PLY");
  std::vector<std::string_view> t;
  if (!r.Next(t, false) || t.size() != 1 || t[0] != "ply") {
    r.Fail("expected 'ply' magic");
  }
  if (!r.Next(t, false) || t.size() != 3 || t[0] != "format") {
    r.Fail("expected format line");
  }
  if (t[1] != "ascii") r.Fail("only ascii PLY is supported");
  if (t[2] != "1.0") r.Fail("unsupported PLY version");

  struct Element {
    std::string name;
    std::uint64_t count = 0;
    std::vector<std::string> properties;
    bool has_list = false;
  };
  std::vector<Element> elements;
  for (;;) {
    if (!r.Next(t, false)) r.Fail("missing end_header");
    if (t[0] == "end_header") break;
    if (t[0] == "comment" || t[0] == "obj_info") continue;
    if (t[0] == "element") {
      if (t.size() != 3) r.Fail("malformed element line");
      elements.push_back({std::string(t[1]), r.Count(t[2]), {}, false});
    } else if (t[0] == "property") {
      if (elements.empty()) r.Fail("property before element");
      if (t.size() == 5 && t[1] == "list") {
        elements.back().has_list = true;
        elements.back().properties.emplace_back(t[4]);
      } else if (t.size() == 3) {
        elements.back().properties.emplace_back(t[2]);
      } else {
        r.Fail("malformed property line");
      }
    } else {
      r.Fail("unexpected header keyword '" + std::string(t[0]) + "'");
    }
  }

  std::vector<Point> vertices;
  std::vector<Face> faces;
  bool saw_vertex = false;
  std::vector<std::uint64_t> idx;
  for (const Element& e : elements) {
    if (e.name == "vertex") {
      saw_vertex = true;
      int col[3] = {-1, -1, -1};
      for (std::size_t i = 0; i < e.properties.size(); ++i) {
        if (e.properties[i] == "x") col[0] = static_cast<int>(i);
        if (e.properties[i] == "y") col[1] = static_cast<int>(i);
        if (e.properties[i] == "z") col[2] = static_cast<int>(i);
      }
      if (col[0] < 0 || col[1] < 0 || col[2] < 0 || e.has_list) {
        r.Fail("vertex element needs scalar x, y, z properties");
      }
      vertices.reserve(e.count);
      for (std::uint64_t i = 0; i < e.count; ++i) {
        r.Require(t, "vertex");
        if (t.size() != e.properties.size()) r.Fail("wrong vertex arity");
        vertices.push_back({r.Real(t[col[0]]), r.Real(t[col[1]]),
                            r.Real(t[col[2]])});
      }
    } else if (e.name == "face") {
      if (e.properties.size() != 1 || !e.has_list) {
        r.Fail("face element must be a single index list");
      }
      for (std::uint64_t i = 0; i < e.count; ++i) {
        r.Require(t, "face");
        const std::uint64_t n = r.Count(t[0]);
        if (t.size() != n + 1) r.Fail("face arity mismatch");
        idx.clear();
        for (std::uint64_t k = 0; k < n; ++k) idx.push_back(r.Count(t[k + 1]));
        AddPolygon(r, idx, vertices.size(), faces);
      }
    } else {
      for (std::uint64_t i = 0; i < e.count; ++i) r.Require(t, e.name.c_str());
    }
  }
  if (!saw_vertex) r.Fail("no vertex element");
  if (r.Next(t)) r.Fail("unexpected trailing content");
  if (faces.empty()) return PointCloud(std::move(vertices));
  return TriangleMesh(std::move(vertices), std::move(faces));
}

PointCloud ParseXyz(std::istream& in) {
  LineReader r(in, "XYZ");
  std::vector<std::string_view> t;
  std::vector<Point> pts;
  while (r.Next(t)) pts.push_back(ReadPoint(r, t));
  return PointCloud(std::move(pts));
}

Geometry ReadGeometry(const std::string& path, FileFormat format) {
  auto in = OpenIn(path);
  try {
    switch (format) {
      case FileFormat::kOff: return ParseOff(in);
      case FileFormat::kPly: return ParsePly(in);
      case FileFormat::kXyz: return ParseXyz(in);
    }
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.what());
  }
  ThrowUsage("unknown format");
}

PointCloud ReadCloud(const std::string& path, FileFormat format) {
  Geometry g = ReadGeometry(path, format);
  if (auto* mesh = std::get_if<TriangleMesh>(&g)) {
    return PointCloud(mesh->vertices());
  }
  return std::get<PointCloud>(std::move(g));
}

PointCloud ReadCloud(const std::string& path) {
  return ReadCloud(path, FormatFromPath(path));
}

TriangleMesh ReadMesh(const std::string& path) {
  const FileFormat format = FormatFromPath(path);
  if (format == FileFormat::kXyz) ThrowUsage("XYZ files carry no faces");
  Geometry g = ReadGeometry(path, format);
  if (auto* mesh = std::get_if<TriangleMesh>(&g)) return std::move(*mesh);
  ThrowIo(path + ": file has no faces");
}

void WriteXyz(std::ostream& out, const PointCloud& c) {
  for (const Point& p : c) {
    WritePoint(out, p);
    out << '\n';
  }
}

void WritePly(std::ostream& out, const PointCloud& c) {
  out << "ply\nformat ascii 1.0\nelement vertex " << c.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "end_header\n";
  WriteXyz(out, c);
}

void WriteColoredPly(std::ostream& out, const PointCloud& c,
                     std::span<const Rgb> colors) {
  if (colors.size() != c.size()) ThrowUsage("one color per point required");
  out << "ply\nformat ascii 1.0\nelement vertex " << c.size()
      << "\nproperty double x\nproperty double y\nproperty double z\n"
         "property uchar red\nproperty uchar green\nproperty uchar blue\n"
         "end_header\n";
  for (std::size_t i = 0; i < c.size(); ++i) {
    WritePoint(out, c[i]);
    out << ' ' << int(colors[i][0]) << ' ' << int(colors[i][1]) << ' '
        << int(colors[i][2]) << '\n';
  }
}

void WriteCloud(const PointCloud& c, const std::string& path,
                FileFormat format) {
  if (format == FileFormat::kOff) ThrowUsage("OFF output is not supported");
  auto out = OpenOut(path);
  if (format == FileFormat::kPly) {
    WritePly(out, c);
  } else {
    WriteXyz(out, c);
  }
  Finish(out, path);
}

void WriteColoredPly(const PointCloud& c, std::span<const Rgb> colors,
                     const std::string& path) {
  auto out = OpenOut(path);
  WriteColoredPly(out, c, colors);
  Finish(out, path);
}

}  // namespace dreamcloud
