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

#include <cstring>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "dreamcloud/error.hpp"
#include "dreamcloud/io.hpp"
#include "dreamcloud/shapes.hpp"
#include "test_util.hpp"

namespace dreamcloud {
namespace {

using testing::RandomCloud;

Geometry Off(const std::string& text) {
  std::istringstream in(text);
  return ParseOff(in);
}

Geometry Ply(const std::string& text) {
  std::istringstream in(text);
  return ParsePly(in);
}

std::string ErrorText(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

bool BitEqual(const PointCloud& a, const PointCloud& b) {
  return a.size() == b.size() &&
         std::memcmp(a.vec().data(), b.vec().data(), a.size() * sizeof(Point)) == 0;
}

TEST_CASE("OFF triangle mesh") {
  const Geometry g = Off(
      "OFF\n"
      "# tetra\n"
      "4 4 6\n"
      "0 0 0\n1 0 0\n0 1 0\n0 0 1\n"
      "3 0 1 2\n3 0 1 3\n3 0 2 3\n3 1 2 3\n");
  const auto& mesh = std::get<TriangleMesh>(g);
  CHECK(mesh.vertices().size() == 4);
  CHECK(mesh.faces().size() == 4);
  CHECK(mesh.faces()[1] == Face{0, 1, 3});
}

TEST_CASE("OFF quads are fan triangulated") {
  const Geometry g = Off("OFF 4 1 0\n0 0 0\n1 0 0\n1 1 0\n0 1 0\n4 0 1 2 3\n");
  const auto& mesh = std::get<TriangleMesh>(g);
  REQUIRE(mesh.faces().size() == 2);
  CHECK(mesh.faces()[0] == Face{0, 1, 2});
  CHECK(mesh.faces()[1] == Face{0, 2, 3});
  CHECK(mesh.SurfaceArea() == doctest::Approx(1.0));
}

TEST_CASE("OFF counts fused to the keyword") {
  const Geometry g = Off("OFF3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n");
  CHECK(std::get<TriangleMesh>(g).faces().size() == 1);
}

TEST_CASE("OFF without faces is a cloud") {
  const Geometry g = Off("OFF\n2 0 0\n1 2 3\n4 5 6\n");
  const auto& c = std::get<PointCloud>(g);
  CHECK(c.size() == 2);
  CHECK(c[1] == Point{4, 5, 6});
}

TEST_CASE("OFF errors carry line numbers") {
  CHECK(ErrorText([] { Off("OFX\n"); }).find("line 1") != std::string::npos);
  CHECK(ErrorText([] { Off("OFF\n2 0 0\n1 2 3\n4 x 6\n"); })
            .find("line 4: invalid number 'x'") != std::string::npos);
  CHECK(ErrorText([] { Off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 5\n"); })
            .find("line 6: vertex index 5 out of range") != std::string::npos);
  CHECK(ErrorText([] { Off("OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 1\n"); })
            .find("repeats") != std::string::npos);
  CHECK(ErrorText([] { Off("OFF\n3 0 0\n0 0 0\n1 0 0\n"); })
            .find("unexpected end of file") != std::string::npos);
  CHECK(ErrorText([] { Off("OFF\n1 0 0\n0 0 0\n7 7 7\n"); })
            .find("trailing") != std::string::npos);
  CHECK_THROWS_AS(Off("OFF\n1 0 0\n0 nan 0\n"), Error);
}

TEST_CASE("PLY vertices and faces") {
  const Geometry g = Ply(
      "ply\nformat ascii 1.0\ncomment made by hand\n"
      "element vertex 3\nproperty float y\nproperty float x\nproperty float z\n"
      "property uchar red\n"
      "element face 1\nproperty list uchar int vertex_indices\n"
      "end_header\n"
      "1 0 0 255\n0 1 0 0\n0 0 1 7\n"
      "3 0 1 2\n");
  const auto& mesh = std::get<TriangleMesh>(g);
  CHECK(mesh.vertices()[0] == Point{0, 1, 0});
  CHECK(mesh.vertices()[1] == Point{1, 0, 0});
  CHECK(mesh.faces().size() == 1);
}

TEST_CASE("PLY skips unknown elements") {
  const Geometry g = Ply(
      "ply\nformat ascii 1.0\nelement vertex 2\nproperty double x\n"
      "property double y\nproperty double z\nelement edge 1\n"
      "property int a\nproperty int b\nend_header\n1 2 3\n4 5 6\n0 1\n");
  CHECK(std::get<PointCloud>(g).size() == 2);
}

TEST_CASE("PLY errors") {
  CHECK(ErrorText([] { Ply("plx\n"); }).find("line 1") != std::string::npos);
  CHECK(ErrorText([] { Ply("ply\nformat binary_little_endian 1.0\n"); })
            .find("line 2: only ascii") != std::string::npos);
  CHECK(ErrorText([] {
          Ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
              "property float y\nend_header\n1 2\n");
        }).find("x, y, z") != std::string::npos);
  CHECK(ErrorText([] {
          Ply("ply\nformat ascii 1.0\nelement vertex 1\nproperty float x\n"
              "property float y\nproperty float z\nend_header\n1 2\n");
        }).find("line 8: wrong vertex arity") != std::string::npos);
  CHECK_THROWS_AS(Ply("ply\nformat ascii 1.0\nelement vertex 1\n"), Error);
}

TEST_CASE("XYZ ignores blank lines and comments") {
  std::istringstream in("# header\n1 2 3\n\n4 5 6 0.1 0.2 0.3\n");
  const PointCloud c = ParseXyz(in);
  REQUIRE(c.size() == 2);
  CHECK(c[1] == Point{4, 5, 6});
  std::istringstream bad("1 2\n");
  CHECK(ErrorText([&] { ParseXyz(bad); }).find("line 1") != std::string::npos);
}

TEST_CASE("XYZ and PLY round trips are bit exact") {
  PointCloud c = RandomCloud(500, 17, 1e3);
  c = Union(c, PointCloud({{1e-300, -0.0, 5e-324}, {1.0 / 3.0, 2.0 / 3.0, 0.1}}));
  for (auto format : {FileFormat::kXyz, FileFormat::kPly}) {
    std::stringstream s;
    if (format == FileFormat::kXyz) {
      WriteXyz(s, c);
      CHECK(BitEqual(ParseXyz(s), c));
    } else {
      WritePly(s, c);
      CHECK(BitEqual(std::get<PointCloud>(ParsePly(s)), c));
    }
  }
}

TEST_CASE("file helpers") {
  const auto dir = testing::TempDir("io");
  const PointCloud c = RandomCloud(20, 3);
  for (const char* name : {"a.xyz", "a.ply"}) {
    const std::string path = (dir / name).string();
    WriteCloud(c, path, FormatFromPath(path));
    CHECK(ReadCloud(path) == c);
  }
  const std::vector<Rgb> colors(c.size(), Rgb{1, 2, 3});
  WriteColoredPly(c, colors, (dir / "col.ply").string());
  CHECK(ReadCloud((dir / "col.ply").string()) == c);

  {
    std::ofstream off(dir / "m.off");
    off << "OFF\n3 1 0\n0 0 0\n1 0 0\n0 1 0\n3 0 1 2\n";
  }
  CHECK(ReadMesh((dir / "m.off").string()).faces().size() == 1);
  CHECK(ReadCloud((dir / "m.off").string()).size() == 3);

  auto kind = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.kind();
    }
    return ErrorKind::kNumeric;
  };
  CHECK(kind([&] { ReadCloud((dir / "missing.xyz").string()); }) == ErrorKind::kIo);
  CHECK(kind([&] { ReadCloud((dir / "a.obj").string()); }) == ErrorKind::kUsage);
  CHECK(kind([&] { ReadMesh((dir / "a.xyz").string()); }) == ErrorKind::kUsage);
  CHECK(ParseFileFormat("PLY") == FileFormat::kPly);
  std::filesystem::remove_all(dir);
}

}  // namespace
}  // namespace dreamcloud
