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

#include "dreamcloud/shapes.hpp"

#include <cmath>
#include <numbers>
#include <vector>

namespace dreamcloud::shapes {
namespace {

constexpr double kPi = std::numbers::pi;

std::uint32_t U(std::size_t i) { return static_cast<std::uint32_t>(i); }

// Grid of (rows + 1) x cols vertices wrapped in the column direction,
// triangulated into quads. Rows that collapse to a point produce degenerate
// triangles, which are skipped.
TriangleMesh Revolve(const std::vector<std::pair<double, double>>& profile,
                     int slices) {
  std::vector<Point> v;
  std::vector<Face> f;
  for (const auto& [r, z] : profile) {
    for (int s = 0; s < slices; ++s) {
      const double a = 2.0 * kPi * s / slices;
      v.push_back({r * std::cos(a), r * std::sin(a), z});
    }
  }
  auto id = [&](std::size_t row, int s) { return U(row * slices + (s % slices)); };
  auto area2 = [&](std::uint32_t a, std::uint32_t b, std::uint32_t c) {
    const Point& p = v[a];
    const Point& q = v[b];
    const Point& w = v[c];
    const double ux = q[0] - p[0], uy = q[1] - p[1], uz = q[2] - p[2];
    const double wx = w[0] - p[0], wy = w[1] - p[1], wz = w[2] - p[2];
    const double cx = uy * wz - uz * wy, cy = uz * wx - ux * wz,
                 cz = ux * wy - uy * wx;
    return cx * cx + cy * cy + cz * cz;
  };
  for (std::size_t row = 0; row + 1 < profile.size(); ++row) {
    for (int s = 0; s < slices; ++s) {
      const auto a = id(row, s), b = id(row, s + 1), c = id(row + 1, s + 1),
                 d = id(row + 1, s);
      if (area2(a, b, c) > 0.0) f.push_back({a, b, c});
      if (area2(a, c, d) > 0.0) f.push_back({a, c, d});
    }
  }
  return TriangleMesh(std::move(v), std::move(f));
}

}  // namespace

TriangleMesh Sphere(double radius, int slices, int stacks) {
  std::vector<std::pair<double, double>> profile;
  for (int i = 0; i <= stacks; ++i) {
    const double phi = kPi * i / stacks;
    profile.emplace_back(radius * std::sin(phi), -radius * std::cos(phi));
  }
  return Revolve(profile, slices);
}

TriangleMesh Box(double sx, double sy, double sz) {
  const double x = sx / 2, y = sy / 2, z = sz / 2;
  std::vector<Point> v = {{-x, -y, -z}, {x, -y, -z}, {x, y, -z}, {-x, y, -z},
                          {-x, -y, z},  {x, -y, z},  {x, y, z},  {-x, y, z}};
  std::vector<Face> f = {{0, 2, 1}, {0, 3, 2}, {4, 5, 6}, {4, 6, 7},
                         {0, 1, 5}, {0, 5, 4}, {1, 2, 6}, {1, 6, 5},
                         {2, 3, 7}, {2, 7, 6}, {3, 0, 4}, {3, 4, 7}};
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh Cone(double radius, double height, int slices) {
  return Revolve({{0.0, 0.0}, {radius, 0.0}, {0.0, height}}, slices);
}

TriangleMesh Cylinder(double radius, double height, int slices, bool caps) {
  const double h = height / 2;
  if (!caps) return Revolve({{radius, -h}, {radius, h}}, slices);
  return Revolve({{0.0, -h}, {radius, -h}, {radius, h}, {0.0, h}}, slices);
}

TriangleMesh Torus(double major, double minor, int rings, int sides) {
  std::vector<Point> v;
  std::vector<Face> f;
  for (int i = 0; i < rings; ++i) {
    const double u = 2.0 * kPi * i / rings;
    for (int j = 0; j < sides; ++j) {
      const double w = 2.0 * kPi * j / sides;
      const double r = major + minor * std::cos(w);
      v.push_back({r * std::cos(u), r * std::sin(u), minor * std::sin(w)});
    }
  }
  auto id = [&](int i, int j) { return U((i % rings) * sides + (j % sides)); };
  for (int i = 0; i < rings; ++i) {
    for (int j = 0; j < sides; ++j) {
      f.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1)});
      f.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1)});
    }
  }
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh Plane(double size) {
  const double s = size / 2;
  return TriangleMesh({{-s, -s, 0}, {s, -s, 0}, {s, s, 0}, {-s, s, 0}},
                      {{0, 1, 2}, {0, 2, 3}});
}

TriangleMesh Pyramid(double base, double height) {
  const double b = base / 2;
  return TriangleMesh(
      {{-b, -b, 0}, {b, -b, 0}, {b, b, 0}, {-b, b, 0}, {0, 0, height}},
      {{0, 2, 1}, {0, 3, 2}, {0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}});
}

TriangleMesh Capsule(double radius, double length, int slices, int stacks) {
  std::vector<std::pair<double, double>> profile;
  const double h = length / 2;
  for (int i = 0; i <= stacks; ++i) {
    const double phi = 0.5 * kPi * i / stacks;
    profile.emplace_back(radius * std::sin(phi), -h - radius * std::cos(phi));
  }
  for (int i = 0; i <= stacks; ++i) {
    const double phi = 0.5 * kPi * i / stacks;
    profile.emplace_back(radius * std::cos(phi), h + radius * std::sin(phi));
  }
  return Revolve(profile, slices);
}

TriangleMesh Translate(const TriangleMesh& mesh, const Point& o) {
  std::vector<Point> v = mesh.vertices();
  for (Point& p : v) {
    for (int d = 0; d < 3; ++d) p[d] += o[d];
  }
  return TriangleMesh(std::move(v), mesh.faces());
}

TriangleMesh Scale(const TriangleMesh& mesh, const Point& s) {
  std::vector<Point> v = mesh.vertices();
  for (Point& p : v) {
    for (int d = 0; d < 3; ++d) p[d] *= s[d];
  }
  return TriangleMesh(std::move(v), mesh.faces());
}

TriangleMesh RotateZ(const TriangleMesh& mesh, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  std::vector<Point> v = mesh.vertices();
  for (Point& p : v) p = {c * p[0] - s * p[1], s * p[0] + c * p[1], p[2]};
  return TriangleMesh(std::move(v), mesh.faces());
}

TriangleMesh Merge(std::span<const TriangleMesh> meshes) {
  std::vector<Point> v;
  std::vector<Face> f;
  for (const TriangleMesh& m : meshes) {
    const auto base = U(v.size());
    v.insert(v.end(), m.vertices().begin(), m.vertices().end());
    for (const Face& face : m.faces()) {
      f.push_back({face.a + base, face.b + base, face.c + base});
    }
  }
  return TriangleMesh(std::move(v), std::move(f));
}

TriangleMesh Bottle() {
  const TriangleMesh parts[] = {
      Translate(Cylinder(0.5, 1.4), {0, 0, 0.7}),
      Revolve({{0.5, 1.4}, {0.18, 1.75}}, 48),
      Translate(Cylinder(0.18, 0.5, 48, false), {0, 0, 2.0}),
  };
  return Merge(parts);
}

TriangleMesh Guitar() {
  const TriangleMesh parts[] = {
      Scale(Sphere(0.5), {1.0, 0.35, 1.0}),
      Scale(Translate(Sphere(0.38), {0, 0, 0.62}), {1.0, 0.35, 1.0}),
      Translate(Box(0.12, 0.06, 1.4), {0, 0, 1.6}),
      Translate(Box(0.22, 0.06, 0.25), {0, 0, 2.4}),
  };
  return Merge(parts);
}

TriangleMesh Airplane() {
  // Built with the fuselage along z, then x and z are swapped.
  const TriangleMesh parts[] = {
      Capsule(0.18, 2.6),
      Box(0.05, 3.0, 0.5),                                // wings
      Translate(Box(0.04, 1.0, 0.3), {0, 0, -1.4}),       // tailplane
      Translate(Box(0.5, 0.05, 0.3), {0.25, 0, -1.4}),    // fin
  };
  const TriangleMesh merged = Merge(parts);
  std::vector<Point> v = merged.vertices();
  for (Point& p : v) p = {p[2], p[1], p[0]};
  return TriangleMesh(std::move(v), merged.faces());
}

}  // namespace dreamcloud::shapes
