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

#pragma once

#include <span>

#include "dreamcloud/cloud.hpp"

// Procedural triangle meshes used by the synthetic dataset and by fixtures.
namespace dreamcloud::shapes {

TriangleMesh Sphere(double radius, int slices = 48, int stacks = 24);
TriangleMesh Box(double sx, double sy, double sz);
// Axis along z, base at z = 0, closed with a base disk.
TriangleMesh Cone(double radius, double height, int slices = 48);
// Axis along z, centered, with caps.
TriangleMesh Cylinder(double radius, double height, int slices = 48,
                      bool caps = true);
TriangleMesh Torus(double major, double minor, int rings = 48,
                   int sides = 24);
// Square sheet in the xy plane.
TriangleMesh Plane(double size);
// Square base at z = 0, apex at (0, 0, height).
TriangleMesh Pyramid(double base, double height);
// Cylinder of `length` with hemispherical ends, axis along z.
TriangleMesh Capsule(double radius, double length, int slices = 48,
                     int stacks = 12);

TriangleMesh Translate(const TriangleMesh& mesh, const Point& offset);
TriangleMesh Scale(const TriangleMesh& mesh, const Point& factors);
TriangleMesh RotateZ(const TriangleMesh& mesh, double radians);
TriangleMesh Merge(std::span<const TriangleMesh> meshes);

// Composite fixtures standing in for dataset objects.
TriangleMesh Bottle();    // wide cylinder body, narrow neck on top
TriangleMesh Guitar();    // flattened body at z < 0.6, long neck above
TriangleMesh Airplane();  // fuselage along x, wings along y, tail fin

}  // namespace dreamcloud::shapes
