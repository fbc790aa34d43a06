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

#include <array>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <variant>

#include "dreamcloud/cloud.hpp"

namespace dreamcloud {

enum class FileFormat { kOff, kPly, kXyz };

// "off", "ply" or "xyz" (case-insensitive); throws a usage error otherwise.
FileFormat ParseFileFormat(std::string_view name);
// Format implied by the file extension.
FileFormat FormatFromPath(const std::string& path);
std::string_view FormatName(FileFormat format);

using Geometry = std::variant<PointCloud, TriangleMesh>;

// OFF grammar: '#' starts a comment; blank lines are skipped. The header is
// either "OFF" on its own line followed by "nv nf ne", or "OFF nv nf ne" on
// one line ("OFF490 518 0", as found in ModelNet40, is accepted). Vertex lines
// carry at least three coordinates; extra columns are ignored. Face lines are
// "n i0 .. i(n-1)"; polygons with n > 3 are fan-triangulated. Errors name the
// 1-based line number.
Geometry ParseOff(std::istream& in);
// ASCII PLY 1.0. Vertex x/y/z are read by name from any numeric property
// types; a face element with a vertex index list is optional.
Geometry ParsePly(std::istream& in);
// One "x y z" triple per line; extra columns are ignored.
PointCloud ParseXyz(std::istream& in);

Geometry ReadGeometry(const std::string& path, FileFormat format);
// Reads any supported format; meshes yield their vertices.
PointCloud ReadCloud(const std::string& path, FileFormat format);
PointCloud ReadCloud(const std::string& path);
// Reads an OFF or PLY file that must contain faces.
TriangleMesh ReadMesh(const std::string& path);

using Rgb = std::array<std::uint8_t, 3>;

// Coordinates are written with 17 significant digits.
void WriteXyz(std::ostream& out, const PointCloud& c);
void WritePly(std::ostream& out, const PointCloud& c);
void WriteColoredPly(std::ostream& out, const PointCloud& c,
                     std::span<const Rgb> colors);

// PLY or XYZ; OFF output is not supported.
void WriteCloud(const PointCloud& c, const std::string& path,
                FileFormat format);
void WriteColoredPly(const PointCloud& c, std::span<const Rgb> colors,
                     const std::string& path);

}  // namespace dreamcloud
