// Copyright 2026 The lcdkit Authors.
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

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace lcd::io {

// Writes to a sibling temporary file and renames it into place, so readers
// never observe a partially written file.
void AtomicWrite(const std::filesystem::path& path, std::string_view bytes);

std::string ReadFile(const std::filesystem::path& path);

// Splits on '\n', dropping a trailing '\r' and skipping empty lines.
std::vector<std::string> ReadLines(const std::filesystem::path& path);

std::vector<std::string> Split(std::string_view s, char sep);

std::string Trim(std::string_view s);

// Fixed-point formatting with the given number of decimals ("%.*f").
std::string Fixed(double v, int decimals);

// Shortest form that round-trips a double exactly.
std::string Exact(double v);

// Seventeen significant digits ("%.17g"), the layout of model files.
std::string Digits17(double v);

double ParseDouble(std::string_view s);
std::int64_t ParseInt(std::string_view s);

// 64-bit FNV-1a, used for config and content fingerprints.
std::uint64_t Fnv1a(std::string_view bytes);
std::string Hex64(std::uint64_t v);

}  // namespace lcd::io
