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

#include <algorithm>
#include <exception>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "commands.hpp"
#include "lcd/error.hpp"
#include "lcd/io_util.hpp"

namespace lcd::cli {

std::string HashPath(const fs::path& path) {
  if (!fs::is_directory(path)) return io::Hex64(io::Fnv1a(io::ReadFile(path)));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(path)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::string acc;
  for (const fs::path& p : files) {
    acc += fs::relative(p, path).generic_string() + '\t' + HashPath(p) + '\n';
  }
  return io::Hex64(io::Fnv1a(acc));
}

std::string HashManifest(const fs::path& path) {
  std::string acc = HashPath(path) + '\n';
  for (const ManifestEntry& e : ReadManifest(path)) {
    acc += e.utt_id + '\t' + HashPath(e.wav_path) + '\n';
  }
  return io::Hex64(io::Fnv1a(acc));
}

void RunRecord::Input(const std::string& key, const fs::path& path) {
  inputs_[key] = HashPath(path);
}

std::string RunRecord::ConfigHash() const {
  std::string acc = command_ + '\n';
  for (const auto& [k, v] : options_) acc += k + '=' + v + '\n';
  return io::Hex64(io::Fnv1a(acc));
}

ManifestFields RunRecord::Fields() const {
  ManifestFields f;
  f.emplace_back("command", command_);
  f.emplace_back("config_hash", ConfigHash());
  for (const auto& [k, v] : options_) f.emplace_back("option." + k, v);
  for (const auto& [k, v] : inputs_) f.emplace_back("input." + k, v);
  return f;
}

std::string RunRecord::Json() const {
  nlohmann::ordered_json j;
  j["tool"] = "lcd";
  j["command"] = command_;
  j["config_hash"] = ConfigHash();
  j["options"] = options_;
  j["inputs"] = inputs_;
  j["outputs"] = outputs_;
  return j.dump(2) + "\n";
}

void ParallelFor(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn) {
  const std::size_t workers =
      std::min<std::size_t>(n, static_cast<std::size_t>(std::max(1, jobs)));
  std::vector<std::exception_ptr> errors(n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) {
      try {
        fn(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::mutex mu;
    std::size_t next = 0;
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          std::size_t i;
          {
            std::lock_guard<std::mutex> lock(mu);
            if (next >= n) return;
            i = next++;
          }
          try {
            fn(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
  }
  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

void RequireExists(const std::string& path, const std::string& what) {
  if (path.empty()) Fail(ErrorCode::kInvalidArgument, what + " is required");
  if (!fs::exists(path)) Fail(ErrorCode::kIoError, what + " not found: " + path);
}

}  // namespace lcd::cli
