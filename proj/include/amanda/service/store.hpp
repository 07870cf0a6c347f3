// Copyright 2026 The Amanda Authors. All Rights Reserved.
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

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace amanda::service {

using nlohmann::json;

// Append-only collections of JSON documents plus immutable named blobs.
// A single append is all-or-nothing.
class DocumentStore {
 public:
  virtual ~DocumentStore() = default;
  virtual void append(const std::string& collection, const json& doc) = 0;
  virtual std::vector<json> scan(const std::string& collection) = 0;
  virtual void put_blob(const std::string& name, const std::string& bytes) = 0;
  virtual std::optional<std::string> get_blob(const std::string& name) = 0;
};

class MemoryStore : public DocumentStore {
 public:
  void append(const std::string& collection, const json& doc) override;
  std::vector<json> scan(const std::string& collection) override;
  void put_blob(const std::string& name, const std::string& bytes) override;
  std::optional<std::string> get_blob(const std::string& name) override;

 private:
  std::mutex mu_;
  std::map<std::string, std::vector<json>> docs_;
  std::map<std::string, std::string> blobs_;
};

// One JSON document per line in <dir>/<collection>.jsonl, fsync'd on every
// append. A torn final line left by a crash is dropped (and truncated away)
// the first time the collection is opened. Blobs live in <dir>/blobs and are
// written via temp file + rename.
class FileStore : public DocumentStore {
 public:
  explicit FileStore(std::filesystem::path dir);

  void append(const std::string& collection, const json& doc) override;
  std::vector<json> scan(const std::string& collection) override;
  void put_blob(const std::string& name, const std::string& bytes) override;
  std::optional<std::string> get_blob(const std::string& name) override;

  const std::filesystem::path& dir() const { return dir_; }
  // Bytes discarded from torn tails so far.
  std::size_t recovered_bytes() const { return recovered_; }

 private:
  std::filesystem::path file_for(const std::string& collection) const;
  void recover(const std::string& collection);

  std::filesystem::path dir_;
  std::mutex mu_;
  std::map<std::string, bool> recovered_collections_;
  std::size_t recovered_ = 0;
};

bool valid_name(const std::string& name);

}  // namespace amanda::service
