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

#include "amanda/service/store.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cctype>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "amanda/error.hpp"

namespace amanda::service {
namespace {

void write_all(int fd, const std::string& bytes, const std::filesystem::path& path) {
  std::size_t done = 0;
  while (done < bytes.size()) {
    const ssize_t n = ::write(fd, bytes.data() + done, bytes.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error("write " + path.string() + ": " + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) throw Error("fsync " + path.string() + ": " + std::strerror(errno));
}

void fsync_dir(const std::filesystem::path& dir) {
  const int fd = ::open(dir.c_str(), O_RDONLY | O_DIRECTORY);
  if (fd < 0) return;
  ::fsync(fd);
  ::close(fd);
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

bool valid_name(const std::string& name) {
  if (name.empty() || name.size() > 128) return false;
  for (char c : name)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.')) return false;
  return name.front() != '.';
}

void MemoryStore::append(const std::string& collection, const json& doc) {
  std::lock_guard lock(mu_);
  docs_[collection].push_back(doc);
}

std::vector<json> MemoryStore::scan(const std::string& collection) {
  std::lock_guard lock(mu_);
  auto it = docs_.find(collection);
  return it == docs_.end() ? std::vector<json>{} : it->second;
}

void MemoryStore::put_blob(const std::string& name, const std::string& bytes) {
  std::lock_guard lock(mu_);
  blobs_[name] = bytes;
}

std::optional<std::string> MemoryStore::get_blob(const std::string& name) {
  std::lock_guard lock(mu_);
  auto it = blobs_.find(name);
  if (it == blobs_.end()) return std::nullopt;
  return it->second;
}

FileStore::FileStore(std::filesystem::path dir) : dir_(std::move(dir)) {
  std::filesystem::create_directories(dir_ / "blobs");
}

std::filesystem::path FileStore::file_for(const std::string& collection) const {
  if (!valid_name(collection)) throw ValidationError("bad collection name '" + collection + "'");
  return dir_ / (collection + ".jsonl");
}

void FileStore::recover(const std::string& collection) {
  if (recovered_collections_[collection]) return;
  recovered_collections_[collection] = true;
  const auto path = file_for(collection);
  if (!std::filesystem::exists(path)) return;
  const std::string bytes = slurp(path);
  const auto last = bytes.find_last_of('\n');
  const std::size_t keep = last == std::string::npos ? 0 : last + 1;
  if (keep == bytes.size()) return;
  std::filesystem::resize_file(path, keep);
  recovered_ += bytes.size() - keep;
}

void FileStore::append(const std::string& collection, const json& doc) {
  std::string line = doc.dump();
  line.push_back('\n');
  std::lock_guard lock(mu_);
  recover(collection);
  const auto path = file_for(collection);
  const int fd = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("open " + path.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, line, path);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
}

std::vector<json> FileStore::scan(const std::string& collection) {
  std::lock_guard lock(mu_);
  recover(collection);
  std::vector<json> out;
  const auto path = file_for(collection);
  if (!std::filesystem::exists(path)) return out;
  std::istringstream in(slurp(path));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ParseError(path.string() + " line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

void FileStore::put_blob(const std::string& name, const std::string& bytes) {
  if (!valid_name(name)) throw ValidationError("bad blob name '" + name + "'");
  const auto final_path = dir_ / "blobs" / name;
  const auto tmp = dir_ / "blobs" / (name + ".tmp");
  const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
  if (fd < 0) throw Error("open " + tmp.string() + ": " + std::strerror(errno));
  try {
    write_all(fd, bytes, tmp);
  } catch (...) {
    ::close(fd);
    throw;
  }
  ::close(fd);
  std::filesystem::rename(tmp, final_path);
  fsync_dir(dir_ / "blobs");
}

std::optional<std::string> FileStore::get_blob(const std::string& name) {
  if (!valid_name(name)) return std::nullopt;
  const auto path = dir_ / "blobs" / name;
  if (!std::filesystem::is_regular_file(path)) return std::nullopt;
  return slurp(path);
}

}  // namespace amanda::service
