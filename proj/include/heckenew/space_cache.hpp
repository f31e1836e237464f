#pragma once

#include <cstdint>
#include <filesystem>
#include <future>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <utility>
#include <vector>

#include "heckenew/modsym.hpp"

namespace heckenew {

// Shared store of built ManinSpaces. Lookups take a shared lock; the first
// requester of a key builds it (or loads it from disk) and everyone else waits
// on the same future.
class SpaceCache {
 public:
  struct DiskEntry {
    i64 level;
    int weight;
    int version;
    std::uintmax_t bytes;
    std::filesystem::path path;
  };

  SpaceCache() = default;
  explicit SpaceCache(std::filesystem::path dir);

  std::shared_ptr<const modsym::ManinSpace> get(i64 level, int weight);

  const std::optional<std::filesystem::path>& directory() const { return dir_; }
  std::vector<DiskEntry> disk_entries() const;
  // Removes entries of the current format version; returns how many.
  std::size_t clear_disk();

  static std::string file_name(i64 level, int weight, int version);

 private:
  using Key = std::pair<i64, int>;
  using Value = std::shared_future<std::shared_ptr<const modsym::ManinSpace>>;

  std::shared_ptr<const modsym::ManinSpace> load_or_build(i64 level, int weight) const;

  std::optional<std::filesystem::path> dir_;
  mutable std::shared_mutex mutex_;
  std::map<Key, Value> spaces_;
};

}  // namespace heckenew
