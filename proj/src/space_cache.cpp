#include "heckenew/space_cache.hpp"

#include <algorithm>
#include <fstream>
#include <mutex>
#include <regex>
#include <sstream>
#include <stdexcept>
#include <thread>
#include <tuple>

namespace heckenew {

namespace fs = std::filesystem;

SpaceCache::SpaceCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(*dir_, ec);
  if (ec || !fs::is_directory(*dir_)) throw std::runtime_error("cache directory not accessible: " + dir_->string());
}

std::string SpaceCache::file_name(i64 level, int weight, int version) {
  return "space_N" + std::to_string(level) + "_w" + std::to_string(weight) + "_v" + std::to_string(version) + ".json";
}

std::shared_ptr<const modsym::ManinSpace> SpaceCache::load_or_build(i64 level, int weight) const {
  const int version = modsym::ManinSpace::kFormatVersion;
  if (dir_) {
    fs::path path = *dir_ / file_name(level, weight, version);
    std::ifstream in(path);
    if (in) {
      try {
        ojson j = ojson::parse(in);
        return std::make_shared<const modsym::ManinSpace>(modsym::ManinSpace::from_json(j));
      } catch (const std::exception&) {
        // unreadable entry: rebuild and overwrite below
      }
    }
  }
  auto space = std::make_shared<const modsym::ManinSpace>(modsym::build_manin_space(level, weight));
  if (dir_) {
    fs::path path = *dir_ / file_name(level, weight, version);
    std::ostringstream tag;
    tag << std::this_thread::get_id();
    fs::path tmp = path;
    tmp += ".tmp" + tag.str();
    {
      std::ofstream out(tmp, std::ios::trunc);
      if (!out) throw std::runtime_error("cannot write cache entry " + tmp.string());
      out << space->to_json().dump();
    }
    fs::rename(tmp, path);
  }
  return space;
}

std::shared_ptr<const modsym::ManinSpace> SpaceCache::get(i64 level, int weight) {
  const Key key{level, weight};
  {
    std::shared_lock lock(mutex_);
    auto it = spaces_.find(key);
    if (it != spaces_.end()) {
      Value v = it->second;
      lock.unlock();
      return v.get();
    }
  }
  std::promise<std::shared_ptr<const modsym::ManinSpace>> promise;
  Value mine = promise.get_future().share();
  {
    std::unique_lock lock(mutex_);
    auto [it, inserted] = spaces_.emplace(key, mine);
    if (!inserted) {
      Value v = it->second;
      lock.unlock();
      return v.get();
    }
  }
  try {
    promise.set_value(load_or_build(level, weight));
  } catch (...) {
    promise.set_exception(std::current_exception());
    std::unique_lock lock(mutex_);
    spaces_.erase(key);
    throw;
  }
  return mine.get();
}

std::vector<SpaceCache::DiskEntry> SpaceCache::disk_entries() const {
  std::vector<DiskEntry> out;
  if (!dir_) return out;
  static const std::regex pattern(R"(space_N(\d+)_w(\d+)_v(\d+)\.json)");
  for (const auto& e : fs::directory_iterator(*dir_)) {
    if (!e.is_regular_file()) continue;
    std::smatch m;
    std::string name = e.path().filename().string();
    if (!std::regex_match(name, m, pattern)) continue;
    out.push_back({std::stoll(m[1]), std::stoi(m[2]), std::stoi(m[3]), e.file_size(), e.path()});
  }
  std::sort(out.begin(), out.end(), [](const DiskEntry& a, const DiskEntry& b) {
    return std::tie(a.level, a.weight, a.version) < std::tie(b.level, b.weight, b.version);
  });
  return out;
}

std::size_t SpaceCache::clear_disk() {
  std::size_t removed = 0;
  for (const auto& e : disk_entries()) {
    if (e.version != modsym::ManinSpace::kFormatVersion) continue;
    if (fs::remove(e.path)) ++removed;
  }
  std::unique_lock lock(mutex_);
  spaces_.clear();
  return removed;
}

}  // namespace heckenew
