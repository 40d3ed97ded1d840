#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "safeplan/bundle.hpp"

namespace testing_support {

inline std::filesystem::path fixtures_dir() { return SAFEPLAN_FIXTURES_DIR; }
inline std::filesystem::path bundles_dir() { return fixtures_dir() / "bundles"; }

inline safeplan::TaskBundle load_fixture(const std::string& name) {
  return safeplan::parse_bundle(bundles_dir() / name);
}

inline std::vector<safeplan::TaskBundle> load_all_fixtures() {
  std::vector<safeplan::TaskBundle> out;
  for (const auto& dir : safeplan::find_bundle_dirs(bundles_dir())) out.push_back(safeplan::parse_bundle(dir));
  return out;
}

/// Fresh empty directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() /
            ("safeplan-" + tag + "-" + std::to_string(rd()) + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

} // namespace testing_support
