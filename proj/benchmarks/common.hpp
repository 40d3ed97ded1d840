#pragma once

#include <filesystem>
#include <string>

#include "safeplan/bundle.hpp"

inline safeplan::TaskBundle bench_fixture(const std::string& name) {
  return safeplan::parse_bundle(std::filesystem::path(SAFEPLAN_FIXTURES_DIR) / "bundles" / name);
}
