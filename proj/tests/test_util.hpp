// Shared helpers for the test binaries.
#ifndef ATRISK_TESTS_TEST_UTIL_HPP_
#define ATRISK_TESTS_TEST_UTIL_HPP_

#include <array>
#include <cstdio>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "atrisk/domain_data.hpp"

namespace atrisk::testing {

inline std::filesystem::path data_path(const std::string& name) {
  return std::filesystem::path(ATRISK_TEST_DATA_DIR) / name;
}

// Grade records from per-letter counts ordered A, B, C, D, F (the column
// order of the course tables).
inline std::vector<GradeRecord> cohort_from_counts(const std::array<int, 5>& abcdf) {
  const std::array<Grade, 5> letters{Grade::kA, Grade::kB, Grade::kC, Grade::kD, Grade::kF};
  std::vector<GradeRecord> out;
  int id = 0;
  for (std::size_t g = 0; g < 5; ++g) {
    for (int i = 0; i < abcdf[g]; ++i) {
      char buf[16];
      std::snprintf(buf, sizeof buf, "st%04d", id++);
      out.push_back({buf, letters[g]});
    }
  }
  return out;
}

// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() / ("atrisk_test_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace atrisk::testing

#endif  // ATRISK_TESTS_TEST_UTIL_HPP_
