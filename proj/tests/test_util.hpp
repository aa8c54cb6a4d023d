#pragma once

#include <cstdlib>
#include <filesystem>
#include <string>

// Scratch directory for a test case, wiped on creation.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const char* root = std::getenv("BLEBSIM_TEST_TMP");
  std::filesystem::path dir =
      (root ? std::filesystem::path(root) : std::filesystem::temp_directory_path() / "blebsim_tests") / name;
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}
