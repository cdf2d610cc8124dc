// Writes the synthetic mini corpus into a directory: make_mini_corpus DIR [N_PAIRS]

#include <cstdio>
#include <filesystem>
#include <string>

#include "generators.hpp"

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: %s DIR [N_PAIRS]\n", argv[0]);
    return 1;
  }
  const int n = argc > 2 ? std::stoi(argv[2]) : 500;
  std::filesystem::remove_all(argv[1]);
  const auto files = srlproj::testing::write_mini_corpus(argv[1], 13, n);
  std::printf("%s\n", files.config.string().c_str());
  return 0;
}
