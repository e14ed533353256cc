// Regenerates the hash-keyed mock scripts under data/fixtures from the
// answer sheets. Run after changing a prompt template or an answer sheet.
#include <iostream>

#include "nckg/io.hpp"
#include "scripted.hpp"

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: nckg_fixture_gen <data-dir>\n";
    return 2;
  }
  const std::filesystem::path fx = std::filesystem::path(argv[1]) / "fixtures";
  try {
    nckg::write_file_atomic(fx / "extract_mock.json",
                            nckg::testing::generate_extract_mock(fx / "extract_answers.json", fx / "corpus3.jsonl"));
    nckg::write_file_atomic(fx / "review6_mock.json",
                            nckg::testing::generate_review_mock(fx / "review6_answers.json", fx / "review6.jsonl",
                                                                fx / "advance_seed.ttls"));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cout << "wrote " << (fx / "extract_mock.json").string() << " and " << (fx / "review6_mock.json").string()
            << "\n";
  return 0;
}
