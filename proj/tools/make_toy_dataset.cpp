// Regenerates the bundled toy benchmark tables under data/.

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "tablegan/table_io.hpp"
#include "tablegan/toy.hpp"

using namespace tablegan;

namespace {

constexpr const char* kSchemaText =
    "# toy benchmark schema: 15 attributes plus a binary label\n"
    "# rule: label = 1 when a1 + a2 > 1\n"
    "column a1 continuous min=0 max=1\n"
    "column a2 continuous min=0 max=1\n"
    "column a3 continuous min=0 max=1\n"
    "column a4 continuous min=0 max=1\n"
    "column a5 continuous min=0 max=1\n"
    "column a6 continuous min=0 max=1\n"
    "column a7 continuous min=-5 max=5\n"
    "column a8 continuous min=40 max=160\n"
    "column d1 discrete qid min=0 max=9\n"
    "column d2 discrete min=1 max=50\n"
    "column d3 discrete qid min=2013 max=2015\n"
    "column c1 categorical qid categories=A,B,C\n"
    "column c2 categorical categories=blue,green,red,yellow\n"
    "column a9 continuous min=0 max=1\n"
    "column a10 continuous min=0 max=1\n"
    "column label label min=0 max=1\n";

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"regenerate the bundled toy benchmark dataset"};
  std::string out_dir = "data";
  size_t train_rows = 2000;
  size_t test_rows = 400;
  uint64_t seed = 20180710;
  app.add_option("--out", out_dir, "output directory")->capture_default_str();
  app.add_option("--train-rows", train_rows, "training rows")->capture_default_str();
  app.add_option("--test-rows", test_rows, "held-out rows")->capture_default_str();
  app.add_option("--seed", seed, "generation seed")->capture_default_str();
  CLI11_PARSE(app, argc, argv);

  try {
    std::filesystem::create_directories(out_dir);
    RawTable train = make_toy_table(train_rows, seed);
    RawTable test = make_toy_table(test_rows, seed + 1);
    auto train_path = std::filesystem::path(out_dir) / "toy_train.csv";
    auto test_path = std::filesystem::path(out_dir) / "toy_test.csv";
    auto schema_path = std::filesystem::path(out_dir) / "toy_schema.cfg";
    write_table(train, train_path.string());
    write_table(test, test_path.string());
    std::ofstream schema_out(schema_path, std::ios::binary | std::ios::trunc);
    schema_out << kSchemaText;
    std::cout << "wrote " << train_path.string() << " (" << train_rows << " rows), "
              << test_path.string() << " (" << test_rows << " rows), "
              << schema_path.string() << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
