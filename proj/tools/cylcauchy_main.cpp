#include <vector>

#include "cylcauchy/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cylcauchy::cli::run(args);
}
