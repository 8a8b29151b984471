#include <string>
#include <vector>

#include "aftnet/io.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return aftnet::run_cli(args);
}
