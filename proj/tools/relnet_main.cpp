#include <string>
#include <vector>

#include "relnet/cli.hpp"

int main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return relnet::cli::run_command(args);
}
