#include <vector>

#include "phmor/cli.hpp"

int main(int argc, char** argv) {
  return phmor::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
