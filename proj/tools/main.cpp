#include <string>
#include <vector>

#include "tl1/cli.hpp"

int main(int argc, char** argv) {
  return tl1::run_cli(std::vector<std::string>(argv + 1, argv + argc));
}
