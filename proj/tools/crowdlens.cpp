#include <iostream>
#include <string>
#include <vector>

#include "crowdlens/cli.hpp"

int main(int argc, char** argv) {
  return crowdlens::run_cli(std::vector<std::string>(argv + 1, argv + argc), std::cerr);
}
