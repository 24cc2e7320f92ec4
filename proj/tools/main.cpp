#include <iostream>

#include "firecast/cli.hpp"

int main(int argc, char** argv) {
  return firecast::run_cli({argv + 1, argv + argc}, std::cout, std::cerr);
}
