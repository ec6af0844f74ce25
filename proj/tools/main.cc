#include <iostream>

#include "acefl/cli.h"

int main(int argc, char** argv) {
  return acefl::CliMain(argc, argv, std::cout, std::cerr);
}
