#include <iostream>

#include "ppgcoop/cli.hpp"

int main(int argc, char** argv) {
  return ppgcoop::parse_and_dispatch(argc, argv, std::cout, std::cerr);
}
