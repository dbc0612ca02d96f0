#include <iostream>

#include "secretary/cli.hpp"

int main(int argc, char** argv) {
  using namespace secretary::cli;
  CliOptions opts;
  try {
    opts = parse_config(argc, argv);
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\nrun with --help for options\n";
    return kUsageError;
  }
  return run(opts, std::cout, std::cerr);
}
