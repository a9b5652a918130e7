#include <iostream>

#include "cli.hpp"

int main(int argc, char** argv) {
  using namespace scottlab::cli;
  RunConfig config;
  try {
    config = parse_config(argc, argv);
  } catch (const HelpRequested& h) {
    std::cout << h.text;
    return h.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "error: configuration: " << e.what() << '\n';
    return 2;
  }
  return run(config, std::cout, std::cerr);
}
