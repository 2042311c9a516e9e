// Serves the scripted stub endpoint until interrupted.

#include <csignal>
#include <iostream>

#include <CLI11.hpp>

#include "stub_endpoint.hpp"

int main(int argc, char** argv) {
  CLI::App app{"entropybench-stub: scripted chat-completion endpoint for offline runs"};
  std::string mode = "echo";
  int port = 0;
  std::uint64_t seed = 2024;
  app.add_option("--mode", mode, "echo, prose, partial, tool, runaway, malformed, shuffles, code, auth_fail, flaky");
  app.add_option("--port", port, "Listen port (0 picks a free one)");
  app.add_option("--seed", seed, "Seed for generated replies");
  CLI11_PARSE(app, argc, argv);

  try {
    entropybench::stub::StubServer server(entropybench::stub::mode_from_string(mode), port, seed);
    std::cout << server.base_url() << std::endl;
    server.wait();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
