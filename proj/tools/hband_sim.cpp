// hband-sim: software stand-in for a haptic band.

#include <csignal>
#include <iostream>
#include <pthread.h>

#include <CLI11.hpp>

#include "hdesigner/simulator.hpp"

int main(int argc, char** argv) {
  hdesigner::SimConfig cfg;
  std::string server = "127.0.0.1:9750";
  int hello_ms = 2000;

  CLI::App app{"Haptic band simulator"};
  app.add_option("--server", server, "Server UDP endpoint host:port")->capture_default_str();
  app.add_option("--id", cfg.device_id, "Device id announced in HELLO")->capture_default_str();
  app.add_option("--channels", cfg.channels, "Motor count")->check(CLI::Range(1, 8))->capture_default_str();
  app.add_option("--trace", cfg.trace_path, "Write the playback trace as JSON lines");
  app.add_option("--listen-port", cfg.listen_port, "Local UDP port (0 = ephemeral)")->capture_default_str();
  app.add_option("--hello-interval-ms", hello_ms, "HELLO beacon period")
      ->check(CLI::Range(10, 600000))
      ->capture_default_str();
  app.add_option("--drop-inbound-n", cfg.drop_inbound_first,
                 "Testing only: ignore the first N receipts of every message")
      ->check(CLI::Range(0, 16));
  app.add_flag("--bars", cfg.show_bars, "Draw channel levels on stderr");
  CLI11_PARSE(app, argc, argv);

  auto endpoint = hdesigner::Endpoint::parse(server);
  if (!endpoint) {
    std::cerr << "hband-sim: cannot resolve --server " << server << std::endl;
    return 2;
  }
  cfg.server = *endpoint;
  cfg.hello_interval = std::chrono::milliseconds(hello_ms);
  cfg.keep_trace = false;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    hdesigner::Simulator sim(cfg);
    sim.start();
    std::cout << "hband-sim: " << cfg.device_id << " on udp " << sim.port() << " -> "
              << cfg.server.to_string() << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    sim.stop();
    const auto s = sim.stats();
    std::cout << "\nhband-sim: received " << s.received << ", applied " << s.applied << ", duplicates "
              << s.duplicates << ", malformed " << s.malformed << std::endl;
  } catch (const std::exception& e) {
    std::cerr << "hband-sim: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
