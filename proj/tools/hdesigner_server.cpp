// hdesigner-server: HTTP API + UDP transport for haptic bands.

#include <csignal>
#include <iostream>
#include <pthread.h>

#include <CLI11.hpp>

#include "hdesigner/server.hpp"

int main(int argc, char** argv) {
  hdesigner::ServerConfig cfg;
  int ack_timeout_ms = 200;
  int drop_n = 0;
  int drop_acks_n = 0;

  CLI::App app{"Haptic pattern design server"};
  app.add_option("--host", cfg.host, "HTTP bind address")->envname("HDESIGNER_HOST")->capture_default_str();
  app.add_option("--http-port", cfg.http_port, "HTTP port (0 = ephemeral)")
      ->envname("HDESIGNER_HTTP_PORT")
      ->capture_default_str();
  app.add_option("--udp-port", cfg.transport.udp_port, "UDP port devices talk to")
      ->envname("HDESIGNER_UDP_PORT")
      ->capture_default_str();
  app.add_option("--library-path", cfg.library_path, "Preset library file")
      ->envname("HDESIGNER_LIBRARY_PATH")
      ->capture_default_str();
  app.add_option("--ack-timeout-ms", ack_timeout_ms, "Wait per attempt before retransmitting")
      ->envname("HDESIGNER_ACK_TIMEOUT_MS")
      ->check(CLI::Range(1, 60000))
      ->capture_default_str();
  app.add_option("--static-dir", cfg.static_dir, "Serve the web UI from this directory at /")
      ->envname("HDESIGNER_STATIC_DIR");
  app.add_option("--fault-drop-n", drop_n, "Testing only: drop the first N transmissions of every message")
      ->check(CLI::Range(0, 4));
  app.add_option("--fault-drop-acks-n", drop_acks_n, "Testing only: ignore the first N ACKs of every message")
      ->check(CLI::Range(0, 4));
  CLI11_PARSE(app, argc, argv);

  cfg.transport.ack_timeout = std::chrono::milliseconds(ack_timeout_ms);
  cfg.transport.faults.drop_outbound_first = drop_n;
  cfg.transport.faults.drop_acks_first = drop_acks_n;

  sigset_t signals;
  sigemptyset(&signals);
  sigaddset(&signals, SIGINT);
  sigaddset(&signals, SIGTERM);
  pthread_sigmask(SIG_BLOCK, &signals, nullptr);

  try {
    hdesigner::ApiServer server(cfg);
    server.start();
    std::cout << "hdesigner-server: http " << cfg.host << ":" << server.http_port() << ", udp "
              << server.transport().port() << ", library " << cfg.library_path.string() << std::endl;
    int sig = 0;
    sigwait(&signals, &sig);
    std::cout << "hdesigner-server: shutting down" << std::endl;
    server.stop();
  } catch (const std::exception& e) {
    std::cerr << "hdesigner-server: " << e.what() << std::endl;
    return 1;
  }
  return 0;
}
