#pragma once

#include <chrono>
#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace hdesigner {

/// IPv4 address and port, both in host byte order.
struct Endpoint {
  std::uint32_t addr = 0;
  std::uint16_t port = 0;

  std::string to_string() const;

  /// Accepts "host:port"; host may be a dotted quad or a resolvable name.
  static std::optional<Endpoint> parse(std::string_view text);
  static Endpoint loopback(std::uint16_t port) { return {0x7f000001u, port}; }

  friend auto operator<=>(const Endpoint&, const Endpoint&) = default;
};

struct Datagram {
  std::string data;
  Endpoint from;
};

/// Owning wrapper around a bound IPv4 UDP socket.
class UdpSocket {
 public:
  UdpSocket() = default;
  UdpSocket(const UdpSocket&) = delete;
  UdpSocket& operator=(const UdpSocket&) = delete;
  UdpSocket(UdpSocket&& other) noexcept;
  UdpSocket& operator=(UdpSocket&& other) noexcept;
  ~UdpSocket();

  /// Binds to `host:port`; port 0 picks an ephemeral port. Throws
  /// std::system_error on failure.
  static UdpSocket bind(std::uint16_t port, std::string_view host = "0.0.0.0");

  bool valid() const noexcept { return fd_ >= 0; }
  std::uint16_t local_port() const;

  /// False when the OS rejects the send.
  bool send_to(const Endpoint& to, std::string_view payload) const noexcept;

  /// Waits up to `timeout` for one datagram.
  std::optional<Datagram> receive(std::chrono::milliseconds timeout) const;

 private:
  explicit UdpSocket(int fd) : fd_(fd) {}
  int fd_ = -1;
};

}  // namespace hdesigner
