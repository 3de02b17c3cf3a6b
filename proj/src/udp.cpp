#include "hdesigner/udp.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <array>
#include <cerrno>
#include <charconv>
#include <system_error>
#include <utility>

namespace hdesigner {

namespace {

sockaddr_in to_sockaddr(const Endpoint& e) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(e.addr);
  sa.sin_port = htons(e.port);
  return sa;
}

std::optional<std::uint32_t> resolve(const std::string& host) {
  in_addr a{};
  if (inet_pton(AF_INET, host.c_str(), &a) == 1) return ntohl(a.s_addr);
  addrinfo hints{};
  hints.ai_family = AF_INET;
  hints.ai_socktype = SOCK_DGRAM;
  addrinfo* res = nullptr;
  if (getaddrinfo(host.c_str(), nullptr, &hints, &res) != 0 || res == nullptr) return std::nullopt;
  const auto addr = ntohl(reinterpret_cast<sockaddr_in*>(res->ai_addr)->sin_addr.s_addr);
  freeaddrinfo(res);
  return addr;
}

}  // namespace

std::string Endpoint::to_string() const {
  in_addr a{};
  a.s_addr = htonl(addr);
  std::array<char, INET_ADDRSTRLEN> buf{};
  inet_ntop(AF_INET, &a, buf.data(), buf.size());
  return std::string(buf.data()) + ":" + std::to_string(port);
}

std::optional<Endpoint> Endpoint::parse(std::string_view text) {
  const auto colon = text.rfind(':');
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  const auto port_text = text.substr(colon + 1);
  unsigned port = 0;
  auto [p, ec] = std::from_chars(port_text.data(), port_text.data() + port_text.size(), port);
  if (ec != std::errc() || p != port_text.data() + port_text.size() || port > 65535)
    return std::nullopt;
  auto addr = resolve(std::string(text.substr(0, colon)));
  if (!addr) return std::nullopt;
  return Endpoint{*addr, static_cast<std::uint16_t>(port)};
}

UdpSocket::UdpSocket(UdpSocket&& other) noexcept : fd_(std::exchange(other.fd_, -1)) {}

UdpSocket& UdpSocket::operator=(UdpSocket&& other) noexcept {
  if (this != &other) {
    if (fd_ >= 0) ::close(fd_);
    fd_ = std::exchange(other.fd_, -1);
  }
  return *this;
}

UdpSocket::~UdpSocket() {
  if (fd_ >= 0) ::close(fd_);
}

UdpSocket UdpSocket::bind(std::uint16_t port, std::string_view host) {
  const int fd = ::socket(AF_INET, SOCK_DGRAM | SOCK_CLOEXEC, 0);
  if (fd < 0) throw std::system_error(errno, std::generic_category(), "socket");
  UdpSocket sock(fd);
  auto addr = resolve(std::string(host));
  if (!addr) throw std::system_error(EINVAL, std::generic_category(), "resolve " + std::string(host));
  const auto sa = to_sockaddr({*addr, port});
  if (::bind(fd, reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0)
    throw std::system_error(errno, std::generic_category(), "bind udp port " + std::to_string(port));
  return sock;
}

std::uint16_t UdpSocket::local_port() const {
  sockaddr_in sa{};
  socklen_t len = sizeof sa;
  if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&sa), &len) != 0)
    throw std::system_error(errno, std::generic_category(), "getsockname");
  return ntohs(sa.sin_port);
}

bool UdpSocket::send_to(const Endpoint& to, std::string_view payload) const noexcept {
  const auto sa = to_sockaddr(to);
  const auto n = ::sendto(fd_, payload.data(), payload.size(), 0,
                          reinterpret_cast<const sockaddr*>(&sa), sizeof sa);
  return n == static_cast<ssize_t>(payload.size());
}

std::optional<Datagram> UdpSocket::receive(std::chrono::milliseconds timeout) const {
  pollfd pfd{fd_, POLLIN, 0};
  const int ready = ::poll(&pfd, 1, static_cast<int>(timeout.count()));
  if (ready <= 0 || !(pfd.revents & POLLIN)) return std::nullopt;

  // Anything larger than the 64 KiB UDP limit cannot arrive anyway.
  std::string buf(65536, '\0');
  sockaddr_in from{};
  socklen_t len = sizeof from;
  const auto n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&from), &len);
  if (n < 0) return std::nullopt;
  buf.resize(static_cast<std::size_t>(n));
  return Datagram{std::move(buf), Endpoint{ntohl(from.sin_addr.s_addr), ntohs(from.sin_port)}};
}

}  // namespace hdesigner
