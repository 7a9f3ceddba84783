#pragma once

#include <chrono>
#include <cstdint>
#include <string>
#include <utility>

#include "gridbench/transport/framing.hpp"

namespace gridbench::transport {

// Minimal RAII + Result wrappers over loopback TCP/UDP, just enough for the
// real-sockets backend. IPv4 only; hosts are dotted quads (tests use
// 127.0.0.1 and ephemeral ports).

class Fd {
 public:
  Fd() = default;
  explicit Fd(int fd) : fd_(fd) {}
  ~Fd() { reset(); }
  Fd(Fd&& other) noexcept : fd_(other.fd_) { other.fd_ = -1; }
  Fd& operator=(Fd&& other) noexcept;
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;

  int get() const { return fd_; }
  bool valid() const { return fd_ >= 0; }
  void reset();

 private:
  int fd_ = -1;
};

struct SocketAddress {
  std::string host = "127.0.0.1";
  std::uint16_t port = 0;
  bool operator==(const SocketAddress&) const = default;
};

class TcpStream {
 public:
  static TransportResult<TcpStream> connect(const SocketAddress& to);

  TransportResult<std::size_t> send_all(ByteView bytes);
  // 0 bytes = orderly close. Blocks up to `timeout`; Timeout error after.
  TransportResult<std::size_t> recv_some(Bytes& into,
                                         std::chrono::milliseconds timeout);
  void shutdown_send();
  bool valid() const { return fd_.valid(); }

  explicit TcpStream(Fd fd) : fd_(std::move(fd)) {}

 private:
  Fd fd_;
};

class TcpListener {
 public:
  static TransportResult<TcpListener> bind_loopback();
  std::uint16_t port() const { return port_; }
  TransportResult<TcpStream> accept(std::chrono::milliseconds timeout);

 private:
  TcpListener(Fd fd, std::uint16_t port) : fd_(std::move(fd)), port_(port) {}
  Fd fd_;
  std::uint16_t port_ = 0;
};

class UdpSocket {
 public:
  static TransportResult<UdpSocket> bind_loopback();
  std::uint16_t port() const { return port_; }
  TransportResult<std::size_t> send_to(ByteView bytes, const SocketAddress& to);
  TransportResult<std::pair<Bytes, SocketAddress>> recv_from(
      std::chrono::milliseconds timeout);

 private:
  UdpSocket(Fd fd, std::uint16_t port) : fd_(std::move(fd)), port_(port) {}
  Fd fd_;
  std::uint16_t port_ = 0;
};

}  // namespace gridbench::transport
