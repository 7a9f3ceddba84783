#include "gridbench/transport/sockets.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>

namespace gridbench::transport {

namespace {

Failure<TransportError> sys_error(const char* what) {
  return Failure<TransportError>{TransportError::SocketError,
                                 std::string(what) + ": " + std::strerror(errno)};
}

TransportResult<sockaddr_in> to_sockaddr(const SocketAddress& addr) {
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_port = htons(addr.port);
  if (inet_pton(AF_INET, addr.host.c_str(), &sa.sin_addr) != 1)
    return Failure<TransportError>{TransportError::SocketError,
                                   "bad IPv4 address " + addr.host};
  return sa;
}

SocketAddress from_sockaddr(const sockaddr_in& sa) {
  char buf[INET_ADDRSTRLEN] = {0};
  inet_ntop(AF_INET, &sa.sin_addr, buf, sizeof buf);
  return SocketAddress{buf, ntohs(sa.sin_port)};
}

// -1 error, 0 timeout, 1 ready.
int wait_readable(int fd, std::chrono::milliseconds timeout) {
  pollfd pfd{fd, POLLIN, 0};
  return ::poll(&pfd, 1, static_cast<int>(timeout.count()));
}

TransportResult<std::uint16_t> bound_port(int fd) {
  sockaddr_in sa{};
  socklen_t len = sizeof sa;
  if (::getsockname(fd, reinterpret_cast<sockaddr*>(&sa), &len) != 0)
    return sys_error("getsockname");
  return ntohs(sa.sin_port);
}

}  // namespace

Fd& Fd::operator=(Fd&& other) noexcept {
  if (this != &other) {
    reset();
    fd_ = other.fd_;
    other.fd_ = -1;
  }
  return *this;
}

void Fd::reset() {
  if (fd_ >= 0) {
    ::close(fd_);
    fd_ = -1;
  }
}

TransportResult<TcpStream> TcpStream::connect(const SocketAddress& to) {
  auto sa = to_sockaddr(to);
  if (!sa.ok()) return sa.failure();
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (!fd.valid()) return sys_error("socket");
  const sockaddr_in addr = sa.value();
  if (::connect(fd.get(), reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
    return sys_error("connect");
  int one = 1;
  ::setsockopt(fd.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return TcpStream(std::move(fd));
}

TransportResult<std::size_t> TcpStream::send_all(ByteView bytes) {
  std::size_t sent = 0;
  while (sent < bytes.size()) {
    const ssize_t n = ::send(fd_.get(), bytes.data() + sent, bytes.size() - sent,
                             MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      if (errno == EPIPE || errno == ECONNRESET)
        return Failure<TransportError>{TransportError::ConnectionClosed,
                                       std::strerror(errno)};
      return sys_error("send");
    }
    sent += static_cast<std::size_t>(n);
  }
  return sent;
}

TransportResult<std::size_t> TcpStream::recv_some(Bytes& into,
                                                  std::chrono::milliseconds timeout) {
  const int ready = wait_readable(fd_.get(), timeout);
  if (ready < 0) return sys_error("poll");
  if (ready == 0)
    return Failure<TransportError>{TransportError::Timeout, "recv timed out"};
  std::uint8_t buf[16384];
  const ssize_t n = ::recv(fd_.get(), buf, sizeof buf, 0);
  if (n < 0) return sys_error("recv");
  into.insert(into.end(), buf, buf + n);
  return static_cast<std::size_t>(n);
}

void TcpStream::shutdown_send() {
  if (fd_.valid()) ::shutdown(fd_.get(), SHUT_WR);
}

TransportResult<TcpListener> TcpListener::bind_loopback() {
  Fd fd(::socket(AF_INET, SOCK_STREAM, 0));
  if (!fd.valid()) return sys_error("socket");
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  sa.sin_port = 0;  // ephemeral
  if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0)
    return sys_error("bind");
  if (::listen(fd.get(), 16) != 0) return sys_error("listen");
  auto port = bound_port(fd.get());
  if (!port.ok()) return port.failure();
  return TcpListener(std::move(fd), port.value());
}

TransportResult<TcpStream> TcpListener::accept(std::chrono::milliseconds timeout) {
  const int ready = wait_readable(fd_.get(), timeout);
  if (ready < 0) return sys_error("poll");
  if (ready == 0)
    return Failure<TransportError>{TransportError::Timeout, "accept timed out"};
  Fd conn(::accept(fd_.get(), nullptr, nullptr));
  if (!conn.valid()) return sys_error("accept");
  int one = 1;
  ::setsockopt(conn.get(), IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
  return TcpStream(std::move(conn));
}

TransportResult<UdpSocket> UdpSocket::bind_loopback() {
  Fd fd(::socket(AF_INET, SOCK_DGRAM, 0));
  if (!fd.valid()) return sys_error("socket");
  sockaddr_in sa{};
  sa.sin_family = AF_INET;
  sa.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  sa.sin_port = 0;
  if (::bind(fd.get(), reinterpret_cast<const sockaddr*>(&sa), sizeof sa) != 0)
    return sys_error("bind");
  auto port = bound_port(fd.get());
  if (!port.ok()) return port.failure();
  return UdpSocket(std::move(fd), port.value());
}

TransportResult<std::size_t> UdpSocket::send_to(ByteView bytes,
                                                const SocketAddress& to) {
  auto sa = to_sockaddr(to);
  if (!sa.ok()) return sa.failure();
  const sockaddr_in addr = sa.value();
  const ssize_t n = ::sendto(fd_.get(), bytes.data(), bytes.size(), 0,
                             reinterpret_cast<const sockaddr*>(&addr), sizeof addr);
  if (n < 0) return sys_error("sendto");
  return static_cast<std::size_t>(n);
}

TransportResult<std::pair<Bytes, SocketAddress>> UdpSocket::recv_from(
    std::chrono::milliseconds timeout) {
  const int ready = wait_readable(fd_.get(), timeout);
  if (ready < 0) return sys_error("poll");
  if (ready == 0)
    return Failure<TransportError>{TransportError::Timeout, "recv timed out"};
  Bytes buf(65536);
  sockaddr_in sa{};
  socklen_t len = sizeof sa;
  const ssize_t n = ::recvfrom(fd_.get(), buf.data(), buf.size(), 0,
                               reinterpret_cast<sockaddr*>(&sa), &len);
  if (n < 0) return sys_error("recvfrom");
  buf.resize(static_cast<std::size_t>(n));
  return std::make_pair(std::move(buf), from_sockaddr(sa));
}

}  // namespace gridbench::transport
