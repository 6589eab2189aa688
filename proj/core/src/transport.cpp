#include "splc/transport.hpp"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <condition_variable>
#include <cstring>
#include <deque>
#include <mutex>
#include <thread>

#include "splc/errors.hpp"

namespace splc {

namespace {

/// One direction of an in-process connection.
struct ByteQueue {
  std::mutex mutex;
  std::condition_variable ready;
  std::deque<std::byte> bytes;
  bool closed = false;

  void push(std::span<const std::byte> data) {
    {
      std::lock_guard lock(mutex);
      if (closed) throw TransportError("inproc: peer endpoint closed");
      bytes.insert(bytes.end(), data.begin(), data.end());
    }
    ready.notify_one();
  }

  void pop_exact(std::span<std::byte> out) {
    std::unique_lock lock(mutex);
    ready.wait(lock, [&] { return bytes.size() >= out.size() || closed; });
    if (bytes.size() < out.size())
      throw TransportError("inproc: peer disconnected mid-message");
    for (std::size_t i = 0; i < out.size(); ++i) {
      out[i] = bytes.front();
      bytes.pop_front();
    }
  }

  void close() {
    {
      std::lock_guard lock(mutex);
      closed = true;
    }
    ready.notify_all();
  }
};

class InProcTransport final : public Transport {
public:
  InProcTransport(std::shared_ptr<ByteQueue> outgoing, std::shared_ptr<ByteQueue> incoming)
      : outgoing_(std::move(outgoing)), incoming_(std::move(incoming)) {}

  ~InProcTransport() override {
    outgoing_->close();
    incoming_->close();
  }

  void send(std::span<const std::byte> bytes) override { outgoing_->push(bytes); }
  void receive_exact(std::span<std::byte> out) override { incoming_->pop_exact(out); }

private:
  std::shared_ptr<ByteQueue> outgoing_;
  std::shared_ptr<ByteQueue> incoming_;
};

class SocketTransport final : public Transport {
public:
  explicit SocketTransport(int fd) : fd_(fd) {
    const int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }

  ~SocketTransport() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void send(std::span<const std::byte> bytes) override {
    std::size_t sent = 0;
    while (sent < bytes.size()) {
      const ssize_t n = ::send(fd_, bytes.data() + sent, bytes.size() - sent, MSG_NOSIGNAL);
      if (n <= 0) throw TransportError("socket: send failed: " + std::string(std::strerror(errno)));
      sent += static_cast<std::size_t>(n);
    }
  }

  void receive_exact(std::span<std::byte> out) override {
    std::size_t got = 0;
    while (got < out.size()) {
      const ssize_t n = ::recv(fd_, out.data() + got, out.size() - got, 0);
      if (n == 0) throw TransportError("socket: peer disconnected");
      if (n < 0) throw TransportError("socket: recv failed: " + std::string(std::strerror(errno)));
      got += static_cast<std::size_t>(n);
    }
  }

private:
  int fd_;
};

sockaddr_in resolve(const std::string& host, std::uint16_t port) {
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(port);
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    hostent* entry = ::gethostbyname(host.c_str());
    if (!entry || entry->h_addrtype != AF_INET)
      throw TransportError("socket: cannot resolve host '" + host + "'");
    std::memcpy(&addr.sin_addr, entry->h_addr_list[0], sizeof(addr.sin_addr));
  }
  return addr;
}

}  // namespace

std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_inproc_pair() {
  auto ab = std::make_shared<ByteQueue>();
  auto ba = std::make_shared<ByteQueue>();
  return {std::make_unique<InProcTransport>(ab, ba), std::make_unique<InProcTransport>(ba, ab)};
}

std::unique_ptr<Transport> listen_socket(const std::string& host, std::uint16_t port,
                                         std::uint16_t* bound_port) {
  const int listener = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listener < 0) throw TransportError("socket: cannot create listener");
  const int one = 1;
  ::setsockopt(listener, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));

  sockaddr_in addr = resolve(host, port);
  if (::bind(listener, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) != 0) {
    ::close(listener);
    throw TransportError("socket: bind failed: " + std::string(std::strerror(errno)));
  }
  if (bound_port) {
    sockaddr_in actual{};
    socklen_t len = sizeof(actual);
    ::getsockname(listener, reinterpret_cast<sockaddr*>(&actual), &len);
    *bound_port = ntohs(actual.sin_port);
  }
  if (::listen(listener, 1) != 0) {
    ::close(listener);
    throw TransportError("socket: listen failed");
  }
  const int fd = ::accept(listener, nullptr, nullptr);
  ::close(listener);
  if (fd < 0) throw TransportError("socket: accept failed");
  return std::make_unique<SocketTransport>(fd);
}

std::unique_ptr<Transport> connect_socket(const std::string& host, std::uint16_t port) {
  const sockaddr_in addr = resolve(host, port);
  // The listener may still be coming up when both sides start together.
  for (int attempt = 0; attempt < 100; ++attempt) {
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0) throw TransportError("socket: cannot create socket");
    if (::connect(fd, reinterpret_cast<const sockaddr*>(&addr), sizeof(addr)) == 0)
      return std::make_unique<SocketTransport>(fd);
    ::close(fd);
    std::this_thread::sleep_for(std::chrono::milliseconds(50));
  }
  throw TransportError("socket: cannot connect to " + host + ":" + std::to_string(port));
}

}  // namespace splc
