#ifndef SPLC_TRANSPORT_HPP
#define SPLC_TRANSPORT_HPP

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace splc {

/// Reliable ordered byte stream between exactly two endpoints.
class Transport {
public:
  virtual ~Transport() = default;
  virtual void send(std::span<const std::byte> bytes) = 0;
  /// Blocks until exactly out.size() bytes arrived. Throws TransportError
  /// on disconnect.
  virtual void receive_exact(std::span<std::byte> out) = 0;
};

/// Two in-process endpoints connected by a pair of byte queues.
std::pair<std::unique_ptr<Transport>, std::unique_ptr<Transport>> make_inproc_pair();

/// TCP loopback/socket endpoints. `listen_socket` blocks until one peer
/// connects; `connect_socket` retries briefly while the listener comes up.
std::unique_ptr<Transport> listen_socket(const std::string& host, std::uint16_t port,
                                         std::uint16_t* bound_port = nullptr);
std::unique_ptr<Transport> connect_socket(const std::string& host, std::uint16_t port);

}  // namespace splc

#endif
