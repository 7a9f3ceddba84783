#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <string>

#include "gridbench/common/bytes.hpp"
#include "gridbench/common/result.hpp"

namespace gridbench::transport {

enum class TransportError : std::uint8_t {
  ConnectionClosed,
  FrameTooLarge,
  MalformedFrame,
  PayloadTooLargeForDatagram,
  Truncated,
  SocketError,
  Timeout,
  BadSubscription,
};

const char* transport_error_name(TransportError e);

using TransportLogicError = CodedError<TransportError>;

template <typename T>
using TransportResult = Result<T, TransportError>;

inline constexpr std::size_t kMaxStreamFrame = 1u << 20;  // kind + body
inline constexpr std::size_t kMaxDatagram = 60u * 1024;   // topic + payload

// ---- reliable-stream framing: length u32 (kind+body), kind u8, body ----

struct StreamFrame {
  std::uint8_t kind = 0;
  Bytes body;
  bool operator==(const StreamFrame&) const = default;
};

// Throws FrameTooLarge beyond kMaxStreamFrame.
Bytes encode_stream_frame(std::uint8_t kind, ByteView body);

// Incremental defragmenter for a byte stream. Any framing violation is
// fatal: the caller must drop the connection, never resynchronize.
class StreamFrameAssembler {
 public:
  void feed(ByteView bytes);
  // A frame, nullopt when more bytes are needed, or a fatal framing error.
  TransportResult<std::optional<StreamFrame>> next();
  std::size_t buffered() const { return buf_.size(); }

 private:
  Bytes buf_;
  bool poisoned_ = false;
};

// ---- datagram topic framing: topic_len u8, topic, payload ----

Bytes encode_datagram(const std::string& topic, ByteView payload);

struct Datagram {
  std::string topic;
  Bytes payload;
};

TransportResult<Datagram> decode_datagram(ByteView frame);

// ---- echo probes ----

struct EchoProbe {
  std::uint64_t probe_seq = 0;
  std::int64_t sent_at_us = 0;
  std::uint16_t pad_bytes = 0;
  bool operator==(const EchoProbe&) const = default;
};

Bytes encode_probe(const EchoProbe& probe);
TransportResult<EchoProbe> decode_probe(ByteView frame);

// ---- subscriptions ----

struct Subscription {
  std::string topic_pattern;       // literal topic or "*"
  std::size_t queue_bound = 1024;  // >= 1
};

// Bounded delivery queue with drop-oldest overflow. Local drops are counted
// apart from network loss so loss attribution stays exact. Thread-safe; the
// virtual backend uses it single-threaded.
class SubscriberQueue {
 public:
  explicit SubscriberQueue(Subscription sub);

  // Applies the topic filter; returns true when enqueued.
  bool offer(const std::string& topic, Bytes payload);

  std::optional<Bytes> poll();
  std::optional<Bytes> wait_poll(std::chrono::milliseconds timeout);

  void close();
  std::uint64_t dropped_local() const;
  const Subscription& subscription() const { return sub_; }

 private:
  Subscription sub_;
  mutable std::mutex mu_;
  std::condition_variable cv_;
  std::deque<Bytes> queue_;
  std::uint64_t dropped_ = 0;
  bool closed_ = false;
};

}  // namespace gridbench::transport
