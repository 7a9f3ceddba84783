#include "gridbench/transport/framing.hpp"

#include <algorithm>

#include "gridbench/iec/messages.hpp"

namespace gridbench::transport {

const char* transport_error_name(TransportError e) {
  switch (e) {
    case TransportError::ConnectionClosed: return "connection_closed";
    case TransportError::FrameTooLarge: return "frame_too_large";
    case TransportError::MalformedFrame: return "malformed_frame";
    case TransportError::PayloadTooLargeForDatagram: return "payload_too_large";
    case TransportError::Truncated: return "truncated";
    case TransportError::SocketError: return "socket_error";
    case TransportError::Timeout: return "timeout";
    case TransportError::BadSubscription: return "bad_subscription";
  }
  return "unknown";
}

Bytes encode_stream_frame(std::uint8_t kind, ByteView body) {
  if (1 + body.size() > kMaxStreamFrame)
    throw TransportLogicError(TransportError::FrameTooLarge,
                              "stream frame above 1 MiB");
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(1 + body.size()));
  w.u8(kind);
  w.raw(body);
  return std::move(w).take();
}

void StreamFrameAssembler::feed(ByteView bytes) {
  buf_.insert(buf_.end(), bytes.begin(), bytes.end());
}

TransportResult<std::optional<StreamFrame>> StreamFrameAssembler::next() {
  if (poisoned_)
    return Failure<TransportError>{TransportError::MalformedFrame,
                                   "stream already poisoned"};
  if (buf_.size() < 4) return std::optional<StreamFrame>{};
  std::uint32_t len = 0;
  for (int i = 0; i < 4; ++i) len = (len << 8) | buf_[static_cast<std::size_t>(i)];
  if (len < 1 || len > kMaxStreamFrame) {
    poisoned_ = true;
    return Failure<TransportError>{TransportError::MalformedFrame,
                                   "frame length " + std::to_string(len)};
  }
  if (buf_.size() < 4u + len) return std::optional<StreamFrame>{};
  StreamFrame frame;
  frame.kind = buf_[4];
  frame.body.assign(buf_.begin() + 5, buf_.begin() + 4 + len);
  buf_.erase(buf_.begin(), buf_.begin() + 4 + len);
  return std::optional<StreamFrame>{std::move(frame)};
}

Bytes encode_datagram(const std::string& topic, ByteView payload) {
  if (topic.empty() || topic.size() > 255)
    throw TransportLogicError(TransportError::MalformedFrame,
                              "topic must be 1..255 bytes");
  if (1 + topic.size() + payload.size() > kMaxDatagram)
    throw TransportLogicError(TransportError::PayloadTooLargeForDatagram,
                              "datagram above 60 KiB");
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(topic.size()));
  w.raw(as_view(topic));
  w.raw(payload);
  return std::move(w).take();
}

TransportResult<Datagram> decode_datagram(ByteView frame) {
  ByteReader r(frame);
  const std::uint8_t topic_len = r.u8();
  Datagram d;
  d.topic = r.str(topic_len);
  if (!r.ok())
    return Failure<TransportError>{TransportError::Truncated, "topic truncated"};
  if (d.topic.empty())
    return Failure<TransportError>{TransportError::MalformedFrame, "empty topic"};
  d.payload = r.raw(r.remaining());
  return d;
}

Bytes encode_probe(const EchoProbe& probe) {
  ByteWriter w;
  w.u64(probe.probe_seq);
  w.i64(probe.sent_at_us);
  w.u16(probe.pad_bytes);
  w.zeros(probe.pad_bytes);
  return std::move(w).take();
}

TransportResult<EchoProbe> decode_probe(ByteView frame) {
  ByteReader r(frame);
  EchoProbe p;
  p.probe_seq = r.u64();
  p.sent_at_us = r.i64();
  p.pad_bytes = r.u16();
  if (!r.ok())
    return Failure<TransportError>{TransportError::Truncated, "probe header"};
  r.skip(p.pad_bytes);
  if (!r.ok())
    return Failure<TransportError>{TransportError::Truncated, "probe padding"};
  if (r.remaining() != 0)
    return Failure<TransportError>{TransportError::MalformedFrame,
                                   "bytes after probe padding"};
  return p;
}

SubscriberQueue::SubscriberQueue(Subscription sub) : sub_(std::move(sub)) {
  if (sub_.queue_bound < 1)
    throw TransportLogicError(TransportError::BadSubscription,
                              "queue bound must be >= 1");
}

bool SubscriberQueue::offer(const std::string& topic, Bytes payload) {
  if (!iec::topic_match(sub_.topic_pattern, topic)) return false;
  std::lock_guard<std::mutex> lock(mu_);
  if (closed_) return false;
  if (queue_.size() >= sub_.queue_bound) {
    queue_.pop_front();
    ++dropped_;
  }
  queue_.push_back(std::move(payload));
  cv_.notify_one();
  return true;
}

std::optional<Bytes> SubscriberQueue::poll() {
  std::lock_guard<std::mutex> lock(mu_);
  if (queue_.empty()) return std::nullopt;
  Bytes front = std::move(queue_.front());
  queue_.pop_front();
  return front;
}

std::optional<Bytes> SubscriberQueue::wait_poll(std::chrono::milliseconds timeout) {
  std::unique_lock<std::mutex> lock(mu_);
  cv_.wait_for(lock, timeout, [this] { return !queue_.empty() || closed_; });
  if (queue_.empty()) return std::nullopt;
  Bytes front = std::move(queue_.front());
  queue_.pop_front();
  return front;
}

void SubscriberQueue::close() {
  std::lock_guard<std::mutex> lock(mu_);
  closed_ = true;
  cv_.notify_all();
}

std::uint64_t SubscriberQueue::dropped_local() const {
  std::lock_guard<std::mutex> lock(mu_);
  return dropped_;
}

}  // namespace gridbench::transport
